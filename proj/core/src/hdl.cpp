#include "witloc/hdl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace witloc {

namespace {

std::string format_pos(const std::string& file, int line, int col, const std::string& msg) {
  std::ostringstream os;
  os << file << ":" << line << ":" << col << ": " << msg;
  return os.str();
}

}  // namespace

ParseError::ParseError(std::string file_, int line_, int column_, const std::string& message_)
    : std::runtime_error(format_pos(file_, line_, column_, message_)),
      file(std::move(file_)),
      line(line_),
      column(column_),
      message(message_) {}

uint64_t width_mask(int width) {
  if (width >= 64) return ~uint64_t{0};
  return (uint64_t{1} << width) - 1;
}

int Design::signal_index(std::string_view name) const {
  for (size_t i = 0; i < signals.size(); ++i) {
    if (signals[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

// ── Lexer ────────────────────────────────────────────────────────────────

namespace {

enum class Tok {
  Ident,
  Number,       // bare decimal
  SizedNumber,  // N'bxxx / N'hxx / N'dxx
  Symbol,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
  // SizedNumber pieces
  int size = 0;
  char base = 'd';
  uint64_t value = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  Lexer(const std::string& text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
        continue;
      }
      if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        skip_block_comment();
        continue;
      }
      if (ident_start(c)) {
        lex_ident(out);
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        lex_number(out);
        continue;
      }
      lex_symbol(out);
    }
    out.push_back(Token{Tok::End, "", line_, col_, 0, 'd', 0});
    return out;
  }

 private:
  void advance() {
    ++pos_;
    ++col_;
  }

  void skip_block_comment() {
    int sl = line_, sc = col_;
    advance();
    advance();
    while (pos_ + 1 < text_.size()) {
      if (text_[pos_] == '*' && text_[pos_ + 1] == '/') {
        advance();
        advance();
        return;
      }
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else {
        advance();
      }
    }
    throw ParseError(file_, sl, sc, "unterminated block comment");
  }

  void lex_ident(std::vector<Token>& out) {
    Token t{Tok::Ident, "", line_, col_, 0, 'd', 0};
    size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) advance();
    t.text = text_.substr(start, pos_ - start);
    out.push_back(std::move(t));
  }

  void lex_number(std::vector<Token>& out) {
    Token t{Tok::Number, "", line_, col_, 0, 'd', 0};
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
    std::string digits = text_.substr(start, pos_ - start);
    if (pos_ < text_.size() && text_[pos_] == '\'') {
      advance();
      if (pos_ >= text_.size()) throw ParseError(file_, t.line, t.col, "truncated sized literal");
      char base = static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_])));
      if (base != 'b' && base != 'h' && base != 'd')
        throw ParseError(file_, t.line, t.col, std::string("unsupported literal base '") + text_[pos_] + "'");
      advance();
      size_t vstart = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        advance();
      std::string vtext = text_.substr(vstart, pos_ - vstart);
      if (vtext.empty()) throw ParseError(file_, t.line, t.col, "truncated sized literal");
      t.kind = Tok::SizedNumber;
      t.size = std::stoi(digits);
      t.base = base;
      t.value = parse_digits(vtext, base, t.line, t.col);
      t.text = digits + "'" + base + vtext;
      out.push_back(std::move(t));
      return;
    }
    t.value = parse_digits(digits, 'd', t.line, t.col);
    t.text = digits;
    out.push_back(std::move(t));
  }

  uint64_t parse_digits(const std::string& s, char base, int line, int col) {
    int radix = base == 'b' ? 2 : base == 'h' ? 16 : 10;
    uint64_t v = 0;
    for (char ch : s) {
      if (ch == '_') continue;
      int d;
      if (ch >= '0' && ch <= '9')
        d = ch - '0';
      else if (ch >= 'a' && ch <= 'f')
        d = ch - 'a' + 10;
      else if (ch >= 'A' && ch <= 'F')
        d = ch - 'A' + 10;
      else
        throw ParseError(file_, line, col, std::string("bad digit '") + ch + "' in literal");
      if (d >= radix) throw ParseError(file_, line, col, std::string("bad digit '") + ch + "' in literal");
      uint64_t nv = v * radix + static_cast<uint64_t>(d);
      if (nv < v) throw ParseError(file_, line, col, "literal does not fit in 64 bits");
      v = nv;
    }
    return v;
  }

  void lex_symbol(std::vector<Token>& out) {
    static const char* two_char[] = {"<=", ">=", "==", "!=", "&&", "||", "<<", ">>"};
    Token t{Tok::Symbol, "", line_, col_, 0, 'd', 0};
    if (pos_ + 1 < text_.size()) {
      std::string two = text_.substr(pos_, 2);
      for (const char* s : two_char) {
        if (two == s) {
          t.text = two;
          advance();
          advance();
          out.push_back(std::move(t));
          return;
        }
      }
    }
    t.text = std::string(1, text_[pos_]);
    advance();
    out.push_back(std::move(t));
  }

  const std::string& text_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ── Parser / elaborator ──────────────────────────────────────────────────

const char* kKeywords[] = {"module", "endmodule", "input",  "output",  "reg",
                           "wire",   "assign",    "always", "posedge", "begin",
                           "end",    "if",        "else",   "case",    "endcase",
                           "default"};

bool is_keyword(const std::string& s) {
  for (const char* k : kKeywords)
    if (s == k) return true;
  return false;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file)
      : toks_(std::move(tokens)), file_(std::move(file)) {}

  Design parse() {
    design_.file = file_;
    expect_keyword("module");
    design_.name = expect_ident("module name");
    expect_symbol("(");
    if (!peek_symbol(")")) {
      parse_port();
      while (accept_symbol(",")) parse_port();
    }
    expect_symbol(")");
    expect_symbol(";");

    while (!peek_keyword("endmodule")) {
      const Token& t = peek();
      if (t.kind == Tok::End)
        throw err(t, "unexpected end of input, expected 'endmodule'");
      if (t.kind != Tok::Ident) throw err(t, "expected declaration, 'assign' or 'always'");
      if (t.text == "input" || t.text == "output" || t.text == "reg" || t.text == "wire") {
        parse_body_decl();
      } else if (t.text == "assign") {
        parse_continuous_assign();
      } else if (t.text == "always") {
        parse_always();
      } else {
        throw err(t, "unsupported construct '" + t.text + "'");
      }
    }
    expect_keyword("endmodule");
    elaborate();
    return std::move(design_);
  }

 private:
  // -- token helpers

  const Token& peek(int ahead = 0) const {
    size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }

  const Token& next() {
    const Token& t = toks_[std::min(pos_, toks_.size() - 1)];
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  ParseError err(const Token& t, const std::string& msg) const {
    return ParseError(file_, t.line, t.col, msg);
  }

  bool peek_symbol(const std::string& s) const {
    return peek().kind == Tok::Symbol && peek().text == s;
  }

  bool accept_symbol(const std::string& s) {
    if (peek_symbol(s)) {
      next();
      return true;
    }
    return false;
  }

  void expect_symbol(const std::string& s) {
    if (!accept_symbol(s)) throw err(peek(), "expected '" + s + "'");
  }

  bool peek_keyword(const std::string& k) const {
    return peek().kind == Tok::Ident && peek().text == k;
  }

  bool accept_keyword(const std::string& k) {
    if (peek_keyword(k)) {
      next();
      return true;
    }
    return false;
  }

  void expect_keyword(const std::string& k) {
    if (!accept_keyword(k)) throw err(peek(), "expected '" + k + "'");
  }

  std::string expect_ident(const std::string& what) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || is_keyword(t.text))
      throw err(t, "expected " + what);
    next();
    return t.text;
  }

  // -- declarations

  void declare(const Token& at, SignalDecl decl) {
    if (decl.name == "clk")
      throw err(at, "'clk' is implicit and cannot be declared");
    if (design_.signal_index(decl.name) >= 0)
      throw err(at, "duplicate declaration of signal '" + decl.name + "'");
    if (decl.width < 1 || decl.width > 64)
      throw err(at, "signal width must be in [1, 64]");
    design_.signals.push_back(std::move(decl));
  }

  int parse_width(const Token& at) {
    if (!accept_symbol("[")) return 1;
    const Token& msb = peek();
    if (msb.kind != Tok::Number) throw err(msb, "expected constant msb index");
    next();
    expect_symbol(":");
    const Token& lsb = peek();
    if (lsb.kind != Tok::Number || lsb.value != 0)
      throw err(lsb, "only [msb:0] ranges are supported");
    next();
    expect_symbol("]");
    if (msb.value > 63) throw err(at, "signal width must be in [1, 64]");
    return static_cast<int>(msb.value) + 1;
  }

  void parse_port() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) throw err(t, "expected port declaration");
    if (t.text == "input") {
      next();
      int w = parse_width(t);
      std::string name = expect_ident("port name");
      declare(t, SignalDecl{name, w, SignalRole::Input, 0, false});
      return;
    }
    if (t.text == "output") {
      next();
      bool is_reg = accept_keyword("reg");
      int w = parse_width(t);
      std::string name = expect_ident("port name");
      SignalDecl d{name, w, is_reg ? SignalRole::Register : SignalRole::Output, 0, true};
      declare(t, std::move(d));
      return;
    }
    throw err(t, "unsupported construct in port list; expected 'input' or 'output'");
  }

  void parse_body_decl() {
    const Token& t = next();  // input/output/reg/wire
    SignalRole role;
    bool output_port = false;
    if (t.text == "input")
      role = SignalRole::Input;
    else if (t.text == "output") {
      output_port = true;
      role = accept_keyword("reg") ? SignalRole::Register : SignalRole::Output;
    } else if (t.text == "reg")
      role = SignalRole::Register;
    else
      role = SignalRole::Wire;
    int w = parse_width(t);
    for (;;) {
      std::string name = expect_ident("signal name");
      uint64_t reset = 0;
      if (accept_symbol("=")) {
        if (role != SignalRole::Register)
          throw err(t, "initializer is only allowed on 'reg' declarations");
        const Token& v = peek();
        if (v.kind != Tok::Number && v.kind != Tok::SizedNumber)
          throw err(v, "expected constant initializer");
        next();
        reset = v.value;
        check_literal_fits(v, v.kind == Tok::SizedNumber ? v.size : w);
        if (reset > width_mask(w))
          throw err(v, "width mismatch: reset value does not fit in " + std::to_string(w) + " bits");
      }
      declare(t, SignalDecl{name, w, role, reset, output_port});
      if (!accept_symbol(",")) break;
    }
    expect_symbol(";");
  }

  void check_literal_fits(const Token& t, int width) {
    if (width < 1 || width > 64) throw err(t, "literal width must be in [1, 64]");
    if (t.value > width_mask(width))
      throw err(t, "width mismatch: value " + std::to_string(t.value) + " does not fit in " +
                       std::to_string(width) + " bits");
  }

  // -- expressions (precedence climbing)

  int binop_prec(const std::string& s) const {
    if (s == "*") return 10;
    if (s == "+" || s == "-") return 9;
    if (s == "<<" || s == ">>") return 8;
    if (s == "<" || s == "<=" || s == ">" || s == ">=") return 7;
    if (s == "==" || s == "!=") return 6;
    if (s == "&") return 5;
    if (s == "^") return 4;
    if (s == "|") return 3;
    if (s == "&&") return 2;
    if (s == "||") return 1;
    return -1;
  }

  BinOp binop_from(const std::string& s) const {
    if (s == "*") return BinOp::Mul;
    if (s == "+") return BinOp::Add;
    if (s == "-") return BinOp::Sub;
    if (s == "<<") return BinOp::Shl;
    if (s == ">>") return BinOp::Shr;
    if (s == "<") return BinOp::Lt;
    if (s == "<=") return BinOp::Le;
    if (s == ">") return BinOp::Gt;
    if (s == ">=") return BinOp::Ge;
    if (s == "==") return BinOp::Eq;
    if (s == "!=") return BinOp::Ne;
    if (s == "&") return BinOp::And;
    if (s == "^") return BinOp::Xor;
    if (s == "|") return BinOp::Or;
    if (s == "&&") return BinOp::LogAnd;
    return BinOp::LogOr;
  }

  Expr parse_expr(int min_prec = 0) {
    Expr lhs = parse_unary();
    for (;;) {
      const Token& t = peek();
      if (t.kind != Tok::Symbol) break;
      int prec = binop_prec(t.text);
      if (prec < min_prec || prec < 0) break;
      // '<=' inside a statement context is handled before expression parsing;
      // here it is always the comparison.
      std::string op = t.text;
      next();
      Expr rhs = parse_expr(prec + 1);
      Expr e;
      e.kind = Expr::Kind::Binary;
      e.bin = binop_from(op);
      switch (e.bin) {
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge:
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::LogAnd:
        case BinOp::LogOr:
          e.width = 1;
          break;
        case BinOp::Shl:
        case BinOp::Shr:
          e.width = lhs.width;
          break;
        default:
          e.width = std::max(lhs.width, rhs.width);
      }
      e.args.push_back(std::move(lhs));
      e.args.push_back(std::move(rhs));
      lhs = std::move(e);
    }
    return lhs;
  }

  Expr parse_unary() {
    const Token& t = peek();
    if (t.kind == Tok::Symbol && (t.text == "~" || t.text == "!")) {
      next();
      Expr inner = parse_unary();
      Expr e;
      e.kind = Expr::Kind::Unary;
      e.un = t.text == "~" ? UnOp::BitNot : UnOp::LogNot;
      e.width = t.text == "~" ? inner.width : 1;
      e.args.push_back(std::move(inner));
      return e;
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const Token& t = peek();
    if (t.kind == Tok::Symbol && t.text == "(") {
      next();
      Expr e = parse_expr();
      expect_symbol(")");
      return e;
    }
    if (t.kind == Tok::Number || t.kind == Tok::SizedNumber) {
      next();
      Expr e;
      e.kind = Expr::Kind::Const;
      e.value = t.value;
      if (t.kind == Tok::SizedNumber) {
        check_literal_fits(t, t.size);
        e.sized = true;
        e.base = t.base;
        e.width = t.size;
      } else {
        e.width = 64;
      }
      return e;
    }
    if (t.kind == Tok::Ident && !is_keyword(t.text)) {
      next();
      int idx = design_.signal_index(t.text);
      if (idx < 0) throw err(t, "undeclared signal " + t.text);
      Expr e;
      e.kind = Expr::Kind::Ref;
      e.signal = idx;
      e.name = t.text;
      e.width = design_.signals[idx].width;
      if (accept_symbol("[")) {
        Expr index = parse_expr();
        expect_symbol("]");
        Expr sel;
        sel.kind = Expr::Kind::BitSelect;
        sel.signal = idx;
        sel.name = t.text;
        sel.width = 1;
        sel.args.push_back(std::move(index));
        return sel;
      }
      return e;
    }
    throw err(t, "expected expression");
  }

  // -- statements

  int new_statement(StmtKind kind, int line) {
    Statement s;
    s.id = static_cast<int>(design_.statements.size());
    s.kind = kind;
    s.source_line = line;
    design_.statements.push_back(std::move(s));
    return design_.statements.back().id;
  }

  void parse_continuous_assign() {
    const Token& kw = next();  // assign
    std::string lhs = expect_ident("assignment target");
    int lhs_idx = design_.signal_index(lhs);
    if (lhs_idx < 0) throw err(kw, "undeclared signal " + lhs);
    expect_symbol("=");
    Expr rhs = parse_expr();
    expect_symbol(";");
    ContinuousAssign ca;
    ca.lhs = lhs_idx;
    ca.lhs_name = lhs;
    ca.rhs = std::move(rhs);
    ca.line = kw.line;
    ca.stmt_id = new_statement(StmtKind::ContinuousAssign, kw.line);
    design_.assigns.push_back(std::move(ca));
  }

  void parse_always() {
    const Token& kw = next();  // always
    expect_symbol("@");
    expect_symbol("(");
    expect_keyword("posedge");
    const Token& clk = peek();
    if (clk.kind != Tok::Ident || clk.text != "clk")
      throw err(clk, "unsupported construct: only 'always @(posedge clk)' blocks are supported");
    next();
    expect_symbol(")");
    ClockedBlock b;
    b.line = kw.line;
    b.body = parse_stmt_or_block();
    design_.blocks.push_back(std::move(b));
  }

  Block parse_stmt_or_block() {
    if (accept_keyword("begin")) {
      Block body;
      while (!peek_keyword("end")) {
        if (peek().kind == Tok::End) throw err(peek(), "unexpected end of input, expected 'end'");
        body.push_back(parse_stmt());
      }
      expect_keyword("end");
      return body;
    }
    Block body;
    body.push_back(parse_stmt());
    return body;
  }

  Stmt parse_stmt() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) throw err(t, "expected statement");
    if (t.text == "if") return parse_if();
    if (t.text == "case") return parse_case();
    if (is_keyword(t.text)) throw err(t, "unsupported construct '" + t.text + "'");
    return parse_proc_assign();
  }

  Stmt parse_proc_assign() {
    const Token& at = peek();
    std::string lhs = expect_ident("assignment target");
    int lhs_idx = design_.signal_index(lhs);
    if (lhs_idx < 0) throw err(at, "undeclared signal " + lhs);
    bool nonblocking;
    if (accept_symbol("<="))
      nonblocking = true;
    else if (accept_symbol("="))
      nonblocking = false;
    else
      throw err(peek(), "expected '=' or '<='");
    AssignStmt a;
    a.nonblocking = nonblocking;
    a.lhs = lhs_idx;
    a.lhs_name = lhs;
    a.rhs = parse_expr();
    expect_symbol(";");
    a.line = at.line;
    a.stmt_id = new_statement(nonblocking ? StmtKind::NonblockingAssign : StmtKind::BlockingAssign,
                              at.line);
    Stmt s;
    s.node = std::move(a);
    return s;
  }

  Stmt parse_if() {
    const Token& kw = next();  // if
    expect_symbol("(");
    IfStmt st;
    st.cond = parse_expr();
    expect_symbol(")");
    st.then_line = kw.line;
    st.then_id = new_statement(StmtKind::IfArm, kw.line);
    st.then_body = parse_stmt_or_block();
    if (peek_keyword("else")) {
      const Token& ekw = next();
      st.has_else = true;
      st.else_line = ekw.line;
      st.else_id = new_statement(StmtKind::IfArm, ekw.line);
      st.else_body = parse_stmt_or_block();
    }
    Stmt s;
    s.node = std::move(st);
    return s;
  }

  Stmt parse_case() {
    next();  // case
    expect_symbol("(");
    CaseStmt st;
    st.subject = parse_expr();
    expect_symbol(")");
    while (!peek_keyword("endcase")) {
      if (peek().kind == Tok::End) throw err(peek(), "unexpected end of input, expected 'endcase'");
      CaseArm arm;
      const Token& at = peek();
      arm.line = at.line;
      if (accept_keyword("default")) {
        arm.is_default = true;
      } else {
        for (;;) {
          const Token& lt = peek();
          if (lt.kind != Tok::Number && lt.kind != Tok::SizedNumber)
            throw err(lt, "expected constant case label");
          next();
          Expr label;
          label.kind = Expr::Kind::Const;
          label.value = lt.value;
          if (lt.kind == Tok::SizedNumber) {
            check_literal_fits(lt, lt.size);
            label.sized = true;
            label.base = lt.base;
            label.width = lt.size;
          } else {
            label.width = 64;
          }
          if (label.value > width_mask(st.subject.width))
            throw err(lt, "width mismatch: case label does not fit the subject width");
          arm.labels.push_back(std::move(label));
          if (!accept_symbol(",")) break;
        }
      }
      expect_symbol(":");
      arm.stmt_id = new_statement(StmtKind::CaseArm, arm.line);
      arm.body = parse_stmt_or_block();
      st.arms.push_back(std::move(arm));
    }
    expect_keyword("endcase");
    Stmt s;
    s.node = std::move(st);
    return s;
  }

  // -- elaboration checks

  void check_clocked_lhs(const Block& body) {
    for (const Stmt& s : body) {
      if (const auto* a = std::get_if<AssignStmt>(&s.node)) {
        SignalRole role = design_.signals[a->lhs].role;
        if (role != SignalRole::Register)
          throw ParseError(file_, a->line, 1,
                           "signal '" + a->lhs_name + "' assigned in a clocked block must be 'reg'");
      } else if (const auto* i = std::get_if<IfStmt>(&s.node)) {
        check_clocked_lhs(i->then_body);
        check_clocked_lhs(i->else_body);
      } else if (const auto* c = std::get_if<CaseStmt>(&s.node)) {
        for (const CaseArm& arm : c->arms) check_clocked_lhs(arm.body);
      }
    }
  }

  void elaborate() {
    for (size_t i = 0; i < design_.signals.size(); ++i) {
      const SignalDecl& d = design_.signals[i];
      switch (d.role) {
        case SignalRole::Input:
          design_.input_indices.push_back(static_cast<int>(i));
          break;
        case SignalRole::Output:
          break;
        case SignalRole::Register:
          design_.register_indices.push_back(static_cast<int>(i));
          break;
        case SignalRole::Wire:
          design_.wire_indices.push_back(static_cast<int>(i));
          break;
      }
      if (d.output_port || d.role == SignalRole::Output)
        design_.output_indices.push_back(static_cast<int>(i));
    }

    // Drive rules: one continuous driver per signal, targets must be wires
    // or non-reg outputs, clocked targets must be regs.
    std::vector<int> driver(design_.signals.size(), -1);
    for (size_t i = 0; i < design_.assigns.size(); ++i) {
      const ContinuousAssign& ca = design_.assigns[i];
      const SignalDecl& d = design_.signals[ca.lhs];
      if (d.role == SignalRole::Input)
        throw ParseError(file_, ca.line, 1, "input '" + ca.lhs_name + "' cannot be assigned");
      if (d.role == SignalRole::Register)
        throw ParseError(file_, ca.line, 1,
                         "reg '" + ca.lhs_name + "' cannot be the target of a continuous assign");
      if (driver[ca.lhs] >= 0)
        throw ParseError(file_, ca.line, 1, "multiple continuous drivers for '" + ca.lhs_name + "'");
      driver[ca.lhs] = static_cast<int>(i);
    }
    for (const ClockedBlock& b : design_.blocks) check_clocked_lhs(b.body);

    toposort_assigns(driver);
  }

  void collect_wire_deps(const Expr& e, std::vector<int>& out) {
    if (e.kind == Expr::Kind::Ref || e.kind == Expr::Kind::BitSelect) out.push_back(e.signal);
    for (const Expr& a : e.args) collect_wire_deps(a, out);
  }

  void toposort_assigns(const std::vector<int>& driver) {
    size_t n = design_.assigns.size();
    // edge u -> v: assign v reads the signal driven by assign u
    std::vector<std::vector<int>> succ(n);
    std::vector<int> indeg(n, 0);
    for (size_t v = 0; v < n; ++v) {
      std::vector<int> deps;
      collect_wire_deps(design_.assigns[v].rhs, deps);
      std::sort(deps.begin(), deps.end());
      deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
      for (int sig : deps) {
        int u = driver[sig];
        if (u >= 0) {
          succ[u].push_back(static_cast<int>(v));
          ++indeg[v];
        }
      }
    }
    std::vector<int> ready;
    for (size_t i = 0; i < n; ++i)
      if (indeg[i] == 0) ready.push_back(static_cast<int>(i));
    // smallest source index first keeps the order deterministic
    std::vector<int> order;
    while (!ready.empty()) {
      std::sort(ready.begin(), ready.end(), std::greater<int>());
      int u = ready.back();
      ready.pop_back();
      order.push_back(u);
      for (int v : succ[u])
        if (--indeg[v] == 0) ready.push_back(v);
    }
    if (order.size() != n) {
      for (size_t i = 0; i < n; ++i) {
        if (indeg[i] > 0)
          throw ParseError(file_, design_.assigns[i].line, 1,
                           "combinational loop detected through '" + design_.assigns[i].lhs_name + "'");
      }
    }
    design_.assign_topo = std::move(order);
  }

  std::vector<Token> toks_;
  std::string file_;
  size_t pos_ = 0;
  Design design_;
};

// ── Printer ──────────────────────────────────────────────────────────────

int op_prec(BinOp b) {
  switch (b) {
    case BinOp::Mul: return 10;
    case BinOp::Add:
    case BinOp::Sub: return 9;
    case BinOp::Shl:
    case BinOp::Shr: return 8;
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return 7;
    case BinOp::Eq:
    case BinOp::Ne: return 6;
    case BinOp::And: return 5;
    case BinOp::Xor: return 4;
    case BinOp::Or: return 3;
    case BinOp::LogAnd: return 2;
    case BinOp::LogOr: return 1;
  }
  return 0;
}

const char* op_text(BinOp b) {
  switch (b) {
    case BinOp::Mul: return "*";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Shl: return "<<";
    case BinOp::Shr: return ">>";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "&";
    case BinOp::Xor: return "^";
    case BinOp::Or: return "|";
    case BinOp::LogAnd: return "&&";
    case BinOp::LogOr: return "||";
  }
  return "?";
}

std::string print_value(uint64_t v, char base) {
  if (base == 'd') return std::to_string(v);
  std::string out;
  if (base == 'h') {
    static const char* digits = "0123456789abcdef";
    if (v == 0) out = "0";
    while (v != 0) {
      out.insert(out.begin(), digits[v & 0xf]);
      v >>= 4;
    }
    return out;
  }
  if (v == 0) out = "0";
  while (v != 0) {
    out.insert(out.begin(), static_cast<char>('0' + (v & 1)));
    v >>= 1;
  }
  return out;
}

void print_expr(std::ostringstream& os, const Expr& e, int parent_prec) {
  switch (e.kind) {
    case Expr::Kind::Const:
      if (e.sized) {
        os << e.width << "'" << e.base;
        // pad binary literals to the declared width, the common writing style
        if (e.base == 'b') {
          std::string bits = print_value(e.value, 'b');
          while (static_cast<int>(bits.size()) < e.width) bits.insert(bits.begin(), '0');
          os << bits;
        } else {
          os << print_value(e.value, e.base);
        }
      } else {
        os << e.value;
      }
      break;
    case Expr::Kind::Ref:
      os << e.name;
      break;
    case Expr::Kind::BitSelect:
      os << e.name << "[";
      print_expr(os, e.args[0], 0);
      os << "]";
      break;
    case Expr::Kind::Unary:
      os << (e.un == UnOp::BitNot ? "~" : "!");
      print_expr(os, e.args[0], 100);
      break;
    case Expr::Kind::Binary: {
      int prec = op_prec(e.bin);
      bool parens = prec < parent_prec;
      if (parens) os << "(";
      print_expr(os, e.args[0], prec);
      os << " " << op_text(e.bin) << " ";
      print_expr(os, e.args[1], prec + 1);
      if (parens) os << ")";
      break;
    }
  }
}

std::string expr_text(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e, 0);
  return os.str();
}

struct Printer {
  std::ostringstream os;
  int indent = 0;

  void line(const std::string& s) {
    for (int i = 0; i < indent; ++i) os << "  ";
    os << s << "\n";
  }

  void print_block(const Block& body) {
    for (const Stmt& s : body) print_stmt(s);
  }

  void print_stmt(const Stmt& s) {
    if (const auto* a = std::get_if<AssignStmt>(&s.node)) {
      line(a->lhs_name + (a->nonblocking ? " <= " : " = ") + expr_text(a->rhs) + ";");
    } else if (const auto* i = std::get_if<IfStmt>(&s.node)) {
      print_if(*i);
    } else if (const auto* c = std::get_if<CaseStmt>(&s.node)) {
      line("case (" + expr_text(c->subject) + ")");
      indent++;
      for (const CaseArm& arm : c->arms) {
        std::string head;
        if (arm.is_default) {
          head = "default:";
        } else {
          for (size_t k = 0; k < arm.labels.size(); ++k) {
            if (k) head += ", ";
            head += expr_text(arm.labels[k]);
          }
          head += ":";
        }
        const AssignStmt* sole = arm.body.size() == 1
                                     ? std::get_if<AssignStmt>(&arm.body[0].node)
                                     : nullptr;
        if (sole) {
          line(head + " " + sole->lhs_name + (sole->nonblocking ? " <= " : " = ") +
               expr_text(sole->rhs) + ";");
        } else {
          line(head + " begin");
          indent++;
          print_block(arm.body);
          indent--;
          line("end");
        }
      }
      indent--;
      line("endcase");
    }
  }

  void print_if(const IfStmt& i) {
    line("if (" + expr_text(i.cond) + ") begin");
    indent++;
    print_block(i.then_body);
    indent--;
    if (!i.has_else) {
      line("end");
      return;
    }
    // collapse `else begin if ... end` into `else if` chains
    if (i.else_body.size() == 1) {
      if (const auto* chained = std::get_if<IfStmt>(&i.else_body[0].node)) {
        for (int k = 0; k < indent; ++k) os << "  ";
        os << "end else ";
        print_if_inline(*chained);
        return;
      }
    }
    line("end else begin");
    indent++;
    print_block(i.else_body);
    indent--;
    line("end");
  }

  // prints an if whose "if (...)" header continues the current line
  void print_if_inline(const IfStmt& i) {
    os << "if (" << expr_text(i.cond) << ") begin\n";
    indent++;
    print_block(i.then_body);
    indent--;
    if (!i.has_else) {
      line("end");
      return;
    }
    if (i.else_body.size() == 1) {
      if (const auto* chained = std::get_if<IfStmt>(&i.else_body[0].node)) {
        for (int k = 0; k < indent; ++k) os << "  ";
        os << "end else ";
        print_if_inline(*chained);
        return;
      }
    }
    line("end else begin");
    indent++;
    print_block(i.else_body);
    indent--;
    line("end");
  }
};

std::string role_keyword(const SignalDecl& d) {
  switch (d.role) {
    case SignalRole::Input: return "input";
    case SignalRole::Output: return "output";
    case SignalRole::Register: return d.output_port ? "output reg" : "reg";
    case SignalRole::Wire: return "wire";
  }
  return "wire";
}

std::string decl_text(const SignalDecl& d) {
  std::string s = role_keyword(d);
  if (d.width > 1) s += " [" + std::to_string(d.width - 1) + ":0]";
  s += " " + d.name;
  if (d.role == SignalRole::Register && d.reset_value != 0)
    s += " = " + std::to_string(d.width) + "'d" + std::to_string(d.reset_value);
  return s;
}

}  // namespace

std::string pretty_print(const Design& design) {
  Printer p;
  std::string header = "module " + design.name + "(";
  bool first = true;
  for (const SignalDecl& d : design.signals) {
    bool is_port = d.role == SignalRole::Input || d.output_port;
    if (!is_port) continue;
    if (!first) header += ", ";
    first = false;
    header += decl_text(d);
  }
  header += ");";
  p.line(header);
  p.indent = 1;
  for (const SignalDecl& d : design.signals) {
    bool is_port = d.role == SignalRole::Input || d.output_port;
    if (is_port) continue;
    p.line(decl_text(d) + ";");
  }

  // interleave assigns and blocks in their original source order
  size_t ai = 0, bi = 0;
  while (ai < design.assigns.size() || bi < design.blocks.size()) {
    bool take_assign;
    if (ai >= design.assigns.size())
      take_assign = false;
    else if (bi >= design.blocks.size())
      take_assign = true;
    else
      take_assign = design.assigns[ai].line <= design.blocks[bi].line;
    if (take_assign) {
      const ContinuousAssign& ca = design.assigns[ai++];
      p.line("assign " + ca.lhs_name + " = " + expr_text(ca.rhs) + ";");
    } else {
      const ClockedBlock& b = design.blocks[bi++];
      p.line("always @(posedge clk) begin");
      p.indent++;
      p.print_block(b.body);
      p.indent--;
      p.line("end");
    }
  }
  p.indent = 0;
  p.line("endmodule");
  return p.os.str();
}

namespace {

// Fills Statement::text from the elaborated tree (canonical form).
struct TextFiller {
  Design& d;

  void fill_block(const Block& body) {
    for (const Stmt& s : body) fill_stmt(s);
  }

  void fill_stmt(const Stmt& s) {
    if (const auto* a = std::get_if<AssignStmt>(&s.node)) {
      d.statements[a->stmt_id].text =
          a->lhs_name + (a->nonblocking ? " <= " : " = ") + expr_text(a->rhs) + ";";
    } else if (const auto* i = std::get_if<IfStmt>(&s.node)) {
      d.statements[i->then_id].text = "if (" + expr_text(i->cond) + ")";
      fill_block(i->then_body);
      if (i->has_else) {
        d.statements[i->else_id].text = "else";
        fill_block(i->else_body);
      }
    } else if (const auto* c = std::get_if<CaseStmt>(&s.node)) {
      for (const CaseArm& arm : c->arms) {
        std::string head;
        if (arm.is_default) {
          head = "default:";
        } else {
          for (size_t k = 0; k < arm.labels.size(); ++k) {
            if (k) head += ", ";
            head += expr_text(arm.labels[k]);
          }
          head += ":";
        }
        d.statements[arm.stmt_id].text = head;
        fill_block(arm.body);
      }
    }
  }

  void run() {
    for (const ContinuousAssign& ca : d.assigns)
      d.statements[ca.stmt_id].text = "assign " + ca.lhs_name + " = " + expr_text(ca.rhs) + ";";
    for (const ClockedBlock& b : d.blocks) fill_block(b.body);
  }
};

}  // namespace

Design parse_design(const std::string& source, const std::string& filename) {
  Lexer lexer(source, filename);
  Parser parser(lexer.run(), filename);
  Design d = parser.parse();
  TextFiller{d}.run();
  return d;
}

Design load_design(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open design file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_design(buf.str(), path);
}

std::vector<std::pair<int, int>> enumerate_coverpoints(const Design& design) {
  std::vector<std::pair<int, int>> out;
  out.reserve(design.statements.size());
  for (const Statement& s : design.statements) out.emplace_back(s.id, s.source_line);
  return out;
}

}  // namespace witloc
