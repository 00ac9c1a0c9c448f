#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace witloc {

/// Error with a source position, formatted as "file:line:col: message".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, int line, int column, const std::string& message);

  std::string file;
  int line = 0;
  int column = 0;
  std::string message;
};

enum class SignalRole { Input, Output, Register, Wire };

struct SignalDecl {
  std::string name;
  int width = 1;  // bits, in [1, 64]
  SignalRole role = SignalRole::Wire;
  uint64_t reset_value = 0;  // registers only
  bool output_port = false;  // declared as an output (covers `output reg`)
};

enum class StmtKind {
  ContinuousAssign,
  BlockingAssign,
  NonblockingAssign,
  IfArm,
  CaseArm,
};

/// One coverpoint: an assignment or an if/case arm entry. Ids are dense
/// in [0, z) and assigned in source order.
struct Statement {
  int id = -1;
  StmtKind kind = StmtKind::ContinuousAssign;
  int source_line = 0;
  std::string text;
};

enum class UnOp { BitNot, LogNot };
enum class BinOp {
  Mul, Add, Sub, Shl, Shr,
  Lt, Le, Gt, Ge, Eq, Ne,
  And, Xor, Or, LogAnd, LogOr,
};

struct Expr {
  enum class Kind { Const, Ref, BitSelect, Unary, Binary };

  Kind kind = Kind::Const;
  int width = 1;  // static width of the result

  // Const
  uint64_t value = 0;
  bool sized = false;  // written as a sized literal, e.g. 4'b0000
  char base = 'd';     // literal base for printing: 'd', 'h', 'b'

  // Ref / BitSelect
  int signal = -1;
  std::string name;

  UnOp un = UnOp::BitNot;
  BinOp bin = BinOp::Add;
  std::vector<Expr> args;  // Unary: 1; Binary: 2; BitSelect: index expr
};

struct Stmt;
using Block = std::vector<Stmt>;

struct AssignStmt {
  bool nonblocking = false;
  int lhs = -1;
  std::string lhs_name;
  Expr rhs;
  int stmt_id = -1;
  int line = 0;
};

struct IfStmt {
  Expr cond;
  int then_id = -1;
  int then_line = 0;
  Block then_body;
  bool has_else = false;
  int else_id = -1;
  int else_line = 0;
  Block else_body;
};

struct CaseArm {
  bool is_default = false;
  std::vector<Expr> labels;  // constant labels
  int stmt_id = -1;
  int line = 0;
  Block body;
};

struct CaseStmt {
  Expr subject;
  std::vector<CaseArm> arms;
};

struct Stmt {
  std::variant<AssignStmt, IfStmt, CaseStmt> node;
};

struct ContinuousAssign {
  int lhs = -1;
  std::string lhs_name;
  Expr rhs;
  int stmt_id = -1;
  int line = 0;
};

struct ClockedBlock {
  Block body;
  int line = 0;
};

/// Elaborated synchronous design. Immutable after parsing; safe to share
/// across threads.
struct Design {
  std::string name;
  std::string file;

  std::vector<SignalDecl> signals;  // declaration order
  std::vector<int> input_indices;
  std::vector<int> output_indices;  // port outputs, wire or reg storage
  std::vector<int> register_indices;
  std::vector<int> wire_indices;  // internal wires

  std::vector<ContinuousAssign> assigns;  // source order
  std::vector<int> assign_topo;           // settle order, indices into assigns
  std::vector<ClockedBlock> blocks;

  std::vector<Statement> statements;  // dense ids 0..z-1

  int signal_index(std::string_view name) const;
  int statement_count() const { return static_cast<int>(statements.size()); }
  int register_count() const { return static_cast<int>(register_indices.size()); }
};

/// Parses design source text and elaborates it. Throws ParseError with a
/// position on syntax errors, undeclared signals, width mismatches,
/// combinational loops and unsupported constructs.
Design parse_design(const std::string& source, const std::string& filename = "<input>");

Design load_design(const std::string& path);

/// Canonical source form. parse(pretty_print(d)) preserves statement ids,
/// kinds and (for canonically formatted input) source lines.
std::string pretty_print(const Design& design);

/// All coverpoints as (statement id, source line), in id order.
std::vector<std::pair<int, int>> enumerate_coverpoints(const Design& design);

uint64_t width_mask(int width);

}  // namespace witloc
