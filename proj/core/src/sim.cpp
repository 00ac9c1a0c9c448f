#include "witloc/sim.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace witloc {

namespace {

uint64_t eval(const Expr& e, const std::vector<uint64_t>& values) {
  switch (e.kind) {
    case Expr::Kind::Const:
      return e.value;
    case Expr::Kind::Ref:
      return values[e.signal];
    case Expr::Kind::BitSelect: {
      uint64_t idx = eval(e.args[0], values);
      if (idx >= 64) return 0;
      return (values[e.signal] >> idx) & 1;
    }
    case Expr::Kind::Unary: {
      uint64_t v = eval(e.args[0], values);
      if (e.un == UnOp::BitNot) return ~v & width_mask(e.width);
      return v == 0 ? 1 : 0;
    }
    case Expr::Kind::Binary: {
      uint64_t a = eval(e.args[0], values);
      uint64_t b = eval(e.args[1], values);
      switch (e.bin) {
        case BinOp::Mul: return (a * b) & width_mask(e.width);
        case BinOp::Add: return (a + b) & width_mask(e.width);
        case BinOp::Sub: return (a - b) & width_mask(e.width);
        case BinOp::Shl: return b >= 64 ? 0 : (a << b) & width_mask(e.width);
        case BinOp::Shr: return b >= 64 ? 0 : a >> b;
        case BinOp::Lt: return a < b;
        case BinOp::Le: return a <= b;
        case BinOp::Gt: return a > b;
        case BinOp::Ge: return a >= b;
        case BinOp::Eq: return a == b;
        case BinOp::Ne: return a != b;
        case BinOp::And: return a & b;
        case BinOp::Xor: return a ^ b;
        case BinOp::Or: return a | b;
        case BinOp::LogAnd: return (a != 0 && b != 0) ? 1 : 0;
        case BinOp::LogOr: return (a != 0 || b != 0) ? 1 : 0;
      }
      return 0;
    }
  }
  return 0;
}

struct Engine {
  const Design& d;
  std::vector<uint64_t> values;
  std::vector<uint64_t> hits;
  std::vector<std::pair<int, uint64_t>> pending;  // nonblocking commits, in write order

  explicit Engine(const Design& design) : d(design) {
    values.assign(d.signals.size(), 0);
    hits.assign(d.statements.size(), 0);
    for (int r : d.register_indices) values[r] = d.signals[r].reset_value;
  }

  void settle(bool count) {
    for (int idx : d.assign_topo) {
      const ContinuousAssign& ca = d.assigns[idx];
      values[ca.lhs] = eval(ca.rhs, values) & width_mask(d.signals[ca.lhs].width);
      if (count) ++hits[ca.stmt_id];
    }
  }

  void exec_block(const Block& body) {
    for (const Stmt& s : body) exec_stmt(s);
  }

  void exec_stmt(const Stmt& s) {
    if (const auto* a = std::get_if<AssignStmt>(&s.node)) {
      uint64_t v = eval(a->rhs, values) & width_mask(d.signals[a->lhs].width);
      ++hits[a->stmt_id];
      if (a->nonblocking)
        pending.emplace_back(a->lhs, v);
      else
        values[a->lhs] = v;
    } else if (const auto* i = std::get_if<IfStmt>(&s.node)) {
      if (eval(i->cond, values) != 0) {
        ++hits[i->then_id];
        exec_block(i->then_body);
      } else if (i->has_else) {
        ++hits[i->else_id];
        exec_block(i->else_body);
      }
    } else if (const auto* c = std::get_if<CaseStmt>(&s.node)) {
      uint64_t subject = eval(c->subject, values);
      const CaseArm* chosen = nullptr;
      for (const CaseArm& arm : c->arms) {
        if (arm.is_default) continue;
        for (const Expr& label : arm.labels) {
          if (label.value == subject) {
            chosen = &arm;
            break;
          }
        }
        if (chosen) break;
      }
      if (!chosen) {
        for (const CaseArm& arm : c->arms)
          if (arm.is_default) {
            chosen = &arm;
            break;
          }
      }
      if (chosen) {
        ++hits[chosen->stmt_id];
        exec_block(chosen->body);
      }
    }
  }
};

uint64_t parse_csv_value(const std::string& tok, int line) {
  try {
    size_t used = 0;
    uint64_t v;
    if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X'))
      v = std::stoull(tok.substr(2), &used, 16), used += 2;
    else if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'b' || tok[1] == 'B'))
      v = std::stoull(tok.substr(2), &used, 2), used += 2;
    else
      v = std::stoull(tok, &used, 10);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("test case line " + std::to_string(line) + ": bad value '" + tok + "'");
  }
}

std::vector<std::string> split_csv_row(const std::string& row) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : row) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

ExecutionTrace simulate(const Design& design, const TestCase& test) {
  const auto& inputs = design.input_indices;
  if (static_cast<size_t>(test.signal_count()) != inputs.size())
    throw std::runtime_error("signal list mismatch: test case has " +
                             std::to_string(test.signal_count()) + " signals, design expects " +
                             std::to_string(inputs.size()));
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (test.signals[i] != design.signals[inputs[i]].name)
      throw std::runtime_error("signal list mismatch: expected '" + design.signals[inputs[i]].name +
                               "' at column " + std::to_string(i) + ", got '" + test.signals[i] + "'");
  }
  if (test.cycle_count() < 1) throw std::runtime_error("test case must have at least one cycle");

  Engine eng(design);
  ExecutionTrace trace;
  trace.transitions.reserve(design.register_indices.size());
  for (int r : design.register_indices) {
    RegisterTransitions rt;
    rt.register_name = design.signals[r].name;
    rt.points.emplace_back(0, design.signals[r].reset_value);
    trace.transitions.push_back(std::move(rt));
  }

  for (int cycle = 0; cycle < test.cycle_count(); ++cycle) {
    const auto& row = test.cycles[cycle];
    if (row.size() != inputs.size())
      throw std::runtime_error("test case row " + std::to_string(cycle) + " has " +
                               std::to_string(row.size()) + " values, expected " +
                               std::to_string(inputs.size()));
    for (size_t i = 0; i < inputs.size(); ++i) {
      const SignalDecl& sig = design.signals[inputs[i]];
      if (row[i] > width_mask(sig.width))
        throw std::runtime_error("value " + std::to_string(row[i]) + " exceeds width of signal '" +
                                 sig.name + "'");
      eng.values[inputs[i]] = row[i];
    }

    eng.settle(/*count=*/true);
    eng.pending.clear();
    for (const ClockedBlock& b : design.blocks) eng.exec_block(b.body);
    for (const auto& [sig, value] : eng.pending) eng.values[sig] = value;
    eng.settle(/*count=*/false);

    std::vector<uint64_t> out_row;
    out_row.reserve(design.output_indices.size());
    for (int o : design.output_indices) out_row.push_back(eng.values[o]);
    trace.outputs.push_back(std::move(out_row));

    for (size_t r = 0; r < design.register_indices.size(); ++r) {
      uint64_t cur = eng.values[design.register_indices[r]];
      auto& points = trace.transitions[r].points;
      if (points.back().second != cur)
        points.emplace_back(static_cast<uint32_t>(cycle + 1), cur);
    }
  }

  trace.coverage = std::move(eng.hits);
  return trace;
}

TestCase testcase_from_csv(const std::string& csv, const std::string& id) {
  TestCase t;
  t.id = id;
  std::istringstream in(csv);
  std::string row;
  int line = 0;
  while (std::getline(in, row)) {
    ++line;
    if (row.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<std::string> cells = split_csv_row(row);
    if (t.signals.empty()) {
      t.signals = std::move(cells);
      continue;
    }
    if (cells.size() != t.signals.size())
      throw std::runtime_error("test case line " + std::to_string(line) + ": expected " +
                               std::to_string(t.signals.size()) + " values, got " +
                               std::to_string(cells.size()));
    std::vector<uint64_t> values;
    values.reserve(cells.size());
    for (const std::string& c : cells) values.push_back(parse_csv_value(c, line));
    t.cycles.push_back(std::move(values));
  }
  if (t.signals.empty()) throw std::runtime_error("test case is missing its header row");
  if (t.cycles.empty()) throw std::runtime_error("test case has no cycles");
  return t;
}

TestCase load_testcase(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open test case file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string id = path;
  size_t slash = id.find_last_of("/\\");
  if (slash != std::string::npos) id = id.substr(slash + 1);
  size_t dot = id.find_last_of('.');
  if (dot != std::string::npos) id = id.substr(0, dot);
  return testcase_from_csv(buf.str(), id);
}

std::string testcase_to_csv(const TestCase& test) {
  std::ostringstream os;
  for (size_t i = 0; i < test.signals.size(); ++i) {
    if (i) os << ",";
    os << test.signals[i];
  }
  os << "\n";
  for (const auto& row : test.cycles) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      os << row[i];
    }
    os << "\n";
  }
  return os.str();
}

std::string trace_to_json(const ExecutionTrace& trace) {
  nlohmann::ordered_json j;
  j["coverage"] = trace.coverage;
  nlohmann::ordered_json regs = nlohmann::ordered_json::array();
  for (const RegisterTransitions& rt : trace.transitions) {
    nlohmann::ordered_json r;
    r["register"] = rt.register_name;
    nlohmann::ordered_json pts = nlohmann::ordered_json::array();
    for (const auto& [cycle, value] : rt.points) pts.push_back({cycle, value});
    r["points"] = std::move(pts);
    regs.push_back(std::move(r));
  }
  j["transitions"] = std::move(regs);
  j["outputs"] = trace.outputs;
  return j.dump(2) + "\n";
}

}  // namespace witloc
