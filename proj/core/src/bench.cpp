#include "witloc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace witloc {

const char* edit_name(BugEdit edit) {
  switch (edit) {
    case BugEdit::SwapCaseArms: return "swap-case-arms";
    case BugEdit::WrongNextStateConstant: return "wrong-next-state-constant";
    case BugEdit::WrongAssignConstant: return "wrong-assign-constant";
    case BugEdit::NegateCondition: return "negate-condition";
    case BugEdit::OffByOneConstant: return "off-by-one-constant";
  }
  return "wrong-assign-constant";
}

BugEdit edit_from_name(const std::string& name) {
  if (name == "swap-case-arms") return BugEdit::SwapCaseArms;
  if (name == "wrong-next-state-constant") return BugEdit::WrongNextStateConstant;
  if (name == "wrong-assign-constant") return BugEdit::WrongAssignConstant;
  if (name == "negate-condition") return BugEdit::NegateCondition;
  if (name == "off-by-one-constant") return BugEdit::OffByOneConstant;
  throw std::runtime_error("unknown bug edit kind: " + name);
}

namespace {

// ── AST locators ─────────────────────────────────────────────────────────

AssignStmt* find_assign(Block& body, int stmt_id);
IfStmt* find_if(Block& body, int stmt_id);
CaseStmt* find_case_with_arm(Block& body, int stmt_id);

AssignStmt* find_assign(Block& body, int stmt_id) {
  for (Stmt& s : body) {
    if (auto* a = std::get_if<AssignStmt>(&s.node)) {
      if (a->stmt_id == stmt_id) return a;
    } else if (auto* i = std::get_if<IfStmt>(&s.node)) {
      if (AssignStmt* r = find_assign(i->then_body, stmt_id)) return r;
      if (AssignStmt* r = find_assign(i->else_body, stmt_id)) return r;
    } else if (auto* c = std::get_if<CaseStmt>(&s.node)) {
      for (CaseArm& arm : c->arms)
        if (AssignStmt* r = find_assign(arm.body, stmt_id)) return r;
    }
  }
  return nullptr;
}

IfStmt* find_if(Block& body, int stmt_id) {
  for (Stmt& s : body) {
    if (auto* i = std::get_if<IfStmt>(&s.node)) {
      if (i->then_id == stmt_id) return i;
      if (IfStmt* r = find_if(i->then_body, stmt_id)) return r;
      if (IfStmt* r = find_if(i->else_body, stmt_id)) return r;
    } else if (auto* c = std::get_if<CaseStmt>(&s.node)) {
      for (CaseArm& arm : c->arms)
        if (IfStmt* r = find_if(arm.body, stmt_id)) return r;
    }
  }
  return nullptr;
}

CaseStmt* find_case_with_arm(Block& body, int stmt_id) {
  for (Stmt& s : body) {
    if (auto* i = std::get_if<IfStmt>(&s.node)) {
      if (CaseStmt* r = find_case_with_arm(i->then_body, stmt_id)) return r;
      if (CaseStmt* r = find_case_with_arm(i->else_body, stmt_id)) return r;
    } else if (auto* c = std::get_if<CaseStmt>(&s.node)) {
      for (CaseArm& arm : c->arms) {
        if (arm.stmt_id == stmt_id) return c;
        if (CaseStmt* r = find_case_with_arm(arm.body, stmt_id)) return r;
      }
    }
  }
  return nullptr;
}

size_t count_block_statements(const Block& body) {
  size_t n = 0;
  for (const Stmt& s : body) {
    if (std::holds_alternative<AssignStmt>(s.node)) {
      n += 1;
    } else if (const auto* i = std::get_if<IfStmt>(&s.node)) {
      n += 1 + count_block_statements(i->then_body);
      if (i->has_else) n += 1 + count_block_statements(i->else_body);
    } else if (const auto* c = std::get_if<CaseStmt>(&s.node)) {
      for (const CaseArm& arm : c->arms) n += 1 + count_block_statements(arm.body);
    }
  }
  return n;
}

// constants of an expression in print order
void collect_constants(Expr& e, std::vector<Expr*>& out) {
  if (e.kind == Expr::Kind::Const) {
    out.push_back(&e);
    return;
  }
  for (Expr& a : e.args) collect_constants(a, out);
}

struct EditFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void apply_edit(Design& d, const BugSpec& spec) {
  auto for_each_block = [&](auto&& fn) {
    for (ClockedBlock& b : d.blocks)
      if (fn(b.body)) return true;
    return false;
  };

  switch (spec.edit) {
    case BugEdit::SwapCaseArms: {
      bool done = for_each_block([&](Block& body) {
        CaseStmt* c = find_case_with_arm(body, spec.target_statement);
        if (!c) return false;
        CaseArm* a = nullptr;
        CaseArm* b = nullptr;
        for (CaseArm& arm : c->arms) {
          if (arm.stmt_id == spec.target_statement) a = &arm;
          if (arm.stmt_id == spec.other_statement) b = &arm;
        }
        if (!a || !b)
          throw EditFailure("swap-case-arms: both arms must belong to the same case");
        if (count_block_statements(a->body) != count_block_statements(b->body))
          throw EditFailure("swap-case-arms: arm bodies must have the same statement count");
        std::swap(a->body, b->body);
        return true;
      });
      if (!done) throw EditFailure("swap-case-arms: target statement is not a case arm");
      break;
    }
    case BugEdit::WrongNextStateConstant:
    case BugEdit::WrongAssignConstant: {
      AssignStmt* target = nullptr;
      for (ClockedBlock& b : d.blocks) {
        target = find_assign(b.body, spec.target_statement);
        if (target) break;
      }
      if (!target) {
        // WrongAssignConstant also applies to continuous assigns
        if (spec.edit == BugEdit::WrongAssignConstant) {
          for (ContinuousAssign& ca : d.assigns) {
            if (ca.stmt_id == spec.target_statement) {
              if (ca.rhs.kind != Expr::Kind::Const)
                throw EditFailure("wrong-assign-constant: assign RHS is not a constant");
              if (ca.rhs.value == spec.new_value)
                throw EditFailure("wrong-assign-constant: new value equals the old one");
              ca.rhs.value = spec.new_value;
              return;
            }
          }
        }
        throw EditFailure(std::string(edit_name(spec.edit)) + ": target statement is not an assign");
      }
      if (spec.edit == BugEdit::WrongNextStateConstant && !target->nonblocking)
        throw EditFailure("wrong-next-state-constant: target must be a nonblocking assign");
      if (target->rhs.kind != Expr::Kind::Const)
        throw EditFailure(std::string(edit_name(spec.edit)) + ": assign RHS is not a constant");
      if (target->rhs.value == spec.new_value)
        throw EditFailure(std::string(edit_name(spec.edit)) + ": new value equals the old one");
      if (spec.new_value > width_mask(target->rhs.width))
        throw EditFailure(std::string(edit_name(spec.edit)) + ": new value does not fit the literal width");
      target->rhs.value = spec.new_value;
      break;
    }
    case BugEdit::NegateCondition: {
      IfStmt* target = nullptr;
      for (ClockedBlock& b : d.blocks) {
        target = find_if(b.body, spec.target_statement);
        if (target) break;
      }
      if (!target) throw EditFailure("negate-condition: target statement is not an if arm");
      Expr negated;
      negated.kind = Expr::Kind::Unary;
      negated.un = UnOp::LogNot;
      negated.width = 1;
      negated.args.push_back(std::move(target->cond));
      target->cond = std::move(negated);
      break;
    }
    case BugEdit::OffByOneConstant: {
      Expr* expr = nullptr;
      for (ClockedBlock& b : d.blocks) {
        if (AssignStmt* a = find_assign(b.body, spec.target_statement)) {
          expr = &a->rhs;
          break;
        }
        if (IfStmt* i = find_if(b.body, spec.target_statement)) {
          expr = &i->cond;
          break;
        }
      }
      if (!expr) {
        for (ContinuousAssign& ca : d.assigns)
          if (ca.stmt_id == spec.target_statement) expr = &ca.rhs;
      }
      if (!expr)
        throw EditFailure("off-by-one-constant: target statement has no editable expression");
      std::vector<Expr*> constants;
      collect_constants(*expr, constants);
      if (spec.constant_occurrence < 0 ||
          static_cast<size_t>(spec.constant_occurrence) >= constants.size())
        throw EditFailure("off-by-one-constant: constant occurrence out of range");
      Expr* c = constants[spec.constant_occurrence];
      uint64_t next = c->value + static_cast<uint64_t>(spec.delta);
      if (next > width_mask(c->width))
        throw EditFailure("off-by-one-constant: shifted value does not fit the literal width");
      c->value = next;
      break;
    }
  }
}

}  // namespace

int find_statement(const Design& design, const std::string& text) {
  int found = -1;
  for (const Statement& s : design.statements) {
    if (s.text != text) continue;
    if (found >= 0)
      throw std::runtime_error("statement text is ambiguous in " + design.name + ": '" + text + "'");
    found = s.id;
  }
  if (found < 0)
    throw std::runtime_error("no statement with text '" + text + "' in " + design.name);
  return found;
}

int find_statement(const Design& design, const std::string& text, int occurrence) {
  int seen = 0;
  for (const Statement& s : design.statements) {
    if (s.text != text) continue;
    if (seen == occurrence) return s.id;
    ++seen;
  }
  throw std::runtime_error("no occurrence " + std::to_string(occurrence) + " of '" + text +
                           "' in " + design.name);
}

Design inject_bug(const Design& golden, BugSpec& spec) {
  if (spec.target_statement < 0 || spec.target_statement >= golden.statement_count())
    throw std::runtime_error("bug target statement id out of range");
  Design edited = golden;  // deep copy, value semantics throughout
  try {
    apply_edit(edited, spec);
  } catch (const EditFailure& e) {
    throw std::runtime_error("bug '" + spec.name + "' on " + golden.name + ": " + e.what());
  }

  Design buggy;
  try {
    buggy = parse_design(pretty_print(edited), golden.file);
  } catch (const ParseError& e) {
    throw std::runtime_error("bug '" + spec.name + "': edited design fails elaboration: " + e.what());
  }
  if (buggy.statement_count() != golden.statement_count())
    throw std::runtime_error("bug '" + spec.name + "': edit changed the statement count");

  spec.ground_truth.clear();
  for (int i = 0; i < golden.statement_count(); ++i) {
    if (golden.statements[i].text != buggy.statements[i].text ||
        golden.statements[i].kind != buggy.statements[i].kind)
      spec.ground_truth.push_back(i);
  }
  if (spec.ground_truth.empty())
    throw std::runtime_error("bug '" + spec.name + "': edit left the design unchanged");
  return buggy;
}

LocalizeOutcome run_localization(const Design& golden, const Design& buggy, const TestCase& c_b,
                                 SearchConfig cfg, const InputConstraints* constraints,
                                 const IterationHook& hook) {
  LocalizeOutcome out;
  check_same_interface(golden, buggy);
  ExecutionTrace failing_trace = simulate(buggy, c_b);
  out.verdict = classify_against(golden, c_b, failing_trace);
  if (out.verdict.status == VerdictStatus::Pass) return out;

  out.witnesses = generate_witnesses(golden, buggy, c_b, cfg, constraints, hook);
  std::vector<const ExecutionTrace*> traces;
  traces.reserve(out.witnesses.witnesses.size());
  for (const Witness& w : out.witnesses.witnesses) traces.push_back(&w.trace);
  SuspiciousnessScores scores = suspiciousness(failing_trace, traces);
  out.report = rank(scores, buggy);
  out.weights = cfg.weights;
  return out;
}

EvalResult evaluate(const std::vector<SuiteEntry>& suite, const SearchConfig& cfg,
                    const std::vector<uint64_t>& seeds, const IterationHook& hook) {
  if (seeds.empty()) throw std::runtime_error("at least one rng seed required");
  EvalResult result;
  result.mode = cfg.mode;
  const std::vector<int> ns = {1, 5, 10, 20};

  for (uint64_t seed : seeds) {
    SeedResult sr;
    sr.seed = seed;
    for (int n : ns) sr.top_n[n] = 0;
    double rank_sum = 0.0;
    int triggered = 0;

    for (const SuiteEntry& entry : suite) {
      for (const SuiteBug& bug : entry.bugs) {
        BugOutcome outcome;
        outcome.design = entry.design_name;
        outcome.bug = bug.spec.name;
        outcome.seed = seed;

        BugSpec spec = bug.spec;
        Design buggy = inject_bug(entry.golden, spec);

        SearchConfig run_cfg = cfg;
        run_cfg.rng_seed = seed;
        run_cfg.weights = resolve_weights(buggy, cfg.mode);

        LocalizeOutcome loc = run_localization(entry.golden, buggy, bug.failing_case, run_cfg,
                                               nullptr, hook);
        if (loc.verdict.status == VerdictStatus::Pass) {
          outcome.triggered = false;
          sr.bugs.push_back(std::move(outcome));
          continue;
        }
        outcome.triggered = true;
        outcome.degraded = loc.witnesses.degraded;
        outcome.witness_count = static_cast<uint32_t>(loc.witnesses.witnesses.size());
        outcome.rank = best_rank(loc.report, spec.ground_truth);
        outcome.tied_top1 = reaches_top(loc.report, spec.ground_truth);

        rank_sum += outcome.rank;
        ++triggered;
        for (int n : ns)
          if (outcome.rank <= n) ++sr.top_n[n];
        if (outcome.tied_top1) ++sr.tied_top1;
        sr.bugs.push_back(std::move(outcome));
      }
    }
    sr.mar = triggered > 0 ? rank_sum / triggered : 0.0;
    result.per_seed.push_back(std::move(sr));
  }

  double mar_sum = 0.0;
  for (const SeedResult& sr : result.per_seed) mar_sum += sr.mar;
  result.mean_mar = mar_sum / result.per_seed.size();
  double var = 0.0;
  for (const SeedResult& sr : result.per_seed) {
    double d = sr.mar - result.mean_mar;
    var += d * d;
  }
  result.stddev_mar = std::sqrt(var / result.per_seed.size());
  for (int n : ns) {
    double sum = 0.0;
    for (const SeedResult& sr : result.per_seed) sum += sr.top_n.at(n);
    result.mean_top_n[n] = sum / result.per_seed.size();
  }
  double tied_sum = 0.0;
  for (const SeedResult& sr : result.per_seed) tied_sum += sr.tied_top1;
  result.mean_tied_top1 = tied_sum / result.per_seed.size();
  return result;
}

std::string eval_results_to_json(const std::vector<EvalResult>& results) {
  nlohmann::ordered_json out;
  for (const EvalResult& r : results) {
    nlohmann::ordered_json mode;
    nlohmann::ordered_json per_seed = nlohmann::ordered_json::array();
    for (const SeedResult& sr : r.per_seed) {
      nlohmann::ordered_json s;
      s["seed"] = sr.seed;
      s["mar"] = sr.mar;
      nlohmann::ordered_json topn;
      for (const auto& [n, count] : sr.top_n) topn[std::to_string(n)] = count;
      s["top_n"] = std::move(topn);
      s["tied_top_1"] = sr.tied_top1;
      nlohmann::ordered_json ranks;
      nlohmann::ordered_json untriggered = nlohmann::ordered_json::array();
      for (const BugOutcome& b : sr.bugs) {
        std::string key = b.design + "/" + b.bug;
        if (b.triggered)
          ranks[key] = b.rank;
        else
          untriggered.push_back(key);
      }
      s["per_bug_rank"] = std::move(ranks);
      s["untriggered"] = std::move(untriggered);
      per_seed.push_back(std::move(s));
    }
    mode["per_seed"] = std::move(per_seed);
    nlohmann::ordered_json mean;
    mean["mar"] = r.mean_mar;
    nlohmann::ordered_json topn;
    for (const auto& [n, count] : r.mean_top_n) topn[std::to_string(n)] = count;
    mean["top_n"] = std::move(topn);
    mean["tied_top_1"] = r.mean_tied_top1;
    mode["mean"] = std::move(mean);
    mode["stddev"] = {{"mar", r.stddev_mar}};
    out[mode_name(r.mode)] = std::move(mode);
  }
  return out.dump(2) + "\n";
}

std::string eval_results_markdown(const std::vector<EvalResult>& results) {
  std::ostringstream os;
  os << "| Mode | Top-1 | Top-5 | Top-10 | Top-20 | Tied-Top-1 | MAR |\n";
  os << "|------|-------|-------|--------|--------|------------|-----|\n";
  os.setf(std::ios::fixed);
  os.precision(2);
  for (const EvalResult& r : results) {
    os << "| " << mode_name(r.mode) << " | " << r.mean_top_n.at(1) << " | " << r.mean_top_n.at(5)
       << " | " << r.mean_top_n.at(10) << " | " << r.mean_top_n.at(20) << " | "
       << r.mean_tied_top1 << " | " << r.mean_mar << " |\n";
  }
  return os.str();
}

// ── Suite manifest loading ───────────────────────────────────────────────

std::vector<SuiteEntry> load_suite(const std::string& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open suite manifest: " + manifest_path);
  nlohmann::json doc = nlohmann::json::parse(in);
  if (!doc.is_object() || !doc.contains("designs") || !doc["designs"].is_array())
    throw std::runtime_error("suite manifest must be {\"designs\": [...]}");

  std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
  std::vector<SuiteEntry> suite;
  for (const auto& dj : doc["designs"]) {
    SuiteEntry entry;
    entry.design_name = dj.at("name").get<std::string>();
    entry.golden = load_design((base / dj.at("golden").get<std::string>()).string());
    for (const auto& bj : dj.at("bugs")) {
      SuiteBug bug;
      bug.spec.name = bj.at("name").get<std::string>();
      bug.spec.edit = edit_from_name(bj.at("edit").get<std::string>());
      if (bj.contains("target_statement"))
        bug.spec.target_statement = bj.at("target_statement").get<int>();
      else
        bug.spec.target_statement =
            find_statement(entry.golden, bj.at("target_text").get<std::string>(),
                           bj.value("target_occurrence", 0));
      if (bj.contains("other_statement"))
        bug.spec.other_statement = bj.at("other_statement").get<int>();
      else if (bj.contains("other_text"))
        bug.spec.other_statement = find_statement(
            entry.golden, bj.at("other_text").get<std::string>(), bj.value("other_occurrence", 0));
      if (bj.contains("new_value")) bug.spec.new_value = bj.at("new_value").get<uint64_t>();
      if (bj.contains("constant_occurrence"))
        bug.spec.constant_occurrence = bj.at("constant_occurrence").get<int>();
      if (bj.contains("delta")) bug.spec.delta = bj.at("delta").get<int64_t>();
      bug.failing_case = load_testcase((base / bj.at("testcase").get<std::string>()).string());
      entry.bugs.push_back(std::move(bug));
    }
    suite.push_back(std::move(entry));
  }
  return suite;
}

}  // namespace witloc
