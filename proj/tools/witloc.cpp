#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "witloc/bench.hpp"
#include "witloc/version.hpp"

using json = nlohmann::ordered_json;
using namespace witloc;

namespace {

// exit codes: 0 ok, 1 file/parse/config error, 2 trigger case passes,
// 3 degraded (no witness found)
constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotTriggered = 2;
constexpr int kExitDegraded = 3;

struct CommonOptions {
  uint32_t iters = 100;
  uint32_t top_witnesses = 10;
  std::string alpha = "auto";
  std::string beta = "auto";
  double gamma = 0.1;
  double delta = 1.0;
  double mutation_prob = 0.5;
  uint32_t positions = 3;
  uint32_t max_restarts = 2;
  uint64_t rng_seed = 1;
  std::string mode = "full";
};

void add_search_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--iters", opt.iters, "Search iterations per round")->capture_default_str();
  cmd->add_option("--top-witnesses", opt.top_witnesses, "Witnesses kept for ranking")
      ->capture_default_str();
  cmd->add_option("--alpha", opt.alpha, "Coverage distance weight, or 'auto' for 1/z")
      ->capture_default_str();
  cmd->add_option("--beta", opt.beta, "State distance weight, or 'auto' for 1/k")
      ->capture_default_str();
  cmd->add_option("--gamma", opt.gamma, "Priority update coefficient")->capture_default_str();
  cmd->add_option("--delta", opt.delta, "Initial position priority")->capture_default_str();
  cmd->add_option("--mutation-prob", opt.mutation_prob, "Per-signal mutation probability")
      ->capture_default_str();
  cmd->add_option("--positions", opt.positions, "Cycle positions mutated per candidate")
      ->capture_default_str();
  cmd->add_option("--max-restarts", opt.max_restarts, "Restart budget when no witness is found")
      ->capture_default_str();
  cmd->add_option("--rng-seed", opt.rng_seed, "Random stream seed")->capture_default_str();
  cmd->add_option("--mode", opt.mode, "full|rand|no-cov|no-state|no-div")
      ->check(CLI::IsMember({"full", "rand", "no-cov", "no-state", "no-div"}))
      ->capture_default_str();
}

std::optional<double> parse_weight(const std::string& text, const char* flag) {
  if (text == "auto") return std::nullopt;
  try {
    size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size() || v < 0.0) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string(flag) + " must be 'auto' or a non-negative number");
  }
}

SearchConfig build_config(const CommonOptions& opt, const Design& buggy) {
  SearchConfig cfg;
  cfg.max_iterations = opt.iters;
  cfg.top_n = opt.top_witnesses;
  cfg.mutation_prob = opt.mutation_prob;
  cfg.gamma = opt.gamma;
  cfg.delta = opt.delta;
  cfg.positions_per_mutation = opt.positions;
  cfg.max_restarts = opt.max_restarts;
  cfg.rng_seed = opt.rng_seed;
  cfg.mode = *mode_from_name(opt.mode);
  cfg.weights = resolve_weights(buggy, cfg.mode, parse_weight(opt.alpha, "--alpha"),
                                parse_weight(opt.beta, "--beta"));
  return cfg;
}

json config_json(const SearchConfig& cfg) {
  json j;
  j["iterations"] = cfg.max_iterations;
  j["top_witnesses"] = cfg.top_n;
  j["mutation_prob"] = cfg.mutation_prob;
  j["gamma"] = cfg.gamma;
  j["delta"] = cfg.delta;
  j["positions_per_mutation"] = cfg.positions_per_mutation;
  j["max_restarts"] = cfg.max_restarts;
  j["rng_seed"] = cfg.rng_seed;
  j["mode"] = mode_name(cfg.mode);
  j["alpha"] = cfg.weights.alpha;
  j["beta"] = cfg.weights.beta;
  return j;
}

json manifest_json(const std::string& command, const json& inputs, const std::string& out_path,
                   const json& config) {
  json m;
  m["command"] = command;
  m["tool"] = kToolName;
  m["tool_version"] = kVersion;
  m["inputs"] = inputs;
  m["output"] = out_path;
  m["config"] = config;
  return m;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write: " + path);
  out << content;
}

json verdict_json(const Verdict& v) {
  json j;
  j["status"] = v.status == VerdictStatus::Pass ? "Pass" : "Fail";
  if (v.first_divergence_cycle.has_value())
    j["first_divergence_cycle"] = *v.first_divergence_cycle;
  else
    j["first_divergence_cycle"] = nullptr;
  j["output_rows_compared"] = v.output_rows_compared;
  return j;
}

json report_json(const SuspiciousnessReport& report) {
  json r;
  r["touched_count"] = report.touched_count;
  if (!report.config_echo.empty()) r["config_echo"] = json::parse(report.config_echo);
  json entries = json::array();
  for (const ReportEntry& e : report.entries) {
    json je;
    je["statement_id"] = e.statement_id;
    je["source_line"] = e.source_line;
    je["e_p"] = e.e_p;
    je["score"] = e.score;
    je["rank"] = e.rank;
    entries.push_back(std::move(je));
  }
  r["entries"] = std::move(entries);
  return r;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

// ── localize ─────────────────────────────────────────────────────────────

int cmd_localize(const std::string& design_path, const std::string& golden_path,
                 const std::string& testcase_path, const std::string& constraints_path,
                 const CommonOptions& opt, const std::string& out_path,
                 const std::string& format) {
  Timer timer;
  Design buggy = load_design(design_path);
  Design golden = load_design(golden_path);
  TestCase c_b = load_testcase(testcase_path);
  InputConstraints constraints;
  bool has_constraints = !constraints_path.empty();
  if (has_constraints) constraints = load_constraints(constraints_path);

  SearchConfig cfg = build_config(opt, buggy);
  LocalizeOutcome outcome = run_localization(golden, buggy, c_b, cfg,
                                             has_constraints ? &constraints : nullptr);

  if (outcome.verdict.status == VerdictStatus::Pass) {
    std::cerr << "test case does not trigger the bug\n";
    return kExitNotTriggered;
  }

  json inputs;
  inputs["design"] = design_path;
  inputs["golden"] = golden_path;
  inputs["testcase"] = testcase_path;
  inputs["constraints"] = has_constraints ? json(constraints_path) : json(nullptr);
  json cfg_json = config_json(cfg);
  outcome.report.config_echo = cfg_json.dump();

  json doc;
  doc["manifest"] = manifest_json("localize", inputs, out_path, cfg_json);
  doc["verdict"] = verdict_json(outcome.verdict);
  json search;
  search["witness_count"] = outcome.witnesses.witnesses.size();
  search["degraded"] = outcome.witnesses.degraded;
  search["restarts"] = outcome.witnesses.restarts_used;
  search["candidates_generated"] = outcome.witnesses.candidates_generated;
  json wl = json::array();
  for (const Witness& w : outcome.witnesses.witnesses)
    wl.push_back({{"case_id", w.test.id}, {"fitness", w.fitness}});
  search["witnesses"] = std::move(wl);
  doc["search"] = std::move(search);
  doc["report"] = report_json(outcome.report);

  std::string bytes = doc.dump(2) + "\n";
  if (!out_path.empty()) write_file(out_path, bytes);
  if (format == "json")
    std::cout << bytes;
  else
    std::cout << report_table(outcome.report);
  std::cerr << "localize finished in " << timer.ms() << " ms\n";
  return outcome.witnesses.degraded ? kExitDegraded : kExitOk;
}

// ── simulate ─────────────────────────────────────────────────────────────

int cmd_simulate(const std::string& design_path, const std::string& testcase_path,
                 const std::string& out_path, const std::string& format) {
  Design design = load_design(design_path);
  TestCase test = load_testcase(testcase_path);
  ExecutionTrace trace = simulate(design, test);
  std::string bytes = trace_to_json(trace);
  if (!out_path.empty()) write_file(out_path, bytes);
  if (format == "json") {
    std::cout << bytes;
  } else {
    std::cout << "statements: " << design.statement_count()
              << ", registers: " << design.register_count() << ", cycles: " << test.cycle_count()
              << "\n";
    for (size_t i = 0; i < trace.outputs.size(); ++i) {
      std::cout << "cycle " << i << ":";
      for (size_t o = 0; o < trace.outputs[i].size(); ++o) {
        std::cout << " " << design.signals[design.output_indices[o]].name << "="
                  << trace.outputs[i][o];
      }
      std::cout << "\n";
    }
  }
  return kExitOk;
}

// ── witness ──────────────────────────────────────────────────────────────

int cmd_witness(const std::string& design_path, const std::string& golden_path,
                const std::string& testcase_path, const std::string& constraints_path,
                const CommonOptions& opt, const std::string& out_path) {
  Design buggy = load_design(design_path);
  Design golden = load_design(golden_path);
  TestCase c_b = load_testcase(testcase_path);
  InputConstraints constraints;
  bool has_constraints = !constraints_path.empty();
  if (has_constraints) constraints = load_constraints(constraints_path);

  SearchConfig cfg = build_config(opt, buggy);
  WitnessSet set;
  try {
    set = generate_witnesses(golden, buggy, c_b, cfg, has_constraints ? &constraints : nullptr);
  } catch (const std::runtime_error& e) {
    if (std::string(e.what()).find("does not trigger") != std::string::npos) {
      std::cerr << "test case does not trigger the bug\n";
      return kExitNotTriggered;
    }
    throw;
  }

  json inputs;
  inputs["design"] = design_path;
  inputs["golden"] = golden_path;
  inputs["testcase"] = testcase_path;
  inputs["constraints"] = has_constraints ? json(constraints_path) : json(nullptr);

  json doc;
  doc["manifest"] = manifest_json("witness", inputs, out_path, config_json(cfg));
  doc["degraded"] = set.degraded;
  doc["restarts"] = set.restarts_used;
  doc["witnesses"] = json::parse(witnesses_to_json(set));
  std::string bytes = doc.dump(2) + "\n";
  if (!out_path.empty()) write_file(out_path, bytes);
  std::cout << "witnesses: " << set.witnesses.size() << (set.degraded ? " (degraded)" : "")
            << "\n";
  return set.degraded ? kExitDegraded : kExitOk;
}

// ── rank ─────────────────────────────────────────────────────────────────

int cmd_rank(const std::string& design_path, const std::string& testcase_path,
             const std::string& witnesses_path, const CommonOptions& opt,
             const std::string& out_path, const std::string& format) {
  Design buggy = load_design(design_path);
  TestCase c_b = load_testcase(testcase_path);
  std::ifstream in(witnesses_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open witness file: " + witnesses_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  auto loaded = witnesses_from_json(buf.str());

  ExecutionTrace failing = simulate(buggy, c_b);
  std::vector<ExecutionTrace> traces;
  traces.reserve(loaded.size());
  for (const auto& [test, fit] : loaded) traces.push_back(simulate(buggy, test));
  std::vector<const ExecutionTrace*> ptrs;
  for (const ExecutionTrace& t : traces) ptrs.push_back(&t);

  SuspiciousnessScores scores = suspiciousness(failing, ptrs);
  SuspiciousnessReport report = rank(scores, buggy);
  SearchConfig cfg = build_config(opt, buggy);
  json cfg_json = config_json(cfg);
  report.config_echo = cfg_json.dump();

  json inputs;
  inputs["design"] = design_path;
  inputs["testcase"] = testcase_path;
  inputs["witnesses"] = witnesses_path;
  json doc;
  doc["manifest"] = manifest_json("rank", inputs, out_path, cfg_json);
  doc["report"] = report_json(report);
  std::string bytes = doc.dump(2) + "\n";
  if (!out_path.empty()) write_file(out_path, bytes);
  if (format == "json")
    std::cout << bytes;
  else
    std::cout << report_table(report);
  return kExitOk;
}

// ── bench ────────────────────────────────────────────────────────────────

int cmd_bench(const std::string& suite_path, const std::vector<std::string>& modes,
              const std::vector<uint64_t>& seeds, const CommonOptions& opt,
              const std::string& out_path, const std::string& md_path) {
  if (seeds.empty()) throw std::runtime_error("at least one rng seed required");
  std::vector<SuiteEntry> suite =
      suite_path == "builtin" ? builtin_suite() : load_suite(suite_path);

  std::vector<EvalResult> results;
  for (const std::string& mode_str : modes) {
    auto mode = mode_from_name(mode_str);
    if (!mode) throw std::runtime_error("unknown mode: " + mode_str);
    SearchConfig cfg;
    cfg.max_iterations = opt.iters;
    cfg.top_n = opt.top_witnesses;
    cfg.mutation_prob = opt.mutation_prob;
    cfg.gamma = opt.gamma;
    cfg.delta = opt.delta;
    cfg.positions_per_mutation = opt.positions;
    cfg.max_restarts = opt.max_restarts;
    cfg.mode = *mode;
    results.push_back(evaluate(suite, cfg, seeds));
  }

  json inputs;
  inputs["suite"] = suite_path;
  inputs["modes"] = modes;
  inputs["seeds"] = seeds;
  SearchConfig echo_cfg;
  echo_cfg.max_iterations = opt.iters;
  echo_cfg.top_n = opt.top_witnesses;
  echo_cfg.mutation_prob = opt.mutation_prob;
  echo_cfg.gamma = opt.gamma;
  echo_cfg.delta = opt.delta;
  echo_cfg.positions_per_mutation = opt.positions;
  echo_cfg.max_restarts = opt.max_restarts;
  json cfg_json = config_json(echo_cfg);
  cfg_json["alpha"] = "auto";  // resolved per design inside the run
  cfg_json["beta"] = "auto";

  json doc;
  doc["manifest"] = manifest_json("bench", inputs, out_path, cfg_json);
  doc["results"] = json::parse(eval_results_to_json(results));
  std::string bytes = doc.dump(2) + "\n";
  if (!out_path.empty()) write_file(out_path, bytes);
  std::string md = eval_results_markdown(results);
  if (!md_path.empty()) write_file(md_path, md);
  std::cout << md;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"witness-driven statement localization for small synchronous designs"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
  app.require_subcommand(1);

  // localize
  auto* localize = app.add_subcommand("localize", "Run the full localization pipeline");
  std::string l_design, l_golden, l_testcase, l_constraints;
  std::string l_out = "report.json", l_format = "table";
  CommonOptions l_opt;
  localize->add_option("--design", l_design, "Buggy design (.mv)")->required();
  localize->add_option("--golden", l_golden, "Golden reference design (.mv)")->required();
  localize->add_option("--testcase", l_testcase, "Bug-triggering test case (.csv)")->required();
  localize->add_option("--constraints", l_constraints, "Per-signal value pools (.json)");
  add_search_flags(localize, l_opt);
  localize->add_option("--out", l_out, "Report path")->capture_default_str();
  localize->add_option("--format", l_format, "Stdout format: json|table")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate one test case and export the trace");
  std::string s_design, s_testcase, s_out, s_format = "json";
  sim->add_option("--design", s_design, "Design (.mv)")->required();
  sim->add_option("--testcase", s_testcase, "Test case (.csv)")->required();
  sim->add_option("--out", s_out, "Trace JSON path");
  sim->add_option("--format", s_format, "Stdout format: json|table")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();

  // witness
  auto* wit = app.add_subcommand("witness", "Generate the witness set only");
  std::string w_design, w_golden, w_testcase, w_constraints, w_out = "witnesses.json";
  CommonOptions w_opt;
  wit->add_option("--design", w_design, "Buggy design (.mv)")->required();
  wit->add_option("--golden", w_golden, "Golden reference design (.mv)")->required();
  wit->add_option("--testcase", w_testcase, "Bug-triggering test case (.csv)")->required();
  wit->add_option("--constraints", w_constraints, "Per-signal value pools (.json)");
  add_search_flags(wit, w_opt);
  wit->add_option("--out", w_out, "Witness set path")->capture_default_str();

  // rank
  auto* rk = app.add_subcommand("rank", "Rank statements from an existing witness set");
  std::string r_design, r_testcase, r_witnesses, r_out, r_format = "table";
  CommonOptions r_opt;
  rk->add_option("--design", r_design, "Buggy design (.mv)")->required();
  rk->add_option("--testcase", r_testcase, "Bug-triggering test case (.csv)")->required();
  rk->add_option("--witnesses", r_witnesses, "Witness set JSON")->required();
  add_search_flags(rk, r_opt);
  rk->add_option("--out", r_out, "Report path");
  rk->add_option("--format", r_format, "Stdout format: json|table")
      ->check(CLI::IsMember({"json", "table"}))
      ->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Evaluate localization over a bug suite");
  std::string b_suite, b_out = "results.json", b_md;
  std::vector<std::string> b_modes = {"full"};
  std::vector<uint64_t> b_seeds;
  CommonOptions b_opt;
  bench->add_option("--suite", b_suite, "'builtin' or a suite manifest path")->required();
  bench->add_option("--modes", b_modes, "Modes to evaluate")->delimiter(',');
  bench->add_option("--seeds", b_seeds, "RNG seeds")->delimiter(',');
  add_search_flags(bench, b_opt);
  bench->add_option("--out", b_out, "Results JSON path")->capture_default_str();
  bench->add_option("--md", b_md, "Results markdown table path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*localize)
      return cmd_localize(l_design, l_golden, l_testcase, l_constraints, l_opt, l_out, l_format);
    if (*sim) return cmd_simulate(s_design, s_testcase, s_out, s_format);
    if (*wit) return cmd_witness(w_design, w_golden, w_testcase, w_constraints, w_opt, w_out);
    if (*rk) return cmd_rank(r_design, r_testcase, r_witnesses, r_opt, r_out, r_format);
    if (*bench) return cmd_bench(b_suite, b_modes, b_seeds, b_opt, b_out, b_md);
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << kToolName << ": " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
