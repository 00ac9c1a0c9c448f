#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "witloc/hdl.hpp"
#include "witloc/sbfl.hpp"
#include "witloc/sim.hpp"
#include "witloc/witgen.hpp"

namespace witloc {

enum class BugEdit {
  SwapCaseArms,           // exchange the bodies of two case arms
  WrongNextStateConstant, // replace the constant RHS of a nonblocking assign
  WrongAssignConstant,    // replace the constant RHS of any assign
  NegateCondition,        // wrap an if condition in !(...)
  OffByOneConstant,       // add a delta to one constant in a statement
};

const char* edit_name(BugEdit edit);
BugEdit edit_from_name(const std::string& name);

struct BugSpec {
  std::string name;
  int target_statement = -1;
  BugEdit edit = BugEdit::WrongAssignConstant;
  // edit-specific parameters
  int other_statement = -1;       // SwapCaseArms: the second arm
  uint64_t new_value = 0;         // Wrong*Constant
  int constant_occurrence = 0;    // OffByOneConstant: which constant, in print order
  int64_t delta = 1;              // OffByOneConstant
  std::vector<int> ground_truth;  // statements whose text differs after the edit
};

/// Applies the edit, re-elaborates and fills spec.ground_truth with the
/// statements whose canonical text changed. Statement ids of unedited
/// statements are preserved. Throws when the edit does not apply to the
/// target statement or the edited design no longer elaborates.
Design inject_bug(const Design& golden, BugSpec& spec);

struct SuiteBug {
  BugSpec spec;
  TestCase failing_case;
};

struct SuiteEntry {
  std::string design_name;
  Design golden;
  std::vector<SuiteBug> bugs;
};

/// Six small designs with 22 injected bugs and hand-written triggering
/// cases of 8-18 cycles.
std::vector<SuiteEntry> builtin_suite();

/// Subsets of the built-in suite by difficulty.
std::vector<SuiteEntry> builtin_easy_suite();

/// Suite manifest: JSON {"designs": [{"name", "golden", "bugs": [...]}]};
/// paths are resolved relative to the manifest file.
std::vector<SuiteEntry> load_suite(const std::string& manifest_path);

/// Finds the unique statement whose canonical text equals `text`.
int find_statement(const Design& design, const std::string& text);

/// Nth statement (0-based, in id order) whose canonical text equals `text`.
int find_statement(const Design& design, const std::string& text, int occurrence);

struct BugOutcome {
  std::string design;
  std::string bug;
  uint64_t seed = 0;
  bool triggered = false;
  bool degraded = false;
  double rank = 0.0;      // best ground-truth rank, tie-averaged
  bool tied_top1 = false; // ground truth reaches the top score, alone or tied
  uint32_t witness_count = 0;
};

struct SeedResult {
  uint64_t seed = 0;
  double mar = 0.0;             // mean of per-bug ranks over triggered bugs
  std::map<int, int> top_n;     // n in {1,5,10,20} -> bugs with rank <= n
  int tied_top1 = 0;
  std::vector<BugOutcome> bugs;
};

struct EvalResult {
  SearchMode mode = SearchMode::Full;
  std::vector<SeedResult> per_seed;
  double mean_mar = 0.0;
  double stddev_mar = 0.0;
  std::map<int, double> mean_top_n;
  double mean_tied_top1 = 0.0;
};

/// Runs the full localize pipeline for every (bug, seed) cell and
/// aggregates Top-n counts and MAR per seed and as means over seeds.
/// cfg.rng_seed is overridden by each entry of `seeds`; alpha/beta resolve
/// per design from cfg.mode unless fixed in cfg.weights by the caller.
EvalResult evaluate(const std::vector<SuiteEntry>& suite, const SearchConfig& cfg,
                    const std::vector<uint64_t>& seeds, const IterationHook& hook = {});

std::string eval_results_to_json(const std::vector<EvalResult>& results);
std::string eval_results_markdown(const std::vector<EvalResult>& results);

/// One localize run; the building block of evaluate() and the CLI.
struct LocalizeOutcome {
  Verdict verdict;
  WitnessSet witnesses;
  SuspiciousnessReport report;
  DistanceWeights weights;
};

LocalizeOutcome run_localization(const Design& golden, const Design& buggy, const TestCase& c_b,
                                 SearchConfig cfg, const InputConstraints* constraints = nullptr,
                                 const IterationHook& hook = {});

}  // namespace witloc
