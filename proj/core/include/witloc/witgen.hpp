#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "witloc/metrics.hpp"
#include "witloc/oracle.hpp"
#include "witloc/rng.hpp"
#include "witloc/sim.hpp"

namespace witloc {

enum class SearchMode { Full, Rand, NoCov, NoState, NoDiv };

const char* mode_name(SearchMode mode);
std::optional<SearchMode> mode_from_name(const std::string& name);

struct SearchConfig {
  uint32_t max_iterations = 100;
  uint32_t top_n = 10;            // witnesses kept for suspiciousness
  double mutation_prob = 0.5;     // per-signal mutation probability p
  double gamma = 0.1;             // priority update coefficient
  double delta = 1.0;             // initial position priority
  uint32_t positions_per_mutation = 3;
  uint32_t max_restarts = 2;
  uint64_t rng_seed = 1;
  DistanceWeights weights;        // resolved, see resolve_weights
  SearchMode mode = SearchMode::Full;
};

/// alpha defaults to 1/z and beta to 1/k (0 for designs without registers);
/// the NoCov / NoState ablations zero out the respective weight.
DistanceWeights resolve_weights(const Design& design, SearchMode mode,
                                std::optional<double> alpha = std::nullopt,
                                std::optional<double> beta = std::nullopt);

/// Optional per-signal value pools; mutation draws from the pool instead of
/// the full [0, 2^width) range.
struct InputConstraints {
  std::map<std::string, std::vector<uint64_t>> allowed;
};

InputConstraints constraints_from_json(const std::string& json_text);
InputConstraints load_constraints(const std::string& path);

/// Distances memoized per trace-id pair within one search session.
class DistanceCache {
 public:
  double get(size_t id_a, const ExecutionTrace& a, size_t id_b, const ExecutionTrace& b,
             DistanceWeights w);

 private:
  std::map<std::pair<size_t, size_t>, double> memo_;
};

struct SeedEntry {
  TestCase test;
  ExecutionTrace trace;
  double fitness = 0.0;
  bool anchor = false;  // seeded the round rather than being found by it
  size_t trace_id = 0;
};

struct SearchState {
  std::vector<SeedEntry> seeds;    // current seed pool
  std::vector<SeedEntry> failing;  // failing candidates collected this round
  std::vector<double> priorities;  // one per cycle position
  uint32_t iter = 0;
  Rng rng;
  SearchConfig cfg;

  const Design* buggy = nullptr;
  const InputConstraints* constraints = nullptr;
  ExecutionTrace bug_trace;  // trace of the triggering case on the buggy design
  size_t next_trace_id = 1;
  DistanceCache cache;
};

/// 1 / (1 + Distance(trace, bug_trace))
double fitness(const ExecutionTrace& trace, const ExecutionTrace& bug_trace, DistanceWeights w);

/// Samples a seed index proportionally to fitness (uniform in Rand mode).
size_t select_seed(SearchState& state);

/// Samples `count` distinct cycle positions, each draw proportional to its
/// priority over the remaining positions (uniform in Rand / NoDiv modes).
/// The result is sorted.
std::vector<uint32_t> select_positions(SearchState& state, uint32_t count);

/// At each selected cycle, each input value is redrawn from its legal range
/// with probability p; everything else is copied unchanged.
TestCase mutate(const TestCase& test, const std::vector<uint32_t>& positions, double p,
                const Design& design, Rng& rng, const InputConstraints* constraints = nullptr);

/// Mean distance from the candidate trace to every current seed.
double score(SearchState& state, size_t cand_trace_id, const ExecutionTrace& cand);

/// priorities[i] <- (1-gamma)*priorities[i] + gamma*s for the mutated positions.
void update_priority(SearchState& state, const std::vector<uint32_t>& positions, double s);

struct Witness {
  TestCase test;
  ExecutionTrace trace;
  double fitness = 0.0;
};

struct WitnessSet {
  std::vector<Witness> witnesses;  // highest fitness first, at most top_n
  bool degraded = false;           // no witness found within the restart budget
  uint32_t restarts_used = 0;
  uint64_t candidates_generated = 0;
  uint64_t passing = 0;
  uint64_t failing = 0;
  uint64_t duplicates = 0;
  std::vector<double> final_priorities;
  // self-check: pairwise seed-pool distances stayed nonzero in every round
  bool seed_pool_distinct = true;
};

/// Progress record for one search iteration, for tracing and audits.
struct IterationRecord {
  uint32_t round = 0;
  uint32_t iter = 0;
  size_t seed_index = 0;
  std::vector<double> seed_fitness;       // snapshot at seed selection
  std::vector<double> priorities;         // snapshot at position selection
  std::vector<uint32_t> positions;
  bool passed = false;
  bool accepted = false;
  bool duplicate = false;
  double score = 0.0;
  double min_priority_after = 0.0;
};

using IterationHook = std::function<void(const IterationRecord&)>;

/// The full search loop: mutate seeds, classify candidates against the
/// golden design, grow the seed pool with trace-distinct passing cases, and
/// return the top_n witnesses by fitness. If a round produces no witness the
/// failing pool reseeds the next round, up to max_restarts times.
/// Requires that c_b fails on the buggy design.
WitnessSet generate_witnesses(const Design& golden, const Design& buggy, const TestCase& c_b,
                              const SearchConfig& cfg,
                              const InputConstraints* constraints = nullptr,
                              const IterationHook& hook = {});

/// The witness-set interchange format: a JSON array of
/// {case_id, fitness, csv_payload}.
std::string witnesses_to_json(const WitnessSet& set);
std::vector<std::pair<TestCase, double>> witnesses_from_json(const std::string& json_text);

}  // namespace witloc
