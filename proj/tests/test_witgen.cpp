#include <doctest.h>

#include <cmath>
#include <set>

#include "witloc/bench.hpp"
#include "witloc/witgen.hpp"

using namespace witloc;

namespace {

SearchState synthetic_state(std::vector<double> fitnesses, std::vector<double> priorities,
                            uint64_t seed = 1) {
  SearchState st;
  st.cfg.rng_seed = seed;
  st.rng = Rng(seed);
  for (double f : fitnesses) {
    SeedEntry e;
    e.fitness = f;
    e.trace_id = st.next_trace_id++;
    st.seeds.push_back(std::move(e));
  }
  st.priorities = std::move(priorities);
  return st;
}

std::pair<Design, Design> alu_pair() {
  std::vector<SuiteEntry> suite = builtin_easy_suite();
  const SuiteEntry& alu = suite[1];
  BugSpec spec = alu.bugs[0].spec;  // swapped add/sub arms
  Design buggy = inject_bug(alu.golden, spec);
  return {alu.golden, std::move(buggy)};
}

}  // namespace

TEST_CASE("fitness follows 1/(1+distance)") {
  ExecutionTrace a, b;
  a.coverage = {3, 0};
  b.coverage = {0, 0};  // distance 3 with alpha=1
  DistanceWeights w{1.0, 0.0};
  CHECK(fitness(a, a, w) == 1.0);
  CHECK(fitness(a, b, w) == doctest::Approx(0.25).epsilon(1e-12));
  ExecutionTrace far;
  far.coverage = {100000, 0};
  CHECK(fitness(a, far, w) < 1e-4);
  CHECK(fitness(a, far, w) > 0.0);
}

TEST_CASE("seed selection is proportional to fitness") {
  SUBCASE("a single seed is always chosen") {
    SearchState st = synthetic_state({0.7}, {1.0});
    for (int i = 0; i < 100; ++i) CHECK(select_seed(st) == 0);
  }

  SUBCASE("fitness 1 vs 3 gives 0.25/0.75 within +-0.01 over 1e5 draws") {
    SearchState st = synthetic_state({1.0, 3.0}, {1.0});
    int counts[2] = {0, 0};
    for (int i = 0; i < 100000; ++i) ++counts[select_seed(st)];
    CHECK(std::fabs(counts[0] / 1e5 - 0.25) < 0.01);
    CHECK(std::fabs(counts[1] / 1e5 - 0.75) < 0.01);
  }

  SUBCASE("equal fitness selects uniformly") {
    SearchState st = synthetic_state({0.5, 0.5, 0.5, 0.5}, {1.0});
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < 100000; ++i) ++counts[select_seed(st)];
    for (int c : counts) CHECK(std::fabs(c / 1e5 - 0.25) < 0.01);
  }
}

TEST_CASE("position selection follows priorities and skips duplicates") {
  SUBCASE("equal priorities select uniformly") {
    SearchState st = synthetic_state({1.0}, {1.0, 1.0, 1.0, 1.0});
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < 100000; ++i) ++counts[select_positions(st, 1)[0]];
    for (int c : counts) CHECK(std::fabs(c / 1e5 - 0.25) < 0.01);
  }

  SUBCASE("priorities 1 and 3 give P=0.75 for the heavy position") {
    SearchState st = synthetic_state({1.0}, {1.0, 3.0});
    int heavy = 0;
    for (int i = 0; i < 100000; ++i)
      if (select_positions(st, 1)[0] == 1) ++heavy;
    CHECK(std::fabs(heavy / 1e5 - 0.75) < 0.01);
  }

  SUBCASE("count == t returns all positions") {
    SearchState st = synthetic_state({1.0}, {1.0, 2.0, 0.5});
    std::vector<uint32_t> all = select_positions(st, 3);
    CHECK(all == std::vector<uint32_t>{0, 1, 2});
  }

  SUBCASE("rand and no-div modes ignore the priorities") {
    for (SearchMode mode : {SearchMode::Rand, SearchMode::NoDiv}) {
      SearchState st = synthetic_state({1.0}, {1000.0, 1.0});
      st.cfg.mode = mode;
      int heavy = 0;
      for (int i = 0; i < 100000; ++i)
        if (select_positions(st, 1)[0] == 0) ++heavy;
      CHECK(std::fabs(heavy / 1e5 - 0.5) < 0.01);
    }
  }
}

TEST_CASE("mutation") {
  Design d = parse_design(
      "module m(input a, input [3:0] v, output w);\n  assign w = a;\nendmodule\n");
  TestCase t;
  t.id = "t";
  t.signals = {"a", "v"};
  t.cycles = {{0, 3}, {1, 7}, {0, 15}};

  SUBCASE("p = 0 leaves the case untouched") {
    Rng rng(9);
    TestCase out = mutate(t, {0, 1, 2}, 0.0, d, rng);
    CHECK(out.cycles == t.cycles);
  }

  SUBCASE("p = 1 redraws every value at the selected cycle only") {
    Rng rng(9);
    TestCase out = mutate(t, {1}, 1.0, d, rng);
    CHECK(out.cycles[0] == t.cycles[0]);
    CHECK(out.cycles[2] == t.cycles[2]);
    CHECK(out.cycles[1][0] <= 1);
    CHECK(out.cycles[1][1] <= 15);
  }

  SUBCASE("a fixed seed replays the exact stream") {
    Design d1 = parse_design("module m(input a, output w);\n  assign w = a;\nendmodule\n");
    TestCase bit;
    bit.id = "b";
    bit.signals = {"a"};
    bit.cycles = {{0}};
    Rng rng(42);
    TestCase out = mutate(bit, {0}, 1.0, d1, rng);
    Rng replay(42);
    replay.next_double();  // the p-draw
    uint64_t expected = replay.below(2);
    CHECK(out.cycles[0][0] == expected);
  }

  SUBCASE("constraint pools narrow the redraw range") {
    InputConstraints c = constraints_from_json(R"({"v": {"values": [5, 9]}})");
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
      TestCase out = mutate(t, {0, 1, 2}, 1.0, d, rng, &c);
      for (const auto& row : out.cycles) CHECK((row[1] == 5 || row[1] == 9));
    }
    CHECK_THROWS_WITH_AS(constraints_from_json(R"({"v": {"values": []}})"),
                         doctest::Contains("empty value list"), std::runtime_error);
  }
}

TEST_CASE("score is the mean distance to the seed pool") {
  SearchState st = synthetic_state({1.0, 0.5}, {1.0});
  st.cfg.weights = {1.0, 0.0};
  st.seeds[0].trace.coverage = {2, 0};
  st.seeds[1].trace.coverage = {6, 0};
  ExecutionTrace cand;
  cand.coverage = {4, 0};  // distances 2 and 2 -> mean 2
  CHECK(score(st, 99, cand) == doctest::Approx(2.0).epsilon(1e-12));
  ExecutionTrace cand2;
  cand2.coverage = {0, 0};  // distances 2 and 6 -> mean 4
  CHECK(score(st, 100, cand2) == doctest::Approx(4.0).epsilon(1e-12));
  // identical to every seed -> 0
  SearchState st2 = synthetic_state({1.0}, {1.0});
  st2.cfg.weights = {1.0, 0.0};
  st2.seeds[0].trace.coverage = {4, 0};
  CHECK(score(st2, 101, cand) == 0.0);
}

TEST_CASE("priority update is an exponential moving average") {
  SearchState st = synthetic_state({1.0}, {1.0, 1.0, 1.0});
  st.cfg.gamma = 0.1;
  update_priority(st, {0}, 2.0);
  CHECK(st.priorities[0] == doctest::Approx(1.1).epsilon(1e-12));
  CHECK(st.priorities[1] == 1.0);  // untouched positions unchanged
  st.cfg.gamma = 1.0;
  update_priority(st, {2}, 7.5);
  CHECK(st.priorities[2] == 7.5);  // gamma = 1 adopts the score outright
}

TEST_CASE("generate_witnesses rejects a passing trigger case") {
  auto [golden, buggy] = alu_pair();
  TestCase passing;
  passing.id = "p";
  passing.signals = {"opcode", "a", "b"};
  passing.cycles = {{2, 9, 5}};  // untouched arm
  SearchConfig cfg;
  cfg.weights = resolve_weights(buggy, SearchMode::Full);
  CHECK_THROWS_WITH_AS(generate_witnesses(golden, buggy, passing, cfg),
                       doctest::Contains("does not trigger"), std::runtime_error);
}

TEST_CASE("alu search finds witnesses and keeps the algorithm invariants") {
  auto [golden, buggy] = alu_pair();
  TestCase c_b;
  c_b.id = "c_b";
  c_b.signals = {"opcode", "a", "b"};
  c_b.cycles = {{0, 5, 3}, {1, 9, 4}, {2, 12, 10}, {4, 3, 3}, {6, 8, 0}, {3, 6, 2}, {7, 1, 1}};

  SearchConfig cfg;
  cfg.rng_seed = 1;
  cfg.weights = resolve_weights(buggy, SearchMode::Full);

  double min_priority = 1e9;
  uint64_t iterations_seen = 0;
  std::vector<IterationRecord> records;
  WitnessSet set = generate_witnesses(golden, buggy, c_b, cfg, nullptr,
                                      [&](const IterationRecord& rec) {
                                        ++iterations_seen;
                                        min_priority = std::min(min_priority, rec.min_priority_after);
                                        records.push_back(rec);
                                      });

  CHECK(!set.degraded);
  CHECK(!set.witnesses.empty());
  CHECK(set.witnesses.size() <= cfg.top_n);
  CHECK(set.seed_pool_distinct);
  // one record per iteration, a whole number of rounds
  CHECK(iterations_seen == set.candidates_generated);
  CHECK(set.candidates_generated % cfg.max_iterations == 0);
  CHECK(min_priority > 0.0);
  CHECK(set.passing + set.failing + set.duplicates == set.candidates_generated);

  // every witness passes and no two witnesses share a trace
  for (size_t i = 0; i < set.witnesses.size(); ++i) {
    Verdict v = classify(golden, buggy, set.witnesses[i].test);
    CHECK(v.status == VerdictStatus::Pass);
    for (size_t j = i + 1; j < set.witnesses.size(); ++j)
      CHECK(distance(set.witnesses[i].trace, set.witnesses[j].trace, cfg.weights) > 0.0);
  }
  // witnesses come out sorted by fitness
  for (size_t i = 1; i < set.witnesses.size(); ++i)
    CHECK(set.witnesses[i - 1].fitness >= set.witnesses[i].fitness);

  // sampled distributions stay normalized
  for (const IterationRecord& rec : records) {
    double fit_total = 0.0;
    for (double f : rec.seed_fitness) fit_total += f;
    double ps_sum = 0.0;
    for (double f : rec.seed_fitness) ps_sum += f / fit_total;
    CHECK(std::fabs(ps_sum - 1.0) < 1e-9);
    double pr_total = 0.0;
    for (double p : rec.priorities) pr_total += p;
    double pm_sum = 0.0;
    for (double p : rec.priorities) pm_sum += p / pr_total;
    CHECK(std::fabs(pm_sum - 1.0) < 1e-9);
  }
}

TEST_CASE("the search is deterministic per seed") {
  auto [golden, buggy] = alu_pair();
  TestCase c_b;
  c_b.id = "c_b";
  c_b.signals = {"opcode", "a", "b"};
  c_b.cycles = {{0, 5, 3}, {1, 9, 4}, {4, 7, 7}, {2, 3, 3}, {6, 8, 0}};

  SearchConfig cfg;
  cfg.rng_seed = 7;
  cfg.weights = resolve_weights(buggy, SearchMode::Full);

  std::vector<std::vector<double>> history_a, history_b;
  WitnessSet a = generate_witnesses(golden, buggy, c_b, cfg, nullptr,
                                    [&](const IterationRecord& r) { history_a.push_back(r.priorities); });
  WitnessSet b = generate_witnesses(golden, buggy, c_b, cfg, nullptr,
                                    [&](const IterationRecord& r) { history_b.push_back(r.priorities); });
  REQUIRE(a.witnesses.size() == b.witnesses.size());
  for (size_t i = 0; i < a.witnesses.size(); ++i) {
    CHECK(a.witnesses[i].test.id == b.witnesses[i].test.id);
    CHECK(a.witnesses[i].test.cycles == b.witnesses[i].test.cycles);
    CHECK(a.witnesses[i].fitness == b.witnesses[i].fitness);
  }
  CHECK(history_a == history_b);
  CHECK(a.final_priorities == b.final_priorities);

  SearchConfig other = cfg;
  other.rng_seed = 8;
  WitnessSet c = generate_witnesses(golden, buggy, c_b, other);
  bool same = a.witnesses.size() == c.witnesses.size();
  if (same) {
    for (size_t i = 0; i < a.witnesses.size(); ++i)
      if (a.witnesses[i].test.cycles != c.witnesses[i].test.cycles) same = false;
  }
  CHECK(!same);
}

TEST_CASE("weight resolution and ablation modes") {
  auto [golden, buggy] = alu_pair();
  DistanceWeights full = resolve_weights(buggy, SearchMode::Full);
  CHECK(full.alpha == doctest::Approx(1.0 / buggy.statement_count()));
  CHECK(full.beta == doctest::Approx(1.0 / buggy.register_count()));
  CHECK(resolve_weights(buggy, SearchMode::NoCov).alpha == 0.0);
  CHECK(resolve_weights(buggy, SearchMode::NoCov).beta == full.beta);
  CHECK(resolve_weights(buggy, SearchMode::NoState).beta == 0.0);
  CHECK(resolve_weights(buggy, SearchMode::Full, 0.25, 0.5).alpha == 0.25);

  Design comb = parse_design("module m(input a, output w);\n  assign w = a;\nendmodule\n");
  DistanceWeights cw = resolve_weights(comb, SearchMode::Full);
  CHECK(cw.beta == 0.0);  // no registers
}

TEST_CASE("witness set json round trip") {
  auto [golden, buggy] = alu_pair();
  TestCase c_b;
  c_b.id = "c_b";
  c_b.signals = {"opcode", "a", "b"};
  c_b.cycles = {{0, 5, 3}, {1, 9, 4}, {0, 7, 7}};
  SearchConfig cfg;
  cfg.weights = resolve_weights(buggy, SearchMode::Full);
  WitnessSet set = generate_witnesses(golden, buggy, c_b, cfg);
  REQUIRE(!set.witnesses.empty());
  std::string json = witnesses_to_json(set);
  auto loaded = witnesses_from_json(json);
  REQUIRE(loaded.size() == set.witnesses.size());
  for (size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].first.id == set.witnesses[i].test.id);
    CHECK(loaded[i].first.cycles == set.witnesses[i].test.cycles);
    CHECK(loaded[i].second == set.witnesses[i].fitness);
  }
}

TEST_CASE("restart recovers witnesses through the failing pool") {
  // golden: w = a; buggy: w = !a -- every case fails, so the first round
  // can never produce a witness and the search must degrade.
  Design golden = parse_design("module m(input a, output w);\n  assign w = a;\nendmodule\n");
  Design buggy = parse_design("module m(input a, output w);\n  assign w = !a;\nendmodule\n");
  TestCase c_b;
  c_b.id = "c_b";
  c_b.signals = {"a"};
  c_b.cycles = {{0}, {1}, {0}};
  SearchConfig cfg;
  cfg.max_iterations = 20;
  cfg.weights = resolve_weights(buggy, SearchMode::Full);
  WitnessSet set = generate_witnesses(golden, buggy, c_b, cfg);
  CHECK(set.degraded);
  CHECK(set.witnesses.empty());
  CHECK(set.restarts_used == cfg.max_restarts);
}
