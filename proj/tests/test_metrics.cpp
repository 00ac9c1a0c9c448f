#include <doctest.h>

#include <cmath>
#include <random>

#include "witloc/bench.hpp"
#include "witloc/metrics.hpp"

using namespace witloc;

namespace {

// Independent reference: walk every monotone lattice path from (0,0) to
// (la,lb). Interior steps cost 1 on value mismatch; edge steps (row 0 or
// column 0) cost 1 each, matching the dtw boundary.
uint64_t dtw_bruteforce_walk(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b,
                             size_t i, size_t j) {
  if (i == a.size() && j == b.size()) return 0;
  uint64_t best = UINT64_MAX;
  auto step_cost = [&](size_t ni, size_t nj) -> uint64_t {
    if (ni == 0 || nj == 0) return 1;  // aligned against nothing
    return a[ni - 1] != b[nj - 1] ? 1 : 0;
  };
  if (i < a.size() && j < b.size()) {
    uint64_t c = step_cost(i + 1, j + 1) + dtw_bruteforce_walk(a, b, i + 1, j + 1);
    best = std::min(best, c);
  }
  if (i < a.size()) {
    uint64_t c = step_cost(i + 1, j) + dtw_bruteforce_walk(a, b, i + 1, j);
    best = std::min(best, c);
  }
  if (j < b.size()) {
    uint64_t c = step_cost(i, j + 1) + dtw_bruteforce_walk(a, b, i, j + 1);
    best = std::min(best, c);
  }
  return best;
}

uint64_t dtw_bruteforce(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
  return dtw_bruteforce_walk(a, b, 0, 0);
}

ExecutionTrace random_trace(const Design& d, std::mt19937& gen) {
  TestCase t;
  t.id = "r";
  for (int i : d.input_indices) t.signals.push_back(d.signals[i].name);
  int cycles = 6 + static_cast<int>(gen() % 12);
  for (int c = 0; c < cycles; ++c) {
    std::vector<uint64_t> row;
    for (int i : d.input_indices) row.push_back(gen() & width_mask(d.signals[i].width));
    t.cycles.push_back(std::move(row));
  }
  return simulate(d, t);
}

bool traces_equal_in_distance_space(const ExecutionTrace& a, const ExecutionTrace& b) {
  if (a.coverage != b.coverage) return false;
  for (size_t r = 0; r < a.transitions.size(); ++r) {
    const auto& pa = a.transitions[r].points;
    const auto& pb = b.transitions[r].points;
    if (pa.size() != pb.size()) return false;
    for (size_t i = 0; i < pa.size(); ++i)
      if (pa[i].second != pb[i].second) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("coverage distance examples") {
  std::vector<uint64_t> a = {2, 0, 1}, b = {0, 0, 1};
  CHECK(coverage_distance(a, a) == 0.0);
  CHECK(coverage_distance(a, b) == doctest::Approx(2.0).epsilon(1e-12));
  std::vector<uint64_t> c = {1, 1}, d = {0, 0};
  CHECK(coverage_distance(c, d) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  std::vector<uint64_t> short_v = {1};
  CHECK_THROWS_WITH_AS(coverage_distance(a, short_v), doctest::Contains("length mismatch"),
                       std::runtime_error);
}

TEST_CASE("dtw examples") {
  std::vector<uint64_t> v123 = {1, 2, 3}, v13 = {1, 3}, one = {7}, empty;
  CHECK(dtw(v123, v123) == 0);
  CHECK(dtw(v123, v13) == 1);
  CHECK(dtw(one, empty) == 1);
  CHECK(dtw(empty, empty) == 0);
}

TEST_CASE("dtw equals the brute-force path minimum (alphabet {0,1,2}, length <= 3)") {
  std::vector<std::vector<uint64_t>> seqs;
  seqs.push_back({});
  for (uint64_t x = 0; x < 3; ++x) {
    seqs.push_back({x});
    for (uint64_t y = 0; y < 3; ++y) {
      seqs.push_back({x, y});
      for (uint64_t z = 0; z < 3; ++z) seqs.push_back({x, y, z});
    }
  }
  for (const auto& a : seqs)
    for (const auto& b : seqs) CHECK(dtw(a, b) == dtw_bruteforce(a, b));
}

TEST_CASE("dtw is bounded by the longer length") {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<uint64_t> a(gen() % 10), b(gen() % 10);
    for (auto& v : a) v = gen() % 4;
    for (auto& v : b) v = gen() % 4;
    CHECK(dtw(a, b) <= std::max(a.size(), b.size()));
    CHECK(dtw(a, b) == dtw(b, a));
  }
}

TEST_CASE("state distance examples") {
  ExecutionTrace a, b;
  // two registers with per-register dtw costs 3 and 4 -> 5.0
  a.transitions.push_back({"r0", {{0, 0}, {1, 1}, {2, 2}, {3, 3}}});
  b.transitions.push_back({"r0", {{0, 0}, {1, 5}, {2, 6}, {3, 7}}});
  a.transitions.push_back({"r1", {{0, 0}, {1, 1}, {2, 0}, {3, 1}}});
  b.transitions.push_back({"r1", {{0, 2}, {1, 3}, {2, 2}, {3, 3}}});  // four mismatches
  std::vector<uint64_t> r0a = {0, 1, 2, 3}, r0b = {0, 5, 6, 7};
  std::vector<uint64_t> r1a = {0, 1, 0, 1}, r1b = {2, 3, 2, 3};
  REQUIRE(dtw(r0a, r0b) == 3);
  REQUIRE(dtw(r1a, r1b) == 4);
  CHECK(state_distance(a, b) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(state_distance(a, a) == 0.0);

  ExecutionTrace no_regs_a, no_regs_b;
  CHECK(state_distance(no_regs_a, no_regs_b) == 0.0);  // empty sum

  ExecutionTrace mismatched;
  mismatched.transitions.push_back({"other", {{0, 0}}});
  CHECK_THROWS_WITH_AS(state_distance(a, mismatched), doctest::Contains("register set mismatch"),
                       std::runtime_error);
}

TEST_CASE("weighted distance examples") {
  // cov = 2.0 and state = 5.0 with alpha .5, beta .1 -> 1.5
  ExecutionTrace a, b;
  a.coverage = {2, 0, 1};
  b.coverage = {0, 0, 1};
  a.transitions.push_back({"r0", {{0, 0}, {1, 1}, {2, 2}, {3, 3}}});
  b.transitions.push_back({"r0", {{0, 0}, {1, 5}, {2, 6}, {3, 7}}});
  a.transitions.push_back({"r1", {{0, 0}, {1, 1}, {2, 0}, {3, 1}}});
  b.transitions.push_back({"r1", {{0, 2}, {1, 3}, {2, 2}, {3, 3}}});
  CHECK(distance(a, b, {0.5, 0.1}) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(distance(a, a, {0.5, 0.1}) == 0.0);
  // alpha = 0 reduces to beta * state_distance exactly
  CHECK(distance(a, b, {0.0, 0.1}) == 0.1 * state_distance(a, b));
  // linearity in the weights
  CHECK(distance(a, b, {1.0, 2.0}) ==
        doctest::Approx(2.0 * distance(a, b, {0.5, 1.0})).epsilon(1e-12));
}

TEST_CASE("distance is a semimetric on real traces") {
  std::mt19937 gen(17);
  for (const SuiteEntry& entry : builtin_suite()) {
    const Design& d = entry.golden;
    DistanceWeights w{1.0 / d.statement_count(), 1.0 / d.register_count()};
    for (int trial = 0; trial < 30; ++trial) {
      ExecutionTrace a = random_trace(d, gen);
      ExecutionTrace b = random_trace(d, gen);
      double ab = distance(a, b, w);
      double ba = distance(b, a, w);
      CHECK(ab == ba);  // exact symmetry
      CHECK(ab >= 0.0);
      CHECK(distance(a, a, w) == 0.0);
      CHECK((ab == 0.0) == traces_equal_in_distance_space(a, b));
    }
  }
}
