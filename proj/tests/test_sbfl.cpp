#include <doctest.h>

#include <cmath>
#include <random>

#include "witloc/sbfl.hpp"

using namespace witloc;

namespace {

Design tiny_design(int statements) {
  // one continuous assign per statement keeps ids dense and lines distinct
  std::string src = "module tiny(input a";
  for (int i = 0; i < statements; ++i) src += ", output w" + std::to_string(i);
  src += ");\n";
  for (int i = 0; i < statements; ++i)
    src += "  assign w" + std::to_string(i) + " = a;\n";
  src += "endmodule\n";
  return parse_design(src);
}

ExecutionTrace trace_with_coverage(std::vector<uint64_t> cov) {
  ExecutionTrace t;
  t.coverage = std::move(cov);
  return t;
}

}  // namespace

TEST_CASE("ochiai examples") {
  CHECK(ochiai(1, 0, 0) == 1.0);
  CHECK(ochiai(1, 0, 3) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ochiai(0, 5, 7) == 0.0);
}

TEST_CASE("single-failing-run scores are 1/sqrt(1+e_p)") {
  ExecutionTrace failing = trace_with_coverage({1, 0, 2, 5});
  ExecutionTrace w1 = trace_with_coverage({1, 1, 0, 1});
  ExecutionTrace w2 = trace_with_coverage({0, 1, 0, 2});
  ExecutionTrace w3 = trace_with_coverage({1, 0, 0, 3});

  SUBCASE("zero witnesses: every touched statement scores 1.0") {
    SuspiciousnessScores s = suspiciousness(failing, {});
    CHECK(s.score[0] == 1.0);
    CHECK(s.score[1] == 0.0);  // untouched
    CHECK(s.score[2] == 1.0);
    CHECK(s.score[3] == 1.0);
    CHECK(s.touched_count == 3);
  }

  SUBCASE("witness counts feed the simplified formula") {
    SuspiciousnessScores s = suspiciousness(failing, {&w1, &w2, &w3});
    CHECK(s.e_p[0] == 2);
    CHECK(s.e_p[3] == 3);
    CHECK(s.score[3] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s.score[2] == 1.0);   // touched by failing only
    CHECK(s.score[1] == 0.0);   // untouched stays 0 regardless of witnesses
    CHECK(s.e_p[1] == 0);
  }

  SUBCASE("statement touched by 3 of 10 witnesses scores 0.5") {
    std::vector<ExecutionTrace> pool(10, trace_with_coverage({0, 0, 0, 0}));
    for (int i = 0; i < 3; ++i) pool[i].coverage[0] = 1;
    std::vector<const ExecutionTrace*> ptrs;
    for (auto& t : pool) ptrs.push_back(&t);
    SuspiciousnessScores s = suspiciousness(failing, ptrs);
    CHECK(s.score[0] == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("shape mismatch is rejected") {
    ExecutionTrace bad = trace_with_coverage({1, 2});
    CHECK_THROWS_WITH_AS(suspiciousness(failing, {&bad}),
                         doctest::Contains("trace shape mismatch"), std::runtime_error);
  }
}

TEST_CASE("the simplified formula is ochiai with e_f=1, n_f=0") {
  for (uint64_t e_p = 0; e_p <= 1000; ++e_p) {
    double simplified = 1.0 / std::sqrt(1.0 + static_cast<double>(e_p));
    CHECK(std::fabs(simplified - ochiai(1, 0, e_p)) <= 1e-12);
  }
}

TEST_CASE("suspiciousness is monotone in the witness set") {
  std::mt19937 gen(23);
  for (int trial = 0; trial < 50; ++trial) {
    size_t z = 1 + gen() % 8;
    ExecutionTrace failing, extra;
    failing.coverage.resize(z);
    extra.coverage.resize(z);
    for (auto& v : failing.coverage) v = gen() % 3;
    for (auto& v : extra.coverage) v = gen() % 2;
    std::vector<ExecutionTrace> pool(gen() % 4, failing);
    std::vector<const ExecutionTrace*> ptrs;
    for (auto& t : pool) ptrs.push_back(&t);
    SuspiciousnessScores before = suspiciousness(failing, ptrs);
    ptrs.push_back(&extra);
    SuspiciousnessScores after = suspiciousness(failing, ptrs);
    for (size_t s = 0; s < z; ++s) {
      if (extra.coverage[s] > 0)
        CHECK(after.score[s] <= before.score[s]);
      else
        CHECK(after.score[s] == before.score[s]);
    }
  }
}

TEST_CASE("rank ties share their average position") {
  Design d = tiny_design(4);
  SuspiciousnessScores s;
  s.score = {1.0, 0.5, 0.5, 0.2};
  s.e_p = {0, 3, 3, 24};
  s.touched = {true, true, true, true};
  s.touched_count = 4;
  SuspiciousnessReport r = rank(s, d);
  REQUIRE(r.entries.size() == 4);
  CHECK(r.entries[0].rank == 1.0);
  CHECK(r.entries[1].rank == 2.5);
  CHECK(r.entries[2].rank == 2.5);
  CHECK(r.entries[3].rank == 4.0);
  CHECK(r.entries[0].statement_id == 0);
}

TEST_CASE("all-equal scores rank at (z+1)/2") {
  Design d = tiny_design(5);
  SuspiciousnessScores s;
  s.score.assign(5, 1.0);
  s.e_p.assign(5, 0);
  s.touched.assign(5, true);
  s.touched_count = 5;
  SuspiciousnessReport r = rank(s, d);
  for (const ReportEntry& e : r.entries) CHECK(e.rank == 3.0);
}

TEST_CASE("single statement ranks first") {
  Design d = tiny_design(1);
  SuspiciousnessScores s;
  s.score = {1.0};
  s.e_p = {0};
  s.touched = {true};
  s.touched_count = 1;
  SuspiciousnessReport r = rank(s, d);
  CHECK(r.entries[0].rank == 1.0);
}

TEST_CASE("untouched statements sort last and touched ranks sum to z'(z'+1)/2") {
  std::mt19937 gen(31);
  for (int trial = 0; trial < 40; ++trial) {
    int z = 2 + static_cast<int>(gen() % 7);
    Design d = tiny_design(z);
    SuspiciousnessScores s;
    s.score.assign(z, 0.0);
    s.e_p.assign(z, 0);
    s.touched.assign(z, false);
    for (int i = 0; i < z; ++i) {
      if (gen() % 3 == 0) continue;
      s.touched[i] = true;
      ++s.touched_count;
      s.e_p[i] = gen() % 5;
      s.score[i] = 1.0 / std::sqrt(1.0 + static_cast<double>(s.e_p[i]));
    }
    SuspiciousnessReport r = rank(s, d);
    double touched_rank_sum = 0.0;
    size_t seen_untouched = 0;
    for (const ReportEntry& e : r.entries) {
      if (e.score > 0.0) {
        CHECK(seen_untouched == 0);  // all touched come first
        touched_rank_sum += e.rank;
      } else {
        ++seen_untouched;
      }
    }
    double zp = static_cast<double>(s.touched_count);
    CHECK(touched_rank_sum == doctest::Approx(zp * (zp + 1) / 2.0).epsilon(1e-9));
    // scores are non-increasing in rank order
    for (size_t i = 1; i < r.entries.size(); ++i)
      CHECK(r.entries[i - 1].score >= r.entries[i].score);
  }
}

TEST_CASE("report table has the expected columns") {
  Design d = tiny_design(2);
  SuspiciousnessScores s;
  s.score = {1.0, 0.5};
  s.e_p = {0, 3};
  s.touched = {true, true};
  s.touched_count = 2;
  std::string table = report_table(rank(s, d));
  CHECK(table.find("rank") != std::string::npos);
  CHECK(table.find("line") != std::string::npos);
  CHECK(table.find("score") != std::string::npos);
  CHECK(table.find("e_p") != std::string::npos);
}
