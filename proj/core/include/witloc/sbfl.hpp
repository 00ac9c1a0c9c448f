#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "witloc/sim.hpp"

namespace witloc {

/// e_f / sqrt((e_f + n_f) * (e_f + e_p)); 0 when e_f is 0.
double ochiai(uint64_t e_f, uint64_t n_f, uint64_t e_p);

struct SuspiciousnessScores {
  std::vector<double> score;    // per statement id, 0 for untouched ones
  std::vector<uint64_t> e_p;    // witnesses touching the statement
  std::vector<bool> touched;    // touched by the failing trace
  size_t touched_count = 0;
};

/// Single failing run, so for every statement it touches the score reduces
/// to 1 / sqrt(1 + e_p). Statements the failing run never reaches score 0.
SuspiciousnessScores suspiciousness(const ExecutionTrace& failing,
                                    const std::vector<const ExecutionTrace*>& witnesses);

struct ReportEntry {
  int statement_id = -1;
  int source_line = 0;
  uint64_t e_p = 0;
  double score = 0.0;
  double rank = 0.0;  // tied scores share the mean of the positions they span
};

struct SuspiciousnessReport {
  std::vector<ReportEntry> entries;  // sorted by rank, ties by statement id
  size_t touched_count = 0;
  std::string config_echo;  // resolved search configuration, JSON
};

SuspiciousnessReport rank(const SuspiciousnessScores& scores, const Design& design);

/// Human-readable table with columns rank | line | score | e_p.
std::string report_table(const SuspiciousnessReport& report);

/// Best (smallest) rank over a set of statement ids.
double best_rank(const SuspiciousnessReport& report, const std::vector<int>& statement_ids);

/// True when no statement scores strictly higher than the best of the set,
/// i.e. the set reaches the top either alone or in a tie.
bool reaches_top(const SuspiciousnessReport& report, const std::vector<int>& statement_ids);

}  // namespace witloc
