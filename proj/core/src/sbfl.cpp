#include "witloc/sbfl.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace witloc {

double ochiai(uint64_t e_f, uint64_t n_f, uint64_t e_p) {
  if (e_f == 0) return 0.0;
  double denom = std::sqrt(static_cast<double>(e_f + n_f) * static_cast<double>(e_f + e_p));
  return static_cast<double>(e_f) / denom;
}

SuspiciousnessScores suspiciousness(const ExecutionTrace& failing,
                                    const std::vector<const ExecutionTrace*>& witnesses) {
  const size_t z = failing.coverage.size();
  for (const ExecutionTrace* w : witnesses) {
    if (w->coverage.size() != z)
      throw std::runtime_error("trace shape mismatch: witness covers " +
                               std::to_string(w->coverage.size()) + " statements, failing trace " +
                               std::to_string(z));
  }
  SuspiciousnessScores out;
  out.score.assign(z, 0.0);
  out.e_p.assign(z, 0);
  out.touched.assign(z, false);
  for (size_t s = 0; s < z; ++s) {
    if (failing.coverage[s] == 0) continue;
    out.touched[s] = true;
    ++out.touched_count;
    uint64_t e_p = 0;
    for (const ExecutionTrace* w : witnesses)
      if (w->coverage[s] > 0) ++e_p;
    out.e_p[s] = e_p;
    out.score[s] = 1.0 / std::sqrt(1.0 + static_cast<double>(e_p));
  }
  return out;
}

SuspiciousnessReport rank(const SuspiciousnessScores& scores, const Design& design) {
  const size_t z = scores.score.size();
  if (static_cast<size_t>(design.statement_count()) != z)
    throw std::runtime_error("score vector does not match the design's statement count");

  SuspiciousnessReport report;
  report.touched_count = scores.touched_count;
  report.entries.reserve(z);
  for (size_t s = 0; s < z; ++s) {
    ReportEntry e;
    e.statement_id = static_cast<int>(s);
    e.source_line = design.statements[s].source_line;
    e.e_p = scores.e_p[s];
    e.score = scores.score[s];
    report.entries.push_back(e);
  }
  // touched statements all score > 0, untouched exactly 0, so a plain
  // score-descending sort already puts untouched ones last
  std::sort(report.entries.begin(), report.entries.end(), [](const ReportEntry& a, const ReportEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.statement_id < b.statement_id;
  });
  size_t i = 0;
  while (i < report.entries.size()) {
    size_t j = i;
    while (j < report.entries.size() && report.entries[j].score == report.entries[i].score) ++j;
    // positions i+1 .. j share their mean rank
    double mean = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) report.entries[k].rank = mean;
    i = j;
  }
  return report;
}

std::string report_table(const SuspiciousnessReport& report) {
  std::ostringstream os;
  os << std::setw(8) << "rank" << "  " << std::setw(6) << "line" << "  " << std::setw(10)
     << "score" << "  " << std::setw(5) << "e_p" << "\n";
  for (const ReportEntry& e : report.entries) {
    os << std::setw(8) << std::fixed << std::setprecision(1) << e.rank << "  " << std::setw(6)
       << e.source_line << "  " << std::setw(10) << std::setprecision(6) << e.score << "  "
       << std::setw(5) << e.e_p << "\n";
  }
  return os.str();
}

double best_rank(const SuspiciousnessReport& report, const std::vector<int>& statement_ids) {
  double best = 0.0;
  bool found = false;
  for (const ReportEntry& e : report.entries) {
    if (std::find(statement_ids.begin(), statement_ids.end(), e.statement_id) ==
        statement_ids.end())
      continue;
    if (!found || e.rank < best) {
      best = e.rank;
      found = true;
    }
  }
  if (!found) throw std::runtime_error("statement ids not present in the report");
  return best;
}

bool reaches_top(const SuspiciousnessReport& report, const std::vector<int>& statement_ids) {
  double best_score = -1.0;
  bool found = false;
  for (const ReportEntry& e : report.entries) {
    if (std::find(statement_ids.begin(), statement_ids.end(), e.statement_id) ==
        statement_ids.end())
      continue;
    found = true;
    best_score = std::max(best_score, e.score);
  }
  if (!found) throw std::runtime_error("statement ids not present in the report");
  for (const ReportEntry& e : report.entries)
    if (e.score > best_score) return false;
  return true;
}

}  // namespace witloc
