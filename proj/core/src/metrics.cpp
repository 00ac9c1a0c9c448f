#include "witloc/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace witloc {

double coverage_distance(std::span<const uint64_t> a, std::span<const uint64_t> b) {
  if (a.size() != b.size())
    throw std::runtime_error("coverage vector length mismatch: " + std::to_string(a.size()) +
                             " vs " + std::to_string(b.size()));
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

uint64_t dtw(std::span<const uint64_t> a, std::span<const uint64_t> b) {
  const size_t la = a.size();
  const size_t lb = b.size();
  // rolling rows of the cost matrix; row[j] = D(i, j)
  std::vector<uint64_t> prev(lb + 1), cur(lb + 1);
  for (size_t j = 0; j <= lb; ++j) prev[j] = j;
  for (size_t i = 1; i <= la; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= lb; ++j) {
      uint64_t cost = a[i - 1] != b[j - 1] ? 1 : 0;
      uint64_t best = std::min(std::min(prev[j], cur[j - 1]), prev[j - 1]);
      cur[j] = cost + best;
    }
    std::swap(prev, cur);
  }
  return prev[lb];
}

double state_distance(const ExecutionTrace& a, const ExecutionTrace& b) {
  if (a.transitions.size() != b.transitions.size())
    throw std::runtime_error("register set mismatch between traces");
  double sum = 0.0;
  for (size_t r = 0; r < a.transitions.size(); ++r) {
    if (a.transitions[r].register_name != b.transitions[r].register_name)
      throw std::runtime_error("register set mismatch between traces: '" +
                               a.transitions[r].register_name + "' vs '" +
                               b.transitions[r].register_name + "'");
    std::vector<uint64_t> va, vb;
    va.reserve(a.transitions[r].points.size());
    vb.reserve(b.transitions[r].points.size());
    for (const auto& p : a.transitions[r].points) va.push_back(p.second);
    for (const auto& p : b.transitions[r].points) vb.push_back(p.second);
    double d = static_cast<double>(dtw(va, vb));
    sum += d * d;
  }
  return std::sqrt(sum);
}

double distance(const ExecutionTrace& a, const ExecutionTrace& b, DistanceWeights weights) {
  return weights.alpha * coverage_distance(a.coverage, b.coverage) +
         weights.beta * state_distance(a, b);
}

}  // namespace witloc
