#pragma once

#include <cstdint>
#include <span>

#include "witloc/sim.hpp"

namespace witloc {

struct DistanceWeights {
  double alpha = 0.0;  // coverage weight
  double beta = 0.0;   // state weight
};

/// Euclidean distance between two per-statement hit-count vectors.
double coverage_distance(std::span<const uint64_t> a, std::span<const uint64_t> b);

/// Minimum-cost monotone alignment of two value sequences with unit
/// mismatch cost. Boundary: aligning against an empty sequence costs one
/// per element, so dtw([x], []) == 1 and dtw of equal sequences is 0.
uint64_t dtw(std::span<const uint64_t> a, std::span<const uint64_t> b);

/// Euclidean combination of per-register dtw costs over the transition
/// value sequences (timestamps are discarded; alignment handles timing).
double state_distance(const ExecutionTrace& a, const ExecutionTrace& b);

/// weights.alpha * coverage_distance + weights.beta * state_distance
double distance(const ExecutionTrace& a, const ExecutionTrace& b, DistanceWeights weights);

}  // namespace witloc
