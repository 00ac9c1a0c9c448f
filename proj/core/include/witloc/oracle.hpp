#pragma once

#include <cstdint>
#include <optional>

#include "witloc/sim.hpp"

namespace witloc {

enum class VerdictStatus { Pass, Fail };

struct Verdict {
  VerdictStatus status = VerdictStatus::Pass;
  std::optional<uint32_t> first_divergence_cycle;  // present iff Fail
  uint32_t output_rows_compared = 0;
};

/// Compares golden and buggy outputs cycle by cycle. Only the golden
/// design's outputs are consulted, never its internals. Throws on
/// interface mismatch between the two designs.
Verdict classify(const Design& golden, const Design& buggy, const TestCase& test);

/// Same verdict, reusing an already computed trace of `test` on the buggy
/// design.
Verdict classify_against(const Design& golden, const TestCase& test,
                         const ExecutionTrace& buggy_trace);

void check_same_interface(const Design& golden, const Design& buggy);

}  // namespace witloc
