#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "witloc/hdl.hpp"

namespace witloc {

/// Stimulus: values for each input signal over t clock cycles.
struct TestCase {
  std::string id;
  std::vector<std::string> signals;            // input names, design order
  std::vector<std::vector<uint64_t>> cycles;   // t rows of n values

  int cycle_count() const { return static_cast<int>(cycles.size()); }
  int signal_count() const { return static_cast<int>(signals.size()); }
};

struct RegisterTransitions {
  std::string register_name;
  // (cycle, value); cycle 0 holds the reset value, later entries are
  // recorded on change after each cycle commit.
  std::vector<std::pair<uint32_t, uint64_t>> points;
};

struct ExecutionTrace {
  std::vector<uint64_t> coverage;                 // per-statement hit counts, length z
  std::vector<RegisterTransitions> transitions;   // one per register, declaration order
  std::vector<std::vector<uint64_t>> outputs;     // t rows of output values
};

/// Cycle-accurate interpretation. Per cycle: drive inputs, settle continuous
/// assigns in dependency order, run clocked blocks top to bottom (blocking
/// assigns apply immediately, nonblocking ones commit together afterwards),
/// re-settle, then sample outputs and register transitions.
ExecutionTrace simulate(const Design& design, const TestCase& test);

TestCase testcase_from_csv(const std::string& csv, const std::string& id);
TestCase load_testcase(const std::string& path);
std::string testcase_to_csv(const TestCase& test);

std::string trace_to_json(const ExecutionTrace& trace);

}  // namespace witloc
