#include "witloc/oracle.hpp"

#include <stdexcept>

namespace witloc {

void check_same_interface(const Design& golden, const Design& buggy) {
  auto mismatch = [](const std::string& what) {
    throw std::runtime_error("interface mismatch between golden and buggy designs: " + what);
  };
  if (golden.input_indices.size() != buggy.input_indices.size()) mismatch("input count");
  for (size_t i = 0; i < golden.input_indices.size(); ++i) {
    const SignalDecl& g = golden.signals[golden.input_indices[i]];
    const SignalDecl& b = buggy.signals[buggy.input_indices[i]];
    if (g.name != b.name || g.width != b.width) mismatch("input '" + g.name + "'");
  }
  if (golden.output_indices.size() != buggy.output_indices.size()) mismatch("output count");
  for (size_t i = 0; i < golden.output_indices.size(); ++i) {
    const SignalDecl& g = golden.signals[golden.output_indices[i]];
    const SignalDecl& b = buggy.signals[buggy.output_indices[i]];
    if (g.name != b.name || g.width != b.width) mismatch("output '" + g.name + "'");
  }
}

Verdict classify_against(const Design& golden, const TestCase& test,
                         const ExecutionTrace& buggy_trace) {
  ExecutionTrace golden_trace = simulate(golden, test);
  Verdict v;
  uint32_t t = static_cast<uint32_t>(test.cycle_count());
  for (uint32_t cycle = 0; cycle < t; ++cycle) {
    v.output_rows_compared = cycle + 1;
    if (golden_trace.outputs[cycle] != buggy_trace.outputs[cycle]) {
      v.status = VerdictStatus::Fail;
      v.first_divergence_cycle = cycle;
      return v;
    }
  }
  v.status = VerdictStatus::Pass;
  return v;
}

Verdict classify(const Design& golden, const Design& buggy, const TestCase& test) {
  check_same_interface(golden, buggy);
  ExecutionTrace buggy_trace = simulate(buggy, test);
  return classify_against(golden, test, buggy_trace);
}

}  // namespace witloc
