#pragma once

namespace witloc {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "witloc";

}  // namespace witloc
