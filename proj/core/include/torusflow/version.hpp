#pragma once

namespace torusflow {

inline constexpr const char* kToolName = "torusflow";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace torusflow
