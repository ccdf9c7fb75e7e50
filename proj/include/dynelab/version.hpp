#pragma once

namespace dynelab {

inline constexpr const char* kToolName = "dynelab";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace dynelab
