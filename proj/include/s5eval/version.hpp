#pragma once

namespace s5eval {

inline constexpr const char* kToolName = "s5eval";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace s5eval
