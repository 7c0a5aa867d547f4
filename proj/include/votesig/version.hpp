#pragma once

namespace votesig {

inline constexpr const char* kToolName = "votesig";
inline constexpr const char* kVersion = "0.1.0";

} // namespace votesig
