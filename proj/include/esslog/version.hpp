#pragma once

namespace esslog {

inline constexpr const char* kToolVersion = "1.0.0";

} // namespace esslog
