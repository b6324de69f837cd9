#pragma once

namespace sptk {

inline constexpr const char* kVersion = "0.1.0";

} // namespace sptk
