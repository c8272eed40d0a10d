#pragma once

namespace borrowoc {

inline constexpr const char* kVersion = "0.1.0";

} // namespace borrowoc
