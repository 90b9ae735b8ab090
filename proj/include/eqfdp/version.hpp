#pragma once

namespace eqfdp {

inline constexpr const char* kVersion = "eqfdp 1.0.0";

} // namespace eqfdp
