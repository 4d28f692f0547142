#pragma once

namespace hb {

inline constexpr const char* kVersion = "0.1.0";

} // namespace hb
