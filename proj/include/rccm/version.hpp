#pragma once

namespace rccm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rccm
