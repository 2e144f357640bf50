#pragma once

namespace qod {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qod
