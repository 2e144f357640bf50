#pragma once

#include <string>

namespace qod {

/// Shortest decimal text that parses back to exactly the same double.
/// Locale-independent.
std::string format_double(double v);

}  // namespace qod
