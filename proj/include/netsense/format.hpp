#pragma once

#include <string>

namespace netsense {

/// Shortest decimal form that round-trips to the same double.
[[nodiscard]] std::string format_double(double x);

}  // namespace netsense
