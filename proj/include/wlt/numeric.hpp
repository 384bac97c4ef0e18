#pragma once

#include <cmath>
#include <cstddef>

namespace wlt {

/// Integer part [x] of a nonnegative real, tolerant to rounding just below an
/// integer (pow(400, 0.5) may come out as 19.999999999999996).
inline std::size_t integer_part(double x) {
  return x <= 0.0 ? 0 : static_cast<std::size_t>(std::floor(x + 1e-9));
}

} // namespace wlt
