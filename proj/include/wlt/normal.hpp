#pragma once

namespace wlt {

/// Phi(x), accurate to ~1e-16 absolute.
double normal_cdf(double x);

/// 1 - Phi(x) without cancellation in the upper tail.
double normal_upper_tail(double x);

/// Phi^{-1}(prob) for prob in (0, 1). Throws InvalidArgument otherwise.
double normal_quantile(double prob);

/// Upper-level quantile z with 1 - Phi(z) = level, level in (0, 1).
double z_quantile(double level);

} // namespace wlt
