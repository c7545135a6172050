#pragma once

namespace rgbm {

/// Standard normal CDF via the complementary error function.
/// Absolute error below 1e-15 for |x| <= 8; exact 0/1 in the far tails.
double normal_cdf(double x) noexcept;

double normal_pdf(double x) noexcept;

/// Inverse standard normal CDF for p in (0, 1) (Wichura, AS 241).
/// Relative accuracy about 1e-16 over the whole open interval.
double normal_quantile(double p) noexcept;

}  // namespace rgbm
