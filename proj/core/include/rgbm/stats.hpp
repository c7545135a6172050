#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rgbm {

/// Streaming mean and variance (Welford update, Chan merge).
class RunningStats {
 public:
  void add(double x) noexcept;
  void merge(const RunningStats& other) noexcept;

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const noexcept;
  double sd() const noexcept;
  double std_error() const noexcept;
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double p10 = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
  double p90 = 0.0;
  double max = 0.0;
};

/// Linear-interpolated quantile of already sorted data, p in [0, 1].
double sorted_quantile(std::span<const double> sorted, double p) noexcept;

Summary summarize(std::vector<double> values);

/// Mean of the lowest round(level * n) values (at least one).
double lower_tail_mean(std::vector<double> values, double level);

/// Two-sided 95% Student-t critical value.
double t_critical_95(std::size_t dof) noexcept;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool overlaps(const Interval& other) const noexcept { return lo <= other.hi && other.lo <= hi; }
};

/// 95% interval for a population SD from a sample SD over n draws
/// (chi-square with Wilson-Hilferty quantiles).
Interval sd_interval_95(double sd, std::size_t n) noexcept;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  Interval slope_ci;
};

/// Ordinary least squares of y on x; needs at least two distinct x values.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace rgbm
