#include "rgbm/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "rgbm/error.hpp"

namespace rgbm {

void RunningStats::add(double x) noexcept {
  if (n_ == 0) {
    min_ = max_ = x;
  } else {
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) noexcept {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
  min_ = std::min(min_, other.min_);
  max_ = std::max(max_, other.max_);
}

double RunningStats::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningStats::sd() const noexcept { return std::sqrt(variance()); }

double RunningStats::std_error() const noexcept {
  return n_ > 0 ? sd() / std::sqrt(static_cast<double>(n_)) : 0.0;
}

double sorted_quantile(std::span<const double> sorted, double p) noexcept {
  if (sorted.empty()) return 0.0;
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  RunningStats acc;
  for (double v : values) acc.add(v);
  std::sort(values.begin(), values.end());
  s.mean = acc.mean();
  s.sd = acc.sd();
  s.min = values.front();
  s.max = values.back();
  s.p10 = sorted_quantile(values, 0.10);
  s.p25 = sorted_quantile(values, 0.25);
  s.median = sorted_quantile(values, 0.50);
  s.p75 = sorted_quantile(values, 0.75);
  s.p90 = sorted_quantile(values, 0.90);
  return s;
}

double lower_tail_mean(std::vector<double> values, double level) {
  if (values.empty()) throw Error(ErrorCode::InvalidConfig, "tail mean of an empty sample");
  if (!(level > 0.0 && level <= 1.0)) throw Error(ErrorCode::InvalidConfig, "tail level must lie in (0, 1]");
  const auto k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(level * static_cast<double>(values.size()))), 1, values.size());
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end());
  std::sort(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k));
  return std::accumulate(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
         static_cast<double>(k);
}

double t_critical_95(std::size_t dof) noexcept {
  static constexpr std::array<double, 30> table = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160, 2.145, 2.131,
      2.120,  2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof == 0) return std::numeric_limits<double>::infinity();
  if (dof <= table.size()) return table[dof - 1];
  return 1.959964 + 2.4 / static_cast<double>(dof);
}

Interval sd_interval_95(double sd, std::size_t n) noexcept {
  if (n < 2) return {0.0, std::numeric_limits<double>::infinity()};
  const double k = static_cast<double>(n - 1);
  auto chi2 = [k](double z) {
    const double c = 2.0 / (9.0 * k);
    const double t = 1.0 - c + z * std::sqrt(c);
    return k * t * t * t;
  };
  constexpr double z = 1.959963984540054;
  return {sd * std::sqrt(k / chi2(z)), sd * std::sqrt(k / chi2(-z))};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::SlopeUndefined, "a slope needs at least two points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::SlopeUndefined, "all x values coincide");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      sse += r * r;
    }
    fit.slope_se = std::sqrt(sse / (n - 2.0) / sxx);
  }
  if (x.size() == 2) {
    // An exact fit through two points carries no residual information.
    fit.slope_ci = {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  } else {
    const double half = t_critical_95(x.size() - 2) * fit.slope_se;
    fit.slope_ci = {fit.slope - half, fit.slope + half};
  }
  return fit;
}

}  // namespace rgbm
