#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rgbm/model_params.hpp"
#include "rgbm/path_engine.hpp"
#include "rgbm/stats.hpp"

namespace rgbm {

struct PricingResult {
  double mean = 0.0;       // discounted mean payoff
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::optional<double> analytic;
  std::optional<double> z_score;  // (mean - analytic) / std_error
};

struct CallPutResult {
  PricingResult call;
  PricingResult put;
  /// Mean discounted S_T - K over the same paths; equals call.mean - put.mean
  /// up to summation rounding.
  double forward_mean = 0.0;
};

/// Discounted mean payoff on observed terminal prices. The config must be
/// risk-neutral and its horizon must equal the option term.
PricingResult mc_price(const ModelParams& params, const OptionSpec& spec, const PathConfig& config,
                       std::size_t n_paths);

/// Call and put priced on one set of paths.
CallPutResult mc_price_call_put(const ModelParams& params, const OptionSpec& spec, const PathConfig& config,
                                std::size_t n_paths);

struct ConvergencePoint {
  std::size_t n = 0;
  double stat = 0.0;
  double stat_lo = 0.0;
  double stat_hi = 0.0;
  double fit_value = 0.0;  // quantity entering the log-log regression
};

struct ConvergenceReport {
  std::string statistic;   // what `stat` measures
  std::string fit_on;      // what `fit_value` measures
  std::vector<ConvergencePoint> points;
  bool slope_fitted = false;
  double fitted_slope = 0.0;
  Interval slope_ci;
  std::string note;

  std::vector<std::size_t> ladder() const;
};

/// Fits log(fit_value) on log(n); throws SlopeUndefined below two points.
void fit_convergence_slope(ConvergenceReport& report);

/// Pricing error versus number of paths at fixed n_steps. Rung N uses paths
/// 0..N-1, so rungs are nested. stat is the mean pricing error with its 95%
/// interval; the slope is fitted on the interval half-width.
ConvergenceReport pricing_convergence_study(const ModelParams& params, const OptionSpec& spec,
                                            const PathConfig& config, const std::vector<std::size_t>& ladder);

/// Checks that a ladder is strictly increasing with at least two rungs.
void check_ladder(const std::vector<std::size_t>& ladder);

/// CSV header `n,stat,stat_lo,stat_hi`.
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

}  // namespace rgbm
