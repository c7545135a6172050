#include "rgbm/mc_pricer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rgbm/closed_form.hpp"
#include "rgbm/error.hpp"

namespace rgbm {

namespace {

constexpr double kZ95 = 1.959963984540054;

void check_pricing_config(const OptionSpec& spec, const PathConfig& config) {
  if (config.measure != Measure::risk_neutral) {
    throw Error(ErrorCode::MeasureMismatch, "Monte Carlo pricing needs risk-neutral paths");
  }
  config.validate();
  if (std::fabs(config.horizon - spec.term) > 1e-12 * std::max(1.0, spec.term)) {
    throw Error(ErrorCode::GridMismatch, "path horizon differs from the option term");
  }
}

double payoff(OptionKind kind, double terminal, double strike) noexcept {
  return kind == OptionKind::call ? std::max(terminal - strike, 0.0) : std::max(strike - terminal, 0.0);
}

double closed_form_price(const ModelParams& params, const OptionSpec& spec) {
  return spec.kind == OptionKind::call ? call_barrier(params, spec).value : put_barrier(params, spec).value;
}

PricingResult make_result(const RunningStats& stats, double analytic) {
  PricingResult r;
  r.mean = stats.mean();
  r.std_error = stats.std_error();
  r.n_paths = stats.count();
  r.analytic = analytic;
  if (r.std_error > 0.0) r.z_score = (r.mean - analytic) / r.std_error;
  else if (r.mean == analytic) r.z_score = 0.0;
  else r.z_score = std::copysign(std::numeric_limits<double>::infinity(), r.mean - analytic);
  return r;
}

struct CallPutAccumulator {
  RunningStats call;
  RunningStats put;
  RunningStats forward;

  void merge(const CallPutAccumulator& other) noexcept {
    call.merge(other.call);
    put.merge(other.put);
    forward.merge(other.forward);
  }
};

struct PayoffSample {
  std::vector<double> values;

  void merge(const PayoffSample& other) { values.insert(values.end(), other.values.begin(), other.values.end()); }
};

}  // namespace

PricingResult mc_price(const ModelParams& params, const OptionSpec& spec, const PathConfig& config,
                       std::size_t n_paths) {
  const auto res = mc_price_call_put(params, spec, config, n_paths);
  return spec.kind == OptionKind::call ? res.call : res.put;
}

CallPutResult mc_price_call_put(const ModelParams& params, const OptionSpec& spec, const PathConfig& config,
                                std::size_t n_paths) {
  check_pricing_config(spec, config);
  const auto inputs = validate(params, spec);
  const StepModel model = StepModel::gbm(inputs.params, config);
  const double discount = std::exp(-inputs.params.rate * spec.term);

  const auto acc = reduce_paths<CallPutAccumulator>(n_paths, config.workers, [&](std::size_t i, auto& a) {
    const double s = simulate_terminal(inputs.params, model, config, i).observed;
    a.call.add(discount * payoff(OptionKind::call, s, spec.strike));
    a.put.add(discount * payoff(OptionKind::put, s, spec.strike));
    a.forward.add(discount * (s - spec.strike));
  });

  CallPutResult out;
  out.call = make_result(acc.call, call_barrier(inputs.params, spec).value);
  out.put = make_result(acc.put, put_barrier(inputs.params, spec).value);
  out.forward_mean = acc.forward.mean();
  return out;
}

std::vector<std::size_t> ConvergenceReport::ladder() const {
  std::vector<std::size_t> out;
  for (const auto& p : points) out.push_back(p.n);
  return out;
}

void check_ladder(const std::vector<std::size_t>& ladder) {
  if (ladder.size() < 2) throw Error(ErrorCode::SlopeUndefined, "a convergence ladder needs at least two rungs");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] == 0 || (i > 0 && ladder[i] <= ladder[i - 1])) {
      throw Error(ErrorCode::InvalidLadder, "ladder must be positive and strictly increasing");
    }
  }
}

void fit_convergence_slope(ConvergenceReport& report) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : report.points) {
    x.push_back(std::log(static_cast<double>(p.n)));
    y.push_back(std::log(p.fit_value));
  }
  const LineFit fit = fit_line(x, y);
  report.fitted_slope = fit.slope;
  report.slope_ci = fit.slope_ci;
  report.slope_fitted = true;
}

ConvergenceReport pricing_convergence_study(const ModelParams& params, const OptionSpec& spec,
                                            const PathConfig& config, const std::vector<std::size_t>& ladder) {
  check_ladder(ladder);
  check_pricing_config(spec, config);
  const auto inputs = validate(params, spec);
  const StepModel model = StepModel::gbm(inputs.params, config);
  const double discount = std::exp(-inputs.params.rate * spec.term);
  const double analytic = closed_form_price(inputs.params, spec);

  const auto sample = reduce_paths<PayoffSample>(ladder.back(), config.workers, [&](std::size_t i, auto& a) {
    const double s = simulate_terminal(inputs.params, model, config, i).observed;
    a.values.push_back(discount * payoff(spec.kind, s, spec.strike));
  });

  ConvergenceReport report;
  report.statistic = "mean_pricing_error";
  report.fit_on = "ci_half_width";
  RunningStats running;
  std::size_t next = 0;
  for (std::size_t n : ladder) {
    for (; next < n; ++next) running.add(sample.values[next]);
    const double error = running.mean() - analytic;
    const double half = kZ95 * running.std_error();
    report.points.push_back({n, error, error - half, error + half, half});
  }
  fit_convergence_slope(report);
  return report;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  const auto old_precision = out.precision(17);
  out << "n,stat,stat_lo,stat_hi\n";
  for (const auto& p : report.points) out << p.n << ',' << p.stat << ',' << p.stat_lo << ',' << p.stat_hi << '\n';
  out.precision(old_precision);
}

}  // namespace rgbm
