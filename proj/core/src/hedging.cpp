#include "rgbm/hedging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "rgbm/closed_form.hpp"
#include "rgbm/error.hpp"

namespace rgbm {

namespace {

constexpr std::array<std::pair<StrategyKind, std::string_view>, 10> kStrategyNames = {{
    {StrategyKind::direct_call, "direct_call"},
    {StrategyKind::direct_put, "direct_put"},
    {StrategyKind::synthetic_call, "synthetic_call"},
    {StrategyKind::synthetic_put, "synthetic_put"},
    {StrategyKind::bs_delta_call, "bs_delta_call"},
    {StrategyKind::bs_delta_put, "bs_delta_put"},
    {StrategyKind::bstar_put, "bstar_put"},
    {StrategyKind::forward_static, "forward_static"},
    {StrategyKind::forward_martingale, "forward_martingale"},
    {StrategyKind::net_delta_arb, "net_delta_arb"},
}};

formula::Point point_at(const ModelParams& params, const OptionSpec& spec, double spot, double tau) noexcept {
  return {spot, params.barrier, spec.strike, params.rate, params.yield, params.vol, tau};
}

// Inputs shared by every path of one hedging run.
struct Setup {
  Strategy strategy;
  ModelParams params;
  OptionSpec spec;
  double wealth = 0.0;
  double fixed_target = 0.0;  // net_delta_arb only
};

Setup prepare(const Strategy& strategy, const ModelParams& params, const OptionSpec& spec) {
  const auto inputs = validate(params, spec);
  if (strategy.kind == StrategyKind::bstar_put && !(strategy.bstar >= 0.0 && strategy.bstar <= params.barrier)) {
    throw Error(ErrorCode::BStarOutOfRange, "bstar must lie in [0, barrier]");
  }
  Setup s{strategy, inputs.params, inputs.spec, 0.0, 0.0};
  s.wealth = initial_wealth(strategy, s.params, s.spec);
  if (strategy.kind == StrategyKind::net_delta_arb) {
    s.fixed_target = intervention_value(s.params, s.spec.term).value * std::exp(s.params.rate * s.spec.term);
  }
  return s;
}

double target_for(const Setup& s, double terminal_spot) {
  if (s.strategy.kind == StrategyKind::net_delta_arb) return s.fixed_target;
  return terminal_target(s.strategy, s.params, s.spec, terminal_spot);
}

void check_grid(const OptionSpec& spec, const SimulatedPath& path) {
  if (path.times.size() < 2 || path.observed.size() != path.times.size()) {
    throw Error(ErrorCode::GridMismatch, "hedging needs a path with at least one step");
  }
  if (std::fabs(path.times.back() - spec.term) > 1e-9 * std::max(1.0, spec.term)) {
    throw Error(ErrorCode::GridMismatch, "path horizon differs from the option term");
  }
}

// Walks the self-financing portfolio along the path. visit(i, delta, units,
// cash, value) sees each grid point after any rebalancing.
template <class Visit>
HedgeOutcome hedge_core(const Setup& s, const SimulatedPath& path, Visit&& visit) {
  check_grid(s.spec, path);
  const std::size_t n = path.times.size() - 1;
  const double dt = s.spec.term / static_cast<double>(n);
  const double cash_growth = std::exp(s.params.rate * dt);
  const double income_rate = std::expm1(s.params.yield * dt);

  HedgeOutcome out;
  out.initial_wealth = s.wealth;
  double units = 0.0;
  double cash = s.wealth;
  for (std::size_t i = 0; i <= n; ++i) {
    const double spot = path.observed[i];
    if (i > 0) cash = cash * cash_growth + units * spot * income_rate;
    const double value = units * spot + cash;
    double delta = units;
    if (i < n) {
      const double tau = dt * static_cast<double>(n - i);
      delta = strategy_delta(s.strategy, s.params, s.spec, spot, tau);
      cash -= (delta - units) * spot;
      units = delta;
    }
    out.min_value = i == 0 ? value : std::min(out.min_value, value);
    out.min_cash = i == 0 ? cash : std::min(out.min_cash, cash);
    visit(i, delta, units, cash, value);
    if (i == n) out.terminal_value = value;
  }
  out.target = target_for(s, path.observed[n]);
  out.replication_error = out.terminal_value - out.target;
  return out;
}

HedgeOutcome hedge_core(const Setup& s, const SimulatedPath& path) {
  return hedge_core(s, path, [](std::size_t, double, double, double, double) {});
}

PathConfig real_world(PathConfig config) {
  config.measure = Measure::real_world;
  return config;
}

struct ErrorAccumulator {
  RunningStats error;
  RunningStats min_value;

  void merge(const ErrorAccumulator& other) noexcept {
    error.merge(other.error);
    min_value.merge(other.min_value);
  }
};

template <class T>
struct Collected {
  std::vector<T> items;

  void merge(const Collected& other) { items.insert(items.end(), other.items.begin(), other.items.end()); }
};

}  // namespace

const char* to_string(StrategyKind kind) noexcept {
  for (const auto& [k, name] : kStrategyNames) {
    if (k == kind) return name.data();
  }
  return "unknown";
}

std::optional<StrategyKind> parse_strategy(std::string_view name) noexcept {
  for (const auto& [k, n] : kStrategyNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

double initial_wealth(const Strategy& strategy, const ModelParams& params, const OptionSpec& spec) {
  OptionSpec call = spec;
  call.kind = OptionKind::call;
  OptionSpec put = spec;
  put.kind = OptionKind::put;
  switch (strategy.kind) {
    case StrategyKind::direct_call: return call_barrier(params, call).value;
    case StrategyKind::direct_put: return put_barrier(params, put).value;
    case StrategyKind::synthetic_call: return synthetic_call(params, call).value;
    case StrategyKind::synthetic_put: return synthetic_put(params, put).value;
    case StrategyKind::bs_delta_call: return bs_call(params, call).value;
    case StrategyKind::bs_delta_put: return bs_put(params, put).value;
    case StrategyKind::bstar_put: return price_bstar(params, put, strategy.bstar).value;
    case StrategyKind::forward_static: return forward_submartingale(params, spec).value;
    case StrategyKind::forward_martingale: return forward_martingale(params, spec).value;
    case StrategyKind::net_delta_arb: return 0.0;
  }
  return 0.0;
}

double strategy_delta(const Strategy& strategy, const ModelParams& params, const OptionSpec& spec, double spot,
                      double tau) noexcept {
  auto p = point_at(params, spec, spot, tau);
  const double carry = std::exp(-params.yield * tau);
  switch (strategy.kind) {
    case StrategyKind::direct_call: return formula::call_barrier_delta(p);
    case StrategyKind::direct_put: return formula::put_barrier_delta(p);
    case StrategyKind::synthetic_call: return carry + formula::put_barrier_delta(p);
    case StrategyKind::synthetic_put: return formula::call_barrier_delta(p) - carry;
    case StrategyKind::bs_delta_call: return formula::bs_call_delta(p);
    case StrategyKind::bs_delta_put: return formula::bs_put_delta(p);
    case StrategyKind::bstar_put:
      p.barrier = strategy.bstar;
      return formula::put_barrier_delta(p);
    case StrategyKind::forward_static: return carry;
    case StrategyKind::forward_martingale: return formula::call_barrier_delta(p) - formula::put_barrier_delta(p);
    case StrategyKind::net_delta_arb: return formula::net_delta(p);
  }
  return 0.0;
}

double terminal_target(const Strategy& strategy, const ModelParams& params, const OptionSpec& spec,
                       double terminal_spot) {
  switch (strategy.kind) {
    case StrategyKind::direct_call:
    case StrategyKind::synthetic_call:
    case StrategyKind::bs_delta_call: return std::max(terminal_spot - spec.strike, 0.0);
    case StrategyKind::direct_put:
    case StrategyKind::synthetic_put:
    case StrategyKind::bs_delta_put:
    case StrategyKind::bstar_put: return std::max(spec.strike - terminal_spot, 0.0);
    case StrategyKind::forward_static:
    case StrategyKind::forward_martingale: return terminal_spot - spec.strike;
    case StrategyKind::net_delta_arb:
      return intervention_value(params, spec.term).value * std::exp(params.rate * spec.term);
  }
  return 0.0;
}

HedgeLedger run_hedge(const Strategy& strategy, const ModelParams& params, const OptionSpec& spec,
                      const SimulatedPath& path) {
  const Setup s = prepare(strategy, params, spec);
  check_grid(s.spec, path);
  HedgeLedger ledger;
  ledger.times = path.times;
  ledger.spot = path.observed;
  const std::size_t n = path.times.size();
  ledger.deltas.reserve(n);
  ledger.units.reserve(n);
  ledger.cash.reserve(n);
  ledger.value.reserve(n);
  const auto out = hedge_core(s, path, [&](std::size_t, double delta, double units, double cash, double value) {
    ledger.deltas.push_back(delta);
    ledger.units.push_back(units);
    ledger.cash.push_back(cash);
    ledger.value.push_back(value);
  });
  ledger.initial_wealth = out.initial_wealth;
  ledger.target = out.target;
  ledger.replication_error = out.replication_error;
  return ledger;
}

HedgeOutcome hedge_outcome(const Strategy& strategy, const ModelParams& params, const OptionSpec& spec,
                           const SimulatedPath& path) {
  return hedge_core(prepare(strategy, params, spec), path);
}

ReplicationStats replication_stats(const Strategy& strategy, const ModelParams& params, const OptionSpec& spec,
                                   const PathConfig& config, std::size_t n_paths) {
  const Setup s = prepare(strategy, params, spec);
  const PathConfig paths = real_world(config);
  paths.validate();
  if (std::fabs(paths.horizon - s.spec.term) > 1e-9 * std::max(1.0, s.spec.term)) {
    throw Error(ErrorCode::GridMismatch, "path horizon differs from the option term");
  }
  const auto acc = reduce_paths<ErrorAccumulator>(n_paths, paths.workers, [&](std::size_t i, auto& a) {
    const auto out = hedge_core(s, simulate_path(s.params, paths, i));
    a.error.add(out.replication_error);
    a.min_value.add(out.min_value);
  });
  ReplicationStats stats;
  stats.error = acc.error;
  stats.min_value = acc.min_value;
  stats.initial_wealth = s.wealth;
  stats.sd_ci = sd_interval_95(acc.error.sd(), acc.error.count());
  return stats;
}

ConvergenceReport replication_convergence_study(const Strategy& strategy, const ModelParams& params,
                                                const OptionSpec& spec, const PathConfig& config,
                                                const std::vector<std::size_t>& step_ladder, std::size_t n_paths) {
  check_ladder(step_ladder);
  ConvergenceReport report;
  report.statistic = "replication_error_sd";
  report.fit_on = "replication_error_sd";
  bool rounding_only = true;
  for (std::size_t steps : step_ladder) {
    PathConfig rung = config;
    rung.n_steps = steps;
    const auto stats = replication_stats(strategy, params, spec, rung, n_paths);
    const double sd = stats.error.sd();
    report.points.push_back({steps, sd, stats.sd_ci.lo, stats.sd_ci.hi, sd});
    rounding_only = rounding_only && sd < kRoundingLevelSd;
  }
  if (rounding_only) {
    report.note = "replication errors at rounding level; slope not fitted";
  } else {
    fit_convergence_slope(report);
  }
  return report;
}

ILRStats ilr_study(const ModelParams& params, const OptionSpec& spec, const PathConfig& config,
                   std::size_t n_paths, double cte_level) {
  const Setup s = prepare({StrategyKind::synthetic_call, 0.0}, params, spec);
  OptionSpec call = s.spec;
  call.kind = OptionKind::call;
  const double denominator = call_barrier(s.params, call).value - s.wealth;
  if (!(denominator >= 1e-12)) {
    throw Error(ErrorCode::DegenerateDenominator, "C_B - sC_B below 1e-12");
  }
  const PathConfig paths = real_world(config);
  paths.validate();
  const double dt = s.spec.term / static_cast<double>(paths.n_steps);
  const double rate = s.params.rate;

  const auto ratios = reduce_paths<Collected<double>>(n_paths, paths.workers, [&](std::size_t i, auto& a) {
    double worst = std::numeric_limits<double>::infinity();
    hedge_core(s, simulate_path(s.params, paths, i), [&](std::size_t k, double, double, double, double value) {
      const double rolled = denominator * std::exp(rate * dt * static_cast<double>(k));
      worst = std::min(worst, value / rolled);
    });
    a.items.push_back(worst);
  });

  ILRStats stats;
  stats.ilr_per_path = ratios.items;
  stats.cte_level = cte_level;
  stats.denominator = denominator;
  if (!stats.ilr_per_path.empty()) {
    stats.cte_value = lower_tail_mean(stats.ilr_per_path, cte_level);
    const auto below = std::count_if(stats.ilr_per_path.begin(), stats.ilr_per_path.end(),
                                     [](double v) { return v < -1.0; });
    stats.frac_below_minus_one = static_cast<double>(below) / static_cast<double>(stats.ilr_per_path.size());
  }
  return stats;
}

double DrawdownStats::fraction_borrowing_above(double multiple) const noexcept {
  if (borrowing_multiple.empty()) return 0.0;
  const auto n = std::count_if(borrowing_multiple.begin(), borrowing_multiple.end(),
                               [multiple](double m) { return m > multiple; });
  return static_cast<double>(n) / static_cast<double>(borrowing_multiple.size());
}

DrawdownStats net_delta_study(const ModelParams& params, double term, const PathConfig& config,
                              std::size_t n_paths) {
  OptionSpec spec;
  spec.term = term;
  spec.strike = params.spot;
  const Setup s = prepare({StrategyKind::net_delta_arb, 0.0}, params, spec);
  PathConfig paths = real_world(config);
  paths.horizon = term;
  paths.validate();

  const auto outcomes = reduce_paths<Collected<HedgeOutcome>>(n_paths, paths.workers, [&](std::size_t i, auto& a) {
    a.items.push_back(hedge_core(s, simulate_path(s.params, paths, i)));
  });

  DrawdownStats stats;
  stats.target_gain = s.fixed_target;
  for (const auto& out : outcomes.items) {
    stats.terminal_gain.push_back(out.terminal_value);
    stats.borrowing_multiple.push_back(-out.min_cash / s.fixed_target);
    stats.loss_multiple.push_back(-out.min_value / s.fixed_target);
  }
  stats.terminal_gain_summary = summarize(stats.terminal_gain);
  stats.borrowing_summary = summarize(stats.borrowing_multiple);
  stats.loss_summary = summarize(stats.loss_multiple);
  return stats;
}

void write_ledger_csv_header(std::ostream& out) { out << "path,step,t,S,delta,units,cash,value\n"; }

void write_ledger_csv(std::ostream& out, std::size_t path_index, const HedgeLedger& ledger) {
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < ledger.times.size(); ++i) {
    out << path_index << ',' << i << ',' << ledger.times[i] << ',' << ledger.spot[i] << ',' << ledger.deltas[i]
        << ',' << ledger.units[i] << ',' << ledger.cash[i] << ',' << ledger.value[i] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace rgbm
