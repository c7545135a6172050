#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "rgbm/mc_pricer.hpp"
#include "rgbm/model_params.hpp"
#include "rgbm/path_engine.hpp"
#include "rgbm/stats.hpp"

namespace rgbm {

enum class StrategyKind {
  direct_call,
  direct_put,
  synthetic_call,
  synthetic_put,
  bs_delta_call,
  bs_delta_put,
  bstar_put,
  forward_static,
  forward_martingale,
  net_delta_arb,
};

const char* to_string(StrategyKind kind) noexcept;
std::optional<StrategyKind> parse_strategy(std::string_view name) noexcept;

struct Strategy {
  StrategyKind kind = StrategyKind::direct_put;
  double bstar = 0.0;  // assumed barrier, bstar_put only

  static Strategy bstar_put(double bstar) { return {StrategyKind::bstar_put, bstar}; }
};

/// Formula price of the strategy at inception; zero for net_delta_arb.
double initial_wealth(const Strategy& strategy, const ModelParams& params, const OptionSpec& spec);

/// Units of the asset held at observed price `spot` with `tau` years left.
double strategy_delta(const Strategy& strategy, const ModelParams& params, const OptionSpec& spec, double spot,
                      double tau) noexcept;

/// Terminal amount the strategy aims to deliver: the option payoff, S_T - K
/// for the forwards, and intervention_value * e^{rT} for net_delta_arb.
double terminal_target(const Strategy& strategy, const ModelParams& params, const OptionSpec& spec,
                       double terminal_spot);

/// Self-financing portfolio rebalanced at every grid point. Between grid
/// points cash accrues at e^{r dt} and the held units pay their yield,
/// units * S * (e^{q dt} - 1), into cash.
struct HedgeLedger {
  std::vector<double> times;
  std::vector<double> spot;
  std::vector<double> deltas;  // delta set at each grid point; at maturity the units carried in
  std::vector<double> units;   // units held after rebalancing
  std::vector<double> cash;
  std::vector<double> value;   // units * S + cash, before rebalancing
  double initial_wealth = 0.0;
  double target = 0.0;
  double replication_error = 0.0;
};

/// Throws GridMismatch when the path does not end at the option term.
HedgeLedger run_hedge(const Strategy& strategy, const ModelParams& params, const OptionSpec& spec,
                      const SimulatedPath& path);

/// Path-level outcome without the per-step vectors.
struct HedgeOutcome {
  double initial_wealth = 0.0;
  double terminal_value = 0.0;
  double target = 0.0;
  double replication_error = 0.0;
  double min_value = 0.0;
  double min_cash = 0.0;
};

HedgeOutcome hedge_outcome(const Strategy& strategy, const ModelParams& params, const OptionSpec& spec,
                           const SimulatedPath& path);

/// Replication-error statistics of one strategy over paths 0..n_paths-1.
struct ReplicationStats {
  RunningStats error;
  RunningStats min_value;
  double initial_wealth = 0.0;
  Interval sd_ci;  // 95% interval for the error SD
};

/// Hedges real-world paths generated from `config`, whose horizon must equal
/// the option term.
ReplicationStats replication_stats(const Strategy& strategy, const ModelParams& params, const OptionSpec& spec,
                                   const PathConfig& config, std::size_t n_paths);

/// Below this SD the errors are pure rounding and no slope is fitted.
inline constexpr double kRoundingLevelSd = 1e-10;

/// SD of the replication error versus n_steps (fixed path count, real-world
/// drift `params.drift`). stat is the SD with its 95% interval.
ConvergenceReport replication_convergence_study(const Strategy& strategy, const ModelParams& params,
                                                const OptionSpec& spec, const PathConfig& config,
                                                const std::vector<std::size_t>& step_ladder, std::size_t n_paths);

struct ILRStats {
  std::vector<double> ilr_per_path;
  double cte_level = 0.25;
  double cte_value = 0.0;
  double frac_below_minus_one = 0.0;
  double denominator = 0.0;  // C_B - sC_B
};

/// Interim loss ratio of the synthetic call: per path the minimum over grid
/// points (including t = 0) of V_t / ((C_B - sC_B) e^{rt}).
ILRStats ilr_study(const ModelParams& params, const OptionSpec& spec, const PathConfig& config,
                   std::size_t n_paths, double cte_level);

struct DrawdownStats {
  double target_gain = 0.0;                // intervention_value * e^{rT}
  std::vector<double> terminal_gain;
  std::vector<double> borrowing_multiple;  // -min(cash) / target_gain
  std::vector<double> loss_multiple;       // -min(value) / target_gain
  Summary terminal_gain_summary;
  Summary borrowing_summary;
  Summary loss_summary;

  double fraction_borrowing_above(double multiple) const noexcept;
};

/// Net-delta arbitrage from zero wealth on real-world paths.
DrawdownStats net_delta_study(const ModelParams& params, double term, const PathConfig& config,
                              std::size_t n_paths);

/// CSV header `path,step,t,S,delta,units,cash,value`.
void write_ledger_csv_header(std::ostream& out);
void write_ledger_csv(std::ostream& out, std::size_t path_index, const HedgeLedger& ledger);

}  // namespace rgbm
