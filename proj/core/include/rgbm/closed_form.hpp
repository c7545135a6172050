#pragma once

#include "rgbm/model_params.hpp"

namespace rgbm {

enum class Construction { direct, synthetic, black_scholes, bstar };
enum class Instrument { call, put, forward_martingale, forward_submartingale, intervention_value };

struct PriceQuote {
  double value = 0.0;
  Construction construction = Construction::direct;
  Instrument instrument = Instrument::call;
};

const char* to_string(Construction c) noexcept;
const char* to_string(Instrument i) noexcept;

// Unchecked formula kernels. Callers guarantee spot >= barrier >= 0, vol > 0,
// tau > 0 and |rate - yield| >= 1e-12 (validate() enforces all of these).
// Hedging evaluates them at interim times and at spot == barrier, which the
// public, validated entry points below would reject.
namespace formula {

struct Point {
  double spot = 1.0;
  double barrier = 0.0;
  double strike = 1.0;
  double rate = 0.0;
  double yield = 0.0;
  double vol = 0.0;
  double tau = 0.0;  // time to maturity

  static Point from(const ModelParams& params, const OptionSpec& spec) noexcept {
    return {params.spot, params.barrier, spec.strike, params.rate, params.yield, params.vol, spec.term};
  }
};

AuxQuantities aux(const Point& p) noexcept;

double bs_call(const Point& p) noexcept;
double bs_put(const Point& p) noexcept;
double bs_call_delta(const Point& p) noexcept;
double bs_put_delta(const Point& p) noexcept;

double call_barrier(const Point& p) noexcept;
double put_barrier(const Point& p) noexcept;
double call_barrier_delta(const Point& p) noexcept;
double put_barrier_delta(const Point& p) noexcept;

double forward_submartingale(const Point& p) noexcept;
/// Closed form for C_B - P_B, evaluated directly (not by differencing).
double forward_martingale(const Point& p) noexcept;
/// F_B - sF_B; strike is ignored.
double intervention_value(const Point& p) noexcept;
/// d/dS of (sF_B - F_B); strike is ignored.
double net_delta(const Point& p) noexcept;

}  // namespace formula

// Validated entry points. All of them throw rgbm::Error on invalid input.
// The option kind in `spec` is ignored wherever the function name already
// fixes the instrument.

PriceQuote bs_call(const ModelParams& params, const OptionSpec& spec);
PriceQuote bs_put(const ModelParams& params, const OptionSpec& spec);

PriceQuote call_barrier(const ModelParams& params, const OptionSpec& spec);  // C_B
PriceQuote put_barrier(const ModelParams& params, const OptionSpec& spec);   // P_B

double delta_call_barrier(const ModelParams& params, const OptionSpec& spec);
double delta_put_barrier(const ModelParams& params, const OptionSpec& spec);

/// Barrier-model delta computed with an assumed barrier bstar in [0, b].
/// bstar = 0 gives the Black-Scholes delta; bstar = b the barrier delta.
double delta_bstar(const ModelParams& params, const OptionSpec& spec, double bstar);

/// Option price computed with an assumed barrier bstar in [0, b]; this is the
/// initial wealth of the matching bstar replication strategy.
PriceQuote price_bstar(const ModelParams& params, const OptionSpec& spec, double bstar);

PriceQuote forward_submartingale(const ModelParams& params, const OptionSpec& spec);  // sF_B
PriceQuote forward_martingale(const ModelParams& params, const OptionSpec& spec);     // F_B
PriceQuote intervention_value(const ModelParams& params, double term);                // F_B - sF_B

PriceQuote synthetic_call(const ModelParams& params, const OptionSpec& spec);  // sF_B + P_B
PriceQuote synthetic_put(const ModelParams& params, const OptionSpec& spec);   // C_B - sF_B

/// Long-only position extracting the intervention value.
double net_delta(const ModelParams& params, double term);

/// Search bracket and tolerance for the volatility thresholds.
inline constexpr double kVolBracketLow = 0.01;
inline constexpr double kVolBracketHigh = 2.0;
inline constexpr double kVolTolerance = 1e-9;

/// Smallest vol at which the synthetic put reaches the maximum payoff K - b.
double vol_threshold_put(const ModelParams& params, const OptionSpec& spec);
/// Smallest vol at which the direct call reaches the spot price.
double vol_threshold_call(const ModelParams& params, const OptionSpec& spec);

/// Present value of the gap between a real-world forward S e^{gT} and the
/// no-arbitrage forward S e^{(r-q)T}.
double real_world_forward_gap(const ModelParams& params, const OptionSpec& spec, double growth);

}  // namespace rgbm
