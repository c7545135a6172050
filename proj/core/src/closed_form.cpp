#include "rgbm/closed_form.hpp"

#include <cmath>

#include "rgbm/error.hpp"
#include "rgbm/normal.hpp"

namespace rgbm {

const char* to_string(Construction c) noexcept {
  switch (c) {
    case Construction::direct: return "direct";
    case Construction::synthetic: return "synthetic";
    case Construction::black_scholes: return "black_scholes";
    case Construction::bstar: return "bstar";
  }
  return "unknown";
}

const char* to_string(Instrument i) noexcept {
  switch (i) {
    case Instrument::call: return "call";
    case Instrument::put: return "put";
    case Instrument::forward_martingale: return "forward_martingale";
    case Instrument::forward_submartingale: return "forward_submartingale";
    case Instrument::intervention_value: return "intervention_value";
  }
  return "unknown";
}

namespace formula {
namespace {

// Shared pieces of one formula evaluation.
struct Terms {
  AuxQuantities a;
  double vol_sqrt_t = 0.0;
  double disc_q = 0.0;  // e^{-q tau}
  double disc_r = 0.0;  // e^{-r tau}
  double log_b_over_s = 0.0;
  double log_b_over_k = 0.0;
};

Terms terms(const Point& p) noexcept {
  Terms t;
  t.vol_sqrt_t = p.vol * std::sqrt(p.tau);
  t.disc_q = std::exp(-p.yield * p.tau);
  t.disc_r = std::exp(-p.rate * p.tau);
  t.a = aux(p);
  t.log_b_over_s = std::log(p.barrier / p.spot);
  t.log_b_over_k = std::log(p.barrier / p.strike);
  return t;
}

// e^{log_weight} * Phi(z), staying finite when the weight alone would overflow.
double weighted_cdf(double log_weight, double z) noexcept {
  if (log_weight < 600.0) return std::exp(log_weight) * normal_cdf(z);
  const double c = normal_cdf(z);
  return c == 0.0 ? 0.0 : std::exp(log_weight + std::log(c));
}

}  // namespace

AuxQuantities aux(const Point& p) noexcept {
  const double vol_sqrt_t = p.vol * std::sqrt(p.tau);
  const double carry = (p.rate - p.yield + 0.5 * p.vol * p.vol) * p.tau;
  AuxQuantities a;
  a.theta = 2.0 * (p.rate - p.yield) / (p.vol * p.vol);
  a.z1 = (std::log(p.spot / p.strike) + carry) / vol_sqrt_t;
  a.z2 = (std::log(p.barrier * p.barrier / (p.strike * p.spot)) + carry) / vol_sqrt_t;
  a.z3 = (std::log(p.spot / p.barrier) + carry) / vol_sqrt_t;
  a.z4 = (std::log(p.barrier / p.spot) + carry) / vol_sqrt_t;
  return a;
}

double bs_call(const Point& p) noexcept {
  const auto t = terms(p);
  return p.spot * t.disc_q * normal_cdf(t.a.z1) - p.strike * t.disc_r * normal_cdf(t.a.z1 - t.vol_sqrt_t);
}

double bs_put(const Point& p) noexcept {
  const auto t = terms(p);
  return p.strike * t.disc_r * normal_cdf(-t.a.z1 + t.vol_sqrt_t) - p.spot * t.disc_q * normal_cdf(-t.a.z1);
}

double bs_call_delta(const Point& p) noexcept {
  return std::exp(-p.yield * p.tau) * normal_cdf(aux(p).z1);
}

double bs_put_delta(const Point& p) noexcept {
  return -std::exp(-p.yield * p.tau) * normal_cdf(-aux(p).z1);
}

double call_barrier(const Point& p) noexcept {
  if (p.barrier == 0.0) return bs_call(p);
  const auto t = terms(p);
  const double th = t.a.theta;
  const double black_scholes =
      p.spot * t.disc_q * normal_cdf(t.a.z1) - p.strike * t.disc_r * normal_cdf(t.a.z1 - t.vol_sqrt_t);
  const double adjustment =
      p.spot * t.disc_q * weighted_cdf((1.0 + th) * t.log_b_over_s, t.a.z2) -
      p.strike * t.disc_r * weighted_cdf((1.0 - th) * t.log_b_over_k, t.a.z2 - th * t.vol_sqrt_t);
  return black_scholes + adjustment / th;
}

double put_barrier(const Point& p) noexcept {
  if (p.barrier == 0.0) return bs_put(p);
  const auto t = terms(p);
  const double th = t.a.theta;
  const double barrier_cdf = normal_cdf(-t.a.z3 + t.vol_sqrt_t);
  const double lead = p.strike * t.disc_r * normal_cdf(-t.a.z1 + t.vol_sqrt_t) -
                      p.spot * t.disc_q * normal_cdf(-t.a.z1) - p.barrier * t.disc_r * barrier_cdf +
                      p.spot * t.disc_q * normal_cdf(-t.a.z3);
  const double power_s = (1.0 + th) * t.log_b_over_s;
  const double bracket = p.barrier * t.disc_r * barrier_cdf -
                         p.spot * t.disc_q * (weighted_cdf(power_s, t.a.z4) - weighted_cdf(power_s, t.a.z2)) -
                         p.strike * t.disc_r * weighted_cdf((1.0 - th) * t.log_b_over_k, t.a.z2 - th * t.vol_sqrt_t);
  return lead + bracket / th;
}

double call_barrier_delta(const Point& p) noexcept {
  if (p.barrier == 0.0) return bs_call_delta(p);
  const auto t = terms(p);
  return t.disc_q * (normal_cdf(t.a.z1) - weighted_cdf((1.0 + t.a.theta) * t.log_b_over_s, t.a.z2));
}

double put_barrier_delta(const Point& p) noexcept {
  if (p.barrier == 0.0) return bs_put_delta(p);
  const auto t = terms(p);
  const double power_s = (1.0 + t.a.theta) * t.log_b_over_s;
  return t.disc_q * (normal_cdf(t.a.z1) - normal_cdf(t.a.z3) + weighted_cdf(power_s, t.a.z4) -
                     weighted_cdf(power_s, t.a.z2));
}

double forward_submartingale(const Point& p) noexcept {
  return p.spot * std::exp(-p.yield * p.tau) - p.strike * std::exp(-p.rate * p.tau);
}

double forward_martingale(const Point& p) noexcept {
  if (p.barrier == 0.0) return forward_submartingale(p);
  const auto t = terms(p);
  const double th = t.a.theta;
  return p.spot * t.disc_q * normal_cdf(t.a.z3) - p.strike * t.disc_r +
         p.barrier * t.disc_r * (1.0 - 1.0 / th) * normal_cdf(-t.a.z3 + t.vol_sqrt_t) +
         p.spot * t.disc_q * weighted_cdf((1.0 + th) * t.log_b_over_s, t.a.z4) / th;
}

double intervention_value(const Point& p) noexcept {
  if (p.barrier == 0.0) return 0.0;
  Point at_the_money = p;
  at_the_money.strike = p.spot;  // z3, z4 do not involve the strike
  const auto t = terms(at_the_money);
  const double th = t.a.theta;
  return p.barrier * t.disc_r * (1.0 - 1.0 / th) * normal_cdf(-t.a.z3 + t.vol_sqrt_t) -
         p.spot * t.disc_q * normal_cdf(-t.a.z3) +
         p.spot * t.disc_q * weighted_cdf((1.0 + th) * t.log_b_over_s, t.a.z4) / th;
}

double net_delta(const Point& p) noexcept {
  if (p.barrier == 0.0) return 0.0;
  Point at_the_money = p;
  at_the_money.strike = p.spot;
  const auto t = terms(at_the_money);
  return t.disc_q * (normal_cdf(-t.a.z3) + weighted_cdf((1.0 + t.a.theta) * t.log_b_over_s, t.a.z4));
}

}  // namespace formula

namespace {

formula::Point checked_point(const ModelParams& params, const OptionSpec& spec) {
  const auto v = validate(params, spec);
  return formula::Point::from(v.params, v.spec);
}

formula::Point checked_point(const ModelParams& params, double term) {
  const auto p = validate_params(params);
  if (!(term > 0.0)) throw Error(ErrorCode::NonPositiveTerm, "term must be > 0");
  // Strike plays no role in the strike-free formulas.
  return {p.spot, p.barrier, p.spot, p.rate, p.yield, p.vol, term};
}

PriceQuote quote(double value, Construction c, Instrument i) { return {value, c, i}; }

void check_bstar(const ModelParams& params, double bstar) {
  if (!(bstar >= 0.0 && bstar <= params.barrier)) {
    throw Error(ErrorCode::BStarOutOfRange, "bstar must lie in [0, barrier]");
  }
}

template <class F>
double smallest_root(F&& f, const char* what) {
  constexpr int kScan = 400;
  double lo = kVolBracketLow;
  double f_lo = f(lo);
  for (int i = 1; i <= kScan; ++i) {
    const double hi = kVolBracketLow + (kVolBracketHigh - kVolBracketLow) * i / kScan;
    const double f_hi = f(hi);
    if (f_lo < 0.0 && f_hi >= 0.0) {
      double a = lo;
      double b = hi;
      while (b - a > kVolTolerance) {
        const double mid = 0.5 * (a + b);
        if (f(mid) < 0.0) a = mid; else b = mid;
      }
      return 0.5 * (a + b);
    }
    lo = hi;
    f_lo = f_hi;
  }
  throw Error(ErrorCode::NoRootInBracket, what);
}

}  // namespace

PriceQuote bs_call(const ModelParams& params, const OptionSpec& spec) {
  return quote(formula::bs_call(checked_point(params, spec)), Construction::black_scholes, Instrument::call);
}

PriceQuote bs_put(const ModelParams& params, const OptionSpec& spec) {
  return quote(formula::bs_put(checked_point(params, spec)), Construction::black_scholes, Instrument::put);
}

PriceQuote call_barrier(const ModelParams& params, const OptionSpec& spec) {
  return quote(formula::call_barrier(checked_point(params, spec)), Construction::direct, Instrument::call);
}

PriceQuote put_barrier(const ModelParams& params, const OptionSpec& spec) {
  return quote(formula::put_barrier(checked_point(params, spec)), Construction::direct, Instrument::put);
}

double delta_call_barrier(const ModelParams& params, const OptionSpec& spec) {
  return formula::call_barrier_delta(checked_point(params, spec));
}

double delta_put_barrier(const ModelParams& params, const OptionSpec& spec) {
  return formula::put_barrier_delta(checked_point(params, spec));
}

double delta_bstar(const ModelParams& params, const OptionSpec& spec, double bstar) {
  check_bstar(params, bstar);
  auto p = checked_point(params, spec);
  p.barrier = bstar;
  return spec.kind == OptionKind::call ? formula::call_barrier_delta(p) : formula::put_barrier_delta(p);
}

PriceQuote price_bstar(const ModelParams& params, const OptionSpec& spec, double bstar) {
  check_bstar(params, bstar);
  auto p = checked_point(params, spec);
  p.barrier = bstar;
  const bool call = spec.kind == OptionKind::call;
  return quote(call ? formula::call_barrier(p) : formula::put_barrier(p),
               bstar == 0.0 ? Construction::black_scholes : Construction::bstar,
               call ? Instrument::call : Instrument::put);
}

PriceQuote forward_submartingale(const ModelParams& params, const OptionSpec& spec) {
  return quote(formula::forward_submartingale(checked_point(params, spec)), Construction::synthetic,
               Instrument::forward_submartingale);
}

PriceQuote forward_martingale(const ModelParams& params, const OptionSpec& spec) {
  return quote(formula::forward_martingale(checked_point(params, spec)), Construction::direct,
               Instrument::forward_martingale);
}

PriceQuote intervention_value(const ModelParams& params, double term) {
  return quote(formula::intervention_value(checked_point(params, term)), Construction::direct,
               Instrument::intervention_value);
}

PriceQuote synthetic_call(const ModelParams& params, const OptionSpec& spec) {
  const auto p = checked_point(params, spec);
  return quote(formula::forward_submartingale(p) + formula::put_barrier(p), Construction::synthetic,
               Instrument::call);
}

PriceQuote synthetic_put(const ModelParams& params, const OptionSpec& spec) {
  const auto p = checked_point(params, spec);
  return quote(formula::call_barrier(p) - formula::forward_submartingale(p), Construction::synthetic,
               Instrument::put);
}

double net_delta(const ModelParams& params, double term) {
  return formula::net_delta(checked_point(params, term));
}

double vol_threshold_put(const ModelParams& params, const OptionSpec& spec) {
  auto p = checked_point(params, spec);
  const double max_payoff = p.strike - p.barrier;
  return smallest_root(
      [&](double vol) {
        p.vol = vol;
        return formula::call_barrier(p) - formula::forward_submartingale(p) - max_payoff;
      },
      "synthetic put never reaches K - b for vol in (0.01, 2.0)");
}

double vol_threshold_call(const ModelParams& params, const OptionSpec& spec) {
  auto p = checked_point(params, spec);
  return smallest_root(
      [&](double vol) {
        p.vol = vol;
        return formula::call_barrier(p) - p.spot;
      },
      "direct call never reaches spot for vol in (0.01, 2.0)");
}

double real_world_forward_gap(const ModelParams& params, const OptionSpec& spec, double growth) {
  const auto p = checked_point(params, spec);
  return p.spot * std::exp((growth - p.rate) * p.tau) - p.spot * std::exp(-p.yield * p.tau);
}

}  // namespace rgbm
