#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rgbm/closed_form.hpp"
#include "rgbm/error.hpp"
#include "rgbm/model_params.hpp"
#include "rgbm/normal.hpp"

namespace {

using namespace rgbm;

ModelParams base() { return reference_params(); }
OptionSpec put_spec(double strike = 1.0, double term = 25.0) { return {OptionKind::put, strike, term}; }
OptionSpec call_spec(double strike = 1.0, double term = 25.0) { return {OptionKind::call, strike, term}; }

template <class F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected rgbm::Error";
  return ErrorCode::InvalidConfig;
}

// ---- validation and auxiliary quantities ----

TEST(Validate, ReferenceScenarioIsValid) {
  const auto v = validate(base(), put_spec());
  EXPECT_TRUE(v.diagnostics.empty());
  EXPECT_EQ(v.params.barrier, 0.5);
  EXPECT_EQ(v.spec.strike, 1.0);
}

TEST(Validate, RejectsBadInputs) {
  auto p = base();
  p.barrier = 1.2;
  EXPECT_EQ(error_of([&] { validate(p, put_spec()); }), ErrorCode::BarrierAboveSpot);
  EXPECT_EQ(error_of([&] { validate(base(), put_spec(0.4)); }), ErrorCode::BarrierAboveStrike);
  p = base();
  p.vol = 0.0;
  EXPECT_EQ(error_of([&] { validate(p, put_spec()); }), ErrorCode::NonPositiveVol);
  EXPECT_EQ(error_of([&] { validate(base(), put_spec(1.0, 0.0)); }), ErrorCode::NonPositiveTerm);
  p = base();
  p.spot = -1.0;
  EXPECT_EQ(error_of([&] { validate(p, put_spec()); }), ErrorCode::NonPositiveSpot);
  p = base();
  p.barrier = -0.1;
  EXPECT_EQ(error_of([&] { validate(p, put_spec()); }), ErrorCode::NegativeBarrier);
}

TEST(Validate, RateYieldGuard) {
  auto p = base();
  p.yield = p.rate;
  EXPECT_EQ(error_of([&] { validate(p, put_spec(), DegeneracyPolicy::reject); }), ErrorCode::RateYieldDegeneracy);

  const auto v = validate(p, put_spec());
  ASSERT_EQ(v.diagnostics.size(), 1u);
  EXPECT_NEAR(std::fabs(v.params.yield - p.rate), 1e-10, 1e-16);

  p.yield = p.rate - 1e-11;  // outside the guard: untouched
  EXPECT_EQ(validate(p, put_spec()).params.yield, p.yield);
  EXPECT_TRUE(validate(p, put_spec()).diagnostics.empty());
}

TEST(Validate, DegenerateRatesStillPriceSmoothly) {
  auto p = base();
  p.yield = p.rate;
  auto q = p;
  q.yield = p.rate + 1e-7;
  EXPECT_NEAR(put_barrier(p, put_spec()).value, put_barrier(q, put_spec()).value, 1e-6);
}

TEST(AuxQuantities, ReferenceTheta) {
  const auto a = aux_quantities(base(), put_spec());
  EXPECT_NEAR(a.theta, 2.0 * 0.005 / 0.0169, 1e-15);
  EXPECT_NEAR(a.theta, 0.591716, 5e-7);
}

TEST(AuxQuantities, Identities) {
  const auto p = base();
  const auto a = aux_quantities(p, put_spec());
  const double vst = p.vol * 5.0;
  EXPECT_NEAR(a.z1, (p.rate - p.yield + 0.5 * p.vol * p.vol) * 25.0 / vst, 1e-14);
  EXPECT_NEAR(a.z3 - a.z4, 2.0 * std::log(p.spot / p.barrier) / vst, 1e-14);
  EXPECT_GT(a.z3, a.z4);

  auto at_barrier = p;
  at_barrier.barrier = p.spot * (1.0 - 1e-15);
  const auto b = aux_quantities(at_barrier, put_spec());
  EXPECT_NEAR(b.z3, b.z4, 1e-13);
}

TEST(AuxQuantities, Pure) {
  const auto a = aux_quantities(base(), put_spec());
  const auto b = aux_quantities(base(), put_spec());
  EXPECT_EQ(a.z1, b.z1);
  EXPECT_EQ(a.z2, b.z2);
  EXPECT_EQ(a.z3, b.z3);
  EXPECT_EQ(a.z4, b.z4);
}

// ---- Black-Scholes references ----

TEST(BlackScholes, ParityAtReference) {
  const double parity = bs_call(base(), call_spec()).value - bs_put(base(), put_spec()).value;
  EXPECT_NEAR(parity, std::exp(-0.25) - std::exp(-0.375), 1e-14);
  EXPECT_NEAR(parity, 0.091512, 5e-7);
}

TEST(BlackScholes, DeterministicLimit) {
  auto p = base();
  p.vol = 1e-12;
  const double forward = std::exp((p.rate - p.yield) * 25.0);
  EXPECT_NEAR(bs_call(p, call_spec()).value, std::exp(-p.rate * 25.0) * (forward - 1.0), 1e-12);
}

// ---- barrier prices ----

TEST(BarrierPrices, IndependentReferenceValues) {
  // Separate numpy/scipy evaluation of the same closed forms.
  EXPECT_NEAR(call_barrier(base(), call_spec()).value, 0.2391499, 5e-8);
  EXPECT_NEAR(put_barrier(base(), put_spec()).value, 0.1060127, 5e-8);
}

TEST(BarrierPrices, ZeroBarrierIsBlackScholes) {
  auto p = base();
  p.barrier = 0.0;
  EXPECT_NEAR(call_barrier(p, call_spec()).value, bs_call(p, call_spec()).value, 1e-12);
  EXPECT_NEAR(put_barrier(p, put_spec()).value, bs_put(p, put_spec()).value, 1e-12);
}

TEST(BarrierPrices, BoundsAndOrderings) {
  const auto p = base();
  const double cb = call_barrier(p, call_spec()).value;
  const double pb = put_barrier(p, put_spec()).value;
  EXPECT_GT(cb, bs_call(p, call_spec()).value);
  EXPECT_LT(pb, bs_put(p, put_spec()).value);
  EXPECT_GE(pb, 0.0);
  EXPECT_LE(pb, (1.0 - p.barrier) * std::exp(-p.rate * 25.0) + 1e-12);
}

TEST(BarrierPrices, PutVanishesAsStrikeApproachesBarrier) {
  const auto p = base();
  EXPECT_LT(put_barrier(p, put_spec(p.barrier + 1e-12)).value, 1e-9);
}

TEST(BarrierPrices, CallExceedsSpotAtHighVol) {
  auto p = base();
  p.vol = 0.41;
  EXPECT_GT(call_barrier(p, call_spec()).value, p.spot);
}

TEST(BarrierPrices, QuoteTags) {
  const auto q = put_barrier(base(), put_spec());
  EXPECT_EQ(q.construction, Construction::direct);
  EXPECT_EQ(q.instrument, Instrument::put);
  EXPECT_EQ(synthetic_call(base(), call_spec()).construction, Construction::synthetic);
  EXPECT_STREQ(to_string(Instrument::intervention_value), "intervention_value");
}

TEST(BarrierPrices, Homogeneous) {
  const double lambda = 3.7;
  const auto p = base();
  auto scaled = p;
  scaled.spot *= lambda;
  scaled.barrier *= lambda;
  const auto cs = call_spec(1.0 * lambda);
  const auto ps = put_spec(1.0 * lambda);
  EXPECT_NEAR(call_barrier(scaled, cs).value, lambda * call_barrier(p, call_spec()).value, 1e-12);
  EXPECT_NEAR(put_barrier(scaled, ps).value, lambda * put_barrier(p, put_spec()).value, 1e-12);
  EXPECT_NEAR(forward_martingale(scaled, cs).value, lambda * forward_martingale(p, call_spec()).value, 1e-12);
  EXPECT_NEAR(intervention_value(scaled, 25.0).value, lambda * intervention_value(p, 25.0).value, 1e-12);
  EXPECT_NEAR(delta_call_barrier(scaled, cs), delta_call_barrier(p, call_spec()), 1e-12);
  EXPECT_NEAR(delta_put_barrier(scaled, ps), delta_put_barrier(p, put_spec()), 1e-12);
  EXPECT_NEAR(net_delta(scaled, 25.0), net_delta(p, 25.0), 1e-12);
}

TEST(BarrierPrices, StandardLowerBoundCanFail) {
  // Strike just above the barrier with r < q: the put is capped by K - b while
  // the no-barrier lower bound K e^{-rT} - S e^{-qT} is large.
  ModelParams p{1.0, 0.9, 0.01, 0.03, 0.13, 0.03};
  const auto spec = put_spec(0.95);
  const double lower = std::max(0.95 * std::exp(-0.25) - std::exp(-0.75), 0.0);
  EXPECT_GT(lower, 0.2);
  EXPECT_LT(put_barrier(p, spec).value, lower);
}

// ---- parity chain ----

TEST(Parity, ReferenceScenario) {
  const auto p = base();
  const double cb = call_barrier(p, call_spec()).value;
  const double pb = put_barrier(p, put_spec()).value;
  const double fb = forward_martingale(p, call_spec()).value;
  const double sfb = forward_submartingale(p, call_spec()).value;
  const double scb = synthetic_call(p, call_spec()).value;
  const double spb = synthetic_put(p, put_spec()).value;
  EXPECT_NEAR(cb - pb, fb, 1e-12);
  EXPECT_NEAR(scb - pb, sfb, 1e-12);
  EXPECT_NEAR(cb - spb, sfb, 1e-12);
  EXPECT_NEAR(fb - sfb, intervention_value(p, 25.0).value, 1e-12);
  EXPECT_LT(scb, cb);
  EXPECT_GT(spb, pb);
  EXPECT_LT(sfb, fb);
}

TEST(Parity, RandomGrid) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    ModelParams p;
    p.spot = 1.0;
    p.barrier = 0.95 * u(gen);
    p.rate = 0.08 * u(gen);
    p.yield = 0.08 * u(gen);
    p.vol = 0.05 + 0.5 * u(gen);
    const double strike = p.barrier + 0.01 + 1.5 * u(gen);
    const double term = 0.5 + 39.5 * u(gen);
    const OptionSpec cs{OptionKind::call, strike, term};
    const OptionSpec ps{OptionKind::put, strike, term};
    const double cb = call_barrier(p, cs).value;
    const double pb = put_barrier(p, ps).value;
    const double fb = forward_martingale(p, cs).value;
    const double sfb = forward_submartingale(p, cs).value;
    ASSERT_NEAR(cb - pb, fb, 1e-12) << "case " << i;
    ASSERT_NEAR(synthetic_call(p, cs).value - pb, sfb, 1e-12);
    ASSERT_NEAR(cb - synthetic_put(p, ps).value, sfb, 1e-12);
    ASSERT_NEAR(fb - sfb, intervention_value(p, term).value, 1e-12);
  }
}

// ---- forwards and intervention value ----

TEST(Forwards, SubmartingaleForward) {
  EXPECT_NEAR(forward_submartingale(base(), call_spec()).value, 0.0915115, 5e-8);
  const double at_forward = std::exp(0.005 * 25.0);
  EXPECT_NEAR(forward_submartingale(base(), call_spec(at_forward)).value, 0.0, 1e-15);
  auto p = base();
  p.yield = p.rate;
  // r = q sits inside the guard, which shifts the rate by a hair.
  EXPECT_NEAR(forward_submartingale(p, call_spec()).value, 0.0, 1e-8);
}

TEST(Forwards, MartingaleForward) {
  const double fb = forward_martingale(base(), call_spec()).value;
  EXPECT_NEAR(fb, 0.1331, 1e-4);
  auto p = base();
  p.barrier = 0.0;
  EXPECT_NEAR(forward_martingale(p, call_spec()).value, forward_submartingale(p, call_spec()).value, 1e-15);
}

TEST(InterventionValue, ReferenceValue) {
  EXPECT_NEAR(intervention_value(base(), 25.0).value, 0.0416, 1e-4);
  EXPECT_GT(intervention_value(base(), 25.0).value, 0.0);
  auto p = base();
  p.barrier = 0.0;
  EXPECT_EQ(intervention_value(p, 25.0).value, 0.0);
}

TEST(InterventionValue, StrikeIndependent) {
  const auto p = base();
  const double low = forward_martingale(p, call_spec(0.8)).value - forward_submartingale(p, call_spec(0.8)).value;
  const double high = forward_martingale(p, call_spec(1.2)).value - forward_submartingale(p, call_spec(1.2)).value;
  EXPECT_NEAR(low, high, 1e-12);
  EXPECT_NEAR(low, intervention_value(p, 25.0).value, 1e-12);
}

TEST(InterventionValue, RealWorldForwardGap) {
  const double gap = real_world_forward_gap(base(), call_spec(), 0.025);
  EXPECT_NEAR(gap, 0.5052, 1e-4);
  EXPECT_NEAR(real_world_forward_gap(base(), call_spec(), 0.005), 0.0, 1e-15);
  EXPECT_NEAR(gap / intervention_value(base(), 25.0).value, 12.0, 0.5);
}

TEST(Synthetic, StrikeAtBarrierCollapsesToForward) {
  const auto p = base();
  const auto spec = call_spec(p.barrier + 1e-12);
  EXPECT_NEAR(synthetic_call(p, spec).value, forward_submartingale(p, spec).value, 1e-9);
}

TEST(Synthetic, PutExceedsMaximumPayoffAtHighVol) {
  auto p = base();
  p.vol = 0.30;
  EXPECT_GT(synthetic_put(p, put_spec()).value, 0.5);
}

// ---- deltas ----

double fd(double (*price)(const ModelParams&, const OptionSpec&), ModelParams p, const OptionSpec& spec) {
  const double h = 1e-5 * p.spot;
  const double s = p.spot;
  p.spot = s + h;
  const double up = price(p, spec);
  p.spot = s - h;
  const double down = price(p, spec);
  return (up - down) / (2.0 * h);
}

double call_price(const ModelParams& p, const OptionSpec& s) { return call_barrier(p, s).value; }
double put_price(const ModelParams& p, const OptionSpec& s) { return put_barrier(p, s).value; }
double minus_iv(const ModelParams& p, const OptionSpec& s) { return -intervention_value(p, s.term).value; }

TEST(Deltas, MatchFiniteDifferencesOnGrid) {
  double worst = 0.0;
  for (double vol : {0.05, 0.13, 0.30}) {
    for (int i = 0; i <= 40; ++i) {
      auto p = base();
      p.vol = vol;
      p.spot = p.barrier * (1.001 + (3.0 - 1.001) * i / 40.0);
      worst = std::max(worst, std::fabs(delta_call_barrier(p, call_spec()) - fd(call_price, p, call_spec())));
      worst = std::max(worst, std::fabs(delta_put_barrier(p, put_spec()) - fd(put_price, p, put_spec())));
      worst = std::max(worst, std::fabs(net_delta(p, 25.0) - fd(minus_iv, p, put_spec())));
    }
  }
  EXPECT_LT(worst, 1e-7);
}

TEST(Deltas, VanishAtBarrier) {
  auto p = base();
  p.spot = p.barrier * (1.0 + 1e-9);
  EXPECT_LT(std::fabs(delta_call_barrier(p, call_spec())), 1e-6);
  EXPECT_LT(std::fabs(delta_put_barrier(p, put_spec())), 1e-6);
}

TEST(Deltas, ZeroBarrierIsBlackScholesDelta) {
  auto p = base();
  p.barrier = 0.0;
  const auto a = aux_quantities(p, call_spec());
  EXPECT_NEAR(delta_call_barrier(p, call_spec()), std::exp(-0.25) * normal_cdf(a.z1), 1e-15);
}

TEST(Deltas, NetDeltaLimits) {
  auto p = base();
  p.spot = p.barrier * (1.0 + 1e-12);
  EXPECT_NEAR(net_delta(p, 25.0), std::exp(-0.25), 1e-9);
  p.spot = 100.0 * p.barrier;
  EXPECT_LT(net_delta(p, 25.0), 1e-6);
  const double d = net_delta(base(), 25.0);
  EXPECT_GT(d, 0.0);
  EXPECT_LE(d, std::exp(-0.25));
}

TEST(Deltas, Bstar) {
  const auto p = base();
  auto bs = p;
  bs.barrier = 0.0;
  EXPECT_NEAR(delta_bstar(p, put_spec(), 0.0), delta_put_barrier(bs, put_spec()), 1e-15);
  EXPECT_NEAR(delta_bstar(p, put_spec(), p.barrier), delta_put_barrier(p, put_spec()), 1e-15);

  auto near = p;
  near.spot = 0.55;
  const double mid = delta_bstar(near, put_spec(), near.barrier / 2.0);
  EXPECT_LT(delta_bstar(near, put_spec(), 0.0), mid);
  EXPECT_LT(mid, 0.0);

  EXPECT_EQ(error_of([&] { delta_bstar(p, put_spec(), -0.1); }), ErrorCode::BStarOutOfRange);
  EXPECT_EQ(error_of([&] { delta_bstar(p, put_spec(), 0.6); }), ErrorCode::BStarOutOfRange);
}

TEST(Deltas, BstarPriceDecreasesInBstar) {
  const auto p = base();
  const double w0 = price_bstar(p, put_spec(), 0.0).value;
  const double w1 = price_bstar(p, put_spec(), 0.25).value;
  const double w2 = price_bstar(p, put_spec(), 0.5).value;
  EXPECT_GT(w0, w1);
  EXPECT_GT(w1, w2);
  EXPECT_NEAR(w2, put_barrier(p, put_spec()).value, 1e-15);
}

// ---- thresholds ----

TEST(Thresholds, ReferenceValues) {
  EXPECT_NEAR(vol_threshold_put(base(), put_spec()), 0.290, 1e-3);
  EXPECT_NEAR(vol_threshold_call(base(), call_spec()), 0.409, 1e-3);
}

TEST(Thresholds, RootsSatisfyTheirEquations) {
  auto p = base();
  p.vol = vol_threshold_put(base(), put_spec());
  EXPECT_NEAR(synthetic_put(p, put_spec()).value, 0.5, 1e-8);
  p.vol = vol_threshold_call(base(), call_spec());
  EXPECT_NEAR(call_barrier(p, call_spec()).value, 1.0, 1e-8);
}

TEST(Thresholds, NoRootWithoutBarrier) {
  auto p = base();
  p.barrier = 0.0;
  EXPECT_EQ(error_of([&] { vol_threshold_put(p, put_spec()); }), ErrorCode::NoRootInBracket);
}

}  // namespace
