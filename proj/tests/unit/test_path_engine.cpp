#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "rgbm/error.hpp"
#include "rgbm/normal.hpp"
#include "rgbm/path_engine.hpp"
#include "rgbm/stats.hpp"

namespace {

using namespace rgbm;

PathConfig small_config(std::size_t steps = 250, Monitoring monitoring = Monitoring::bridge) {
  PathConfig c;
  c.n_steps = steps;
  c.horizon = 25.0;
  c.master_seed = 99;
  c.monitoring = monitoring;
  return c;
}

TEST(Reflect, WorkedExample) {
  const std::vector<double> notional = {1.0, 0.4, 0.8};
  const auto r = reflect(notional, 0.5);
  EXPECT_DOUBLE_EQ(r.observed[0], 1.0);
  EXPECT_DOUBLE_EQ(r.observed[1], 0.5);
  EXPECT_DOUBLE_EQ(r.observed[2], 1.0);
  EXPECT_EQ(r.cum_reflection[0], 0.0);
  EXPECT_DOUBLE_EQ(r.cum_reflection[1], std::log(1.25));
  EXPECT_DOUBLE_EQ(r.cum_reflection[2], std::log(1.25));
}

TEST(Reflect, NeverBelowBarrierIsIdentity) {
  const std::vector<double> notional = {1.0, 0.9, 1.3, 0.6, 2.0};
  const auto r = reflect(notional, 0.5);
  for (std::size_t i = 0; i < notional.size(); ++i) {
    EXPECT_EQ(r.observed[i], notional[i]);
    EXPECT_EQ(r.cum_reflection[i], 0.0);
  }
}

TEST(Reflect, NewMinimaPinAtBarrier) {
  const std::vector<double> notional = {1.0, 0.45, 0.3, 0.2, 0.1};
  const auto r = reflect(notional, 0.5);
  for (std::size_t i = 1; i < notional.size(); ++i) EXPECT_NEAR(r.observed[i], 0.5, 1e-15);
}

TEST(Reflect, StartBelowBarrierThrows) {
  const std::vector<double> notional = {0.4, 0.6};
  try {
    reflect(notional, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StartBelowBarrier);
  }
}

TEST(Paths, GridMonitoringMatchesReflectionMap) {
  const auto params = reference_params();
  const auto config = small_config(250, Monitoring::grid);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto path = simulate_path(params, config, i);
    const auto notional = simulate_notional(params, config, i);
    const auto r = reflect(notional, params.barrier);
    ASSERT_EQ(path.notional.size(), 251u);
    for (std::size_t k = 0; k < notional.size(); ++k) {
      ASSERT_NEAR(path.notional[k], notional[k], 1e-14 * notional[k]);
      ASSERT_NEAR(path.cum_reflection[k], r.cum_reflection[k], 1e-12);
      ASSERT_NEAR(path.observed[k], r.observed[k], 1e-12 * r.observed[k]);
    }
  }
}

TEST(Paths, Invariants) {
  const auto params = reference_params();
  for (auto monitoring : {Monitoring::bridge, Monitoring::grid}) {
    const auto config = small_config(500, monitoring);
    for (std::size_t i = 0; i < 50; ++i) {
      const auto path = simulate_path(params, config, i);
      EXPECT_EQ(path.observed[0], params.spot);
      EXPECT_EQ(path.notional[0], params.spot);
      EXPECT_EQ(path.times.front(), 0.0);
      EXPECT_EQ(path.times.back(), 25.0);
      for (std::size_t k = 0; k < path.times.size(); ++k) {
        ASSERT_GE(path.observed[k], params.barrier - 1e-12);
        ASSERT_NEAR(path.observed[k], path.notional[k] * std::exp(path.cum_reflection[k]), 1e-13 * path.observed[k]);
        if (k > 0) ASSERT_GE(path.cum_reflection[k], path.cum_reflection[k - 1]);
      }
    }
  }
}

TEST(Paths, BridgeReflectsAtLeastAsMuchAsGrid) {
  // Both modes share the notional path; the continuous minimum is never above
  // the grid minimum.
  const auto params = reference_params();
  for (std::size_t i = 0; i < 50; ++i) {
    const auto bridge = simulate_path(params, small_config(100, Monitoring::bridge), i);
    const auto grid = simulate_path(params, small_config(100, Monitoring::grid), i);
    for (std::size_t k = 0; k < bridge.times.size(); ++k) {
      ASSERT_EQ(bridge.notional[k], grid.notional[k]);
      ASSERT_GE(bridge.cum_reflection[k], grid.cum_reflection[k]);
    }
  }
}

TEST(Paths, Deterministic) {
  const auto a = simulate_path(reference_params(), small_config(), 17);
  const auto b = simulate_path(reference_params(), small_config(), 17);
  EXPECT_EQ(a.observed, b.observed);
  EXPECT_EQ(a.notional, b.notional);
  const auto c = simulate_path(reference_params(), small_config(), 18);
  EXPECT_NE(a.notional, c.notional);
}

TEST(Paths, DeterministicLimit) {
  auto params = reference_params();
  params.vol = 1e-12;
  const auto n = simulate_notional(params, small_config(), 0);
  EXPECT_NEAR(n.back(), std::exp(0.005 * 25.0), 1e-9);
}

TEST(Paths, NotionalIsMartingaleAfterCarry) {
  // One step is an exact draw of N_T.
  const auto params = reference_params();
  PathConfig config = small_config(1);
  const StepModel model = StepModel::gbm(params, config);
  const double carry = std::exp(-(params.rate - params.yield) * 25.0);
  RunningStats notional;
  RunningStats observed;
  for (std::size_t i = 0; i < 400000; ++i) {
    const auto t = simulate_terminal(params, model, config, i);
    notional.add(carry * t.notional);
    observed.add(carry * t.observed);
  }
  EXPECT_LT(std::fabs(notional.mean() - 1.0), 3.0 * notional.std_error());
  // The observed price is a strict sub-martingale once the barrier matters.
  EXPECT_GT(observed.mean() - 1.0, 10.0 * observed.std_error());
}

TEST(Paths, BridgeHittingProbabilityMatchesReflectionPrinciple) {
  // Driftless unit-vol walk over one step, floor one unit below the start:
  // P(min < -1) = 2 Phi(-1) for the continuous path, Phi(-1) on the grid.
  const StepModel bridge = StepModel::abm(0.0, 1.0, 1.0, -1.0, Monitoring::bridge);
  const StepModel grid = StepModel::abm(0.0, 1.0, 1.0, -1.0, Monitoring::grid);
  constexpr std::size_t n = 200000;
  std::size_t hit_bridge = 0;
  std::size_t hit_grid = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto r1 = Xoshiro256::substream(5, i);
    auto r2 = Xoshiro256::substream(5, i);
    ReflectedLogWalk wb(bridge);
    ReflectedLogWalk wg(grid);
    wb.step(r1);
    wg.step(r2);
    hit_bridge += wb.reflection() > 0.0;
    hit_grid += wg.reflection() > 0.0;
  }
  const double pb = 2.0 * normal_cdf(-1.0);
  const double pg = normal_cdf(-1.0);
  EXPECT_NEAR(static_cast<double>(hit_bridge) / n, pb, 4.0 * std::sqrt(pb * (1 - pb) / n));
  EXPECT_NEAR(static_cast<double>(hit_grid) / n, pg, 4.0 * std::sqrt(pg * (1 - pg) / n));
}

TEST(Paths, BatchStreamsInIndexOrder) {
  auto stream = simulate_batch(reference_params(), small_config(10), 3);
  EXPECT_EQ(stream.remaining(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    auto path = stream.next();
    ASSERT_TRUE(path.has_value());
    EXPECT_EQ(path->index, i);
    EXPECT_EQ(path->observed, simulate_path(reference_params(), small_config(10), i).observed);
  }
  EXPECT_FALSE(stream.next().has_value());
  auto empty = simulate_batch(reference_params(), small_config(10), 0);
  EXPECT_FALSE(empty.next().has_value());
}

struct MeanAcc {
  RunningStats s;
  void merge(const MeanAcc& o) { s.merge(o.s); }
};

TEST(Paths, ReductionIndependentOfWorkers) {
  const auto params = reference_params();
  const auto config = small_config(50);
  const StepModel model = StepModel::gbm(params, config);
  auto run = [&](unsigned workers) {
    return reduce_paths<MeanAcc>(5000, workers, [&](std::size_t i, MeanAcc& a) {
      a.s.add(simulate_terminal(params, model, config, i).observed);
    });
  };
  const auto one = run(1);
  const auto four = run(4);
  EXPECT_EQ(one.s.count(), 5000u);
  EXPECT_EQ(one.s.mean(), four.s.mean());
  EXPECT_EQ(one.s.variance(), four.s.variance());
}

TEST(Paths, ReductionPropagatesExceptions) {
  EXPECT_THROW((reduce_paths<MeanAcc>(5000, 3,
                                      [](std::size_t i, MeanAcc&) {
                                        if (i == 3000) throw Error(ErrorCode::InvalidConfig, "boom");
                                      })),
               Error);
}

TEST(Paths, ConfigValidation) {
  PathConfig c = small_config();
  c.n_steps = 0;
  EXPECT_THROW(c.validate(), Error);
  c = small_config();
  c.horizon = 0.0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Paths, CsvDump) {
  std::ostringstream out;
  write_paths_csv_header(out);
  write_path_csv(out, simulate_path(reference_params(), small_config(2), 4));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "path,step,t,notional,observed,cum_reflection");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.rfind("4,", 0), 0u);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

// ---- skew ladder ----

TEST(Skew, StandardLadder) {
  const auto ladder = SkewLadder::standard();
  ASSERT_EQ(ladder.zone_edges.size(), 9u);
  EXPECT_NEAR(ladder.alphas.front(), 0.1, 1e-15);
  EXPECT_NEAR(ladder.alphas[1], 0.13161, 1e-12);
  EXPECT_NEAR(ladder.alphas.back(), 0.9, 1e-15);
  EXPECT_EQ(ladder.alpha_at(2.0), 0.0);
  EXPECT_EQ(ladder.alpha_at(1.0901), 0.0);
  EXPECT_NEAR(ladder.alpha_at(1.085), 0.1, 1e-15);
  EXPECT_NEAR(ladder.alpha_at(1.005), 0.9, 1e-15);
  EXPECT_NEAR(ladder.alpha_at(1.0), 0.9, 1e-15);
  EXPECT_NO_THROW(ladder.validate());
}

TEST(Skew, InvalidLadder) {
  SkewLadder bad = SkewLadder::standard();
  bad.alphas[2] = 1.5;
  EXPECT_THROW(bad.validate(), Error);
  bad = SkewLadder::standard();
  std::swap(bad.zone_edges[0], bad.zone_edges[1]);
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Skew, IncrementSelection) {
  const auto ladder = SkewLadder::standard();
  EXPECT_EQ(skewed_increment(1.0, 0.5, ladder, 0.7, -1.3, 0.01, 0.2), 0.01 + 0.2 * 0.7);
  const double a = 0.9;
  EXPECT_NEAR(skewed_increment(0.5025, 0.5, ladder, 0.7, -1.3, 0.01, 0.2),
              0.01 + 0.2 * (std::sqrt(1 - a * a) * 0.7 + a * 1.3), 1e-15);
}

TEST(Skew, MaximumSkewIsPositive) {
  const auto ladder = SkewLadder::standard();
  auto rng = Xoshiro256::substream(3, 0);
  constexpr int n = 1000000;
  double m1 = 0.0, m2 = 0.0, m3 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w1 = rng.normal();
    const double w2 = rng.normal();
    const double x = skewed_increment(0.5025, 0.5, ladder, w1, w2, 0.0, 1.0);
    m1 += x;
    m2 += x * x;
    m3 += x * x * x;
  }
  m1 /= n;
  m2 /= n;
  m3 /= n;
  const double var = m2 - m1 * m1;
  const double skew = (m3 - 3 * m1 * m2 + 2 * m1 * m1 * m1) / std::pow(var, 1.5);
  // Skew-normal moment formula with delta = 0.9.
  const double m = std::sqrt(2.0 / std::numbers::pi);
  const double expected = std::pow(0.9 * m, 3) * (4.0 - std::numbers::pi) / 2.0 /
                          std::pow(1.0 - 0.81 * 2.0 / std::numbers::pi, 1.5);
  EXPECT_GT(skew, 0.0);
  EXPECT_NEAR(skew, expected, 0.02);
  EXPECT_NEAR(m1, 0.9 * m, 0.005);
}

}  // namespace
