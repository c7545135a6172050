#include "rgbm/path_engine.hpp"

#include <cmath>

#include "rgbm/error.hpp"

namespace rgbm {

namespace {

// exp(-x) underflows to zero past this point, so no bridge draw is needed.
constexpr double kBridgeExponentCutoff = 745.0;

}  // namespace

const char* to_string(Measure m) noexcept {
  return m == Measure::risk_neutral ? "risk_neutral" : "real_world";
}

const char* to_string(Monitoring m) noexcept { return m == Monitoring::bridge ? "bridge" : "grid"; }

SkewLadder SkewLadder::standard(double first_alpha, double ratio, double cap) {
  SkewLadder ladder;
  ladder.ratio = ratio;
  double alpha = first_alpha;
  for (int k = 0; k < 9; ++k) {
    ladder.zone_edges.push_back(1.09 - 0.01 * k);
    ladder.alphas.push_back(std::min(alpha, cap));
    alpha *= ratio;
  }
  return ladder;
}

void SkewLadder::validate() const {
  if (zone_edges.empty() || zone_edges.size() != alphas.size()) {
    throw Error(ErrorCode::InvalidConfig, "skew ladder needs one alpha per zone edge");
  }
  for (std::size_t k = 0; k < zone_edges.size(); ++k) {
    if (!(zone_edges[k] >= 1.0)) throw Error(ErrorCode::InvalidConfig, "skew zone edges must be >= 1");
    if (k > 0 && !(zone_edges[k] < zone_edges[k - 1])) {
      throw Error(ErrorCode::InvalidConfig, "skew zone edges must be strictly descending");
    }
    if (!(std::fabs(alphas[k]) <= 1.0)) throw Error(ErrorCode::InvalidConfig, "skew alpha outside [-1, 1]");
  }
}

double SkewLadder::alpha_at(double price_over_barrier) const noexcept {
  if (zone_edges.empty() || price_over_barrier > zone_edges.front()) return 0.0;
  for (std::size_t k = 1; k < zone_edges.size(); ++k) {
    if (price_over_barrier > zone_edges[k]) return alphas[k - 1];
  }
  return alphas.back();
}

double skewed_increment(double prev_observed, double barrier, const SkewLadder& ladder, double w1, double w2,
                        double drift_dt, double vol_sqrt_dt) noexcept {
  const double alpha = barrier > 0.0 ? ladder.alpha_at(prev_observed / barrier) : 0.0;
  return drift_dt + vol_sqrt_dt * (std::sqrt(1.0 - alpha * alpha) * w1 + alpha * std::fabs(w2));
}

void PathConfig::validate() const {
  if (n_steps < 1) throw Error(ErrorCode::InvalidConfig, "n_steps must be >= 1");
  if (!(horizon > 0.0)) throw Error(ErrorCode::NonPositiveTerm, "horizon must be > 0");
  if (skew) skew->validate();
}

Reflection reflect(std::span<const double> notional, double barrier) {
  Reflection out;
  if (notional.empty()) return out;
  if (!(notional.front() > barrier)) {
    throw Error(ErrorCode::StartBelowBarrier, "first notional price must lie above the barrier");
  }
  out.observed.resize(notional.size());
  out.cum_reflection.resize(notional.size());
  double running_min = notional.front();
  for (std::size_t i = 0; i < notional.size(); ++i) {
    running_min = std::min(running_min, notional[i]);
    const double uplift = barrier > 0.0 ? std::max(0.0, std::log(barrier / running_min)) : 0.0;
    out.cum_reflection[i] = uplift;
    out.observed[i] = uplift > 0.0 ? notional[i] * std::exp(uplift) : notional[i];
  }
  return out;
}

double path_drift(const ModelParams& params, Measure measure) noexcept {
  return measure == Measure::risk_neutral ? params.rate : params.drift;
}

StepModel StepModel::gbm(const ModelParams& params, const PathConfig& config) {
  const double dt = config.dt();
  const double drift = path_drift(params, config.measure);
  StepModel m;
  m.drift_dt = (drift - params.yield - 0.5 * params.vol * params.vol) * dt;
  m.vol_sqrt_dt = params.vol * std::sqrt(dt);
  m.var_dt = m.vol_sqrt_dt * m.vol_sqrt_dt;
  m.reflecting = params.barrier > 0.0;
  if (m.reflecting) m.log_barrier = std::log(params.barrier / params.spot);
  m.monitoring = config.monitoring;
  if (config.skew && m.reflecting) {
    m.skewed = true;
    for (std::size_t k = 0; k < config.skew->zone_edges.size(); ++k) {
      const double a = config.skew->alphas[k];
      m.log_edges.push_back(std::log(config.skew->zone_edges[k]));
      m.alphas.push_back(a);
      m.alpha_compl.push_back(std::sqrt(1.0 - a * a));
    }
  }
  return m;
}

StepModel StepModel::abm(double drift, double vol, double dt, double floor_level, Monitoring monitoring) {
  StepModel m;
  m.drift_dt = drift * dt;
  m.vol_sqrt_dt = vol * std::sqrt(dt);
  m.var_dt = m.vol_sqrt_dt * m.vol_sqrt_dt;
  m.reflecting = std::isfinite(floor_level);
  m.log_barrier = floor_level;
  m.monitoring = monitoring;
  return m;
}

std::ptrdiff_t ReflectedLogWalk::zone_for(double log_ratio) const noexcept {
  const auto& edges = model_->log_edges;
  if (log_ratio > edges.front()) return -1;
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (log_ratio > edges[k]) return static_cast<std::ptrdiff_t>(k - 1);
  }
  return static_cast<std::ptrdiff_t>(edges.size() - 1);
}

void ReflectedLogWalk::step(Xoshiro256& rng) noexcept {
  const StepModel& m = *model_;
  const double w1 = rng.normal();
  double increment;
  if (m.skewed) {
    const double w2 = rng.normal();
    const std::ptrdiff_t zone = zone_for(reflected() - m.log_barrier);
    if (zone < 0) {
      increment = m.drift_dt + m.vol_sqrt_dt * w1;
    } else {
      const auto k = static_cast<std::size_t>(zone);
      increment = m.drift_dt + m.vol_sqrt_dt * (m.alpha_compl[k] * w1 + m.alphas[k] * std::fabs(w2));
    }
  } else {
    increment = m.drift_dt + m.vol_sqrt_dt * w1;
  }
  const double u = rng.uniform();

  const double x0 = x_;
  const double x1 = x_ + increment;
  x_ = x1;
  if (!m.reflecting) return;

  if (m.monitoring == Monitoring::grid) {
    floor_ = std::min(floor_, x1);
    return;
  }
  // Minimum of the Brownian bridge from x0 to x1 over one step: it drops below
  // the current floor with probability exp(-2 (x0-f)(x1-f) / var), and given
  // that, the minimum is drawn from its exact conditional law.
  const double above0 = x0 - floor_;
  const double above1 = x1 - floor_;
  bool sample = above1 <= 0.0;
  if (!sample) {
    const double exponent = 2.0 * above0 * above1 / m.var_dt;
    sample = exponent < kBridgeExponentCutoff && u < std::exp(-exponent);
  }
  if (sample) {
    const double gap = x1 - x0;
    const double minimum = 0.5 * (x0 + x1 - std::sqrt(gap * gap - 2.0 * m.var_dt * std::log(u)));
    floor_ = std::min(floor_, minimum);
  }
}

namespace {

StepModel checked_model(const ModelParams& params, const PathConfig& config) {
  validate_params(params);
  config.validate();
  return StepModel::gbm(params, config);
}

}  // namespace

std::vector<double> simulate_notional(const ModelParams& params, const PathConfig& config, std::size_t path_index) {
  const StepModel model = checked_model(params, config);
  Xoshiro256 rng = Xoshiro256::substream(config.master_seed, path_index);
  ReflectedLogWalk walk(model);
  std::vector<double> notional(config.n_steps + 1);
  notional[0] = params.spot;
  for (std::size_t i = 1; i <= config.n_steps; ++i) {
    walk.step(rng);
    notional[i] = params.spot * std::exp(walk.level());
  }
  return notional;
}

SimulatedPath simulate_path(const ModelParams& params, const PathConfig& config, std::size_t path_index) {
  const StepModel model = checked_model(params, config);
  Xoshiro256 rng = Xoshiro256::substream(config.master_seed, path_index);
  ReflectedLogWalk walk(model);
  const std::size_t n = config.n_steps + 1;
  const double dt = config.dt();

  SimulatedPath path;
  path.index = path_index;
  path.times.resize(n);
  path.notional.resize(n);
  path.observed.resize(n);
  path.cum_reflection.resize(n);
  path.notional[0] = path.observed[0] = params.spot;
  for (std::size_t i = 1; i < n; ++i) {
    walk.step(rng);
    path.times[i] = i == config.n_steps ? config.horizon : dt * static_cast<double>(i);
    path.notional[i] = params.spot * std::exp(walk.level());
    path.cum_reflection[i] = walk.reflection();
    path.observed[i] = params.spot * std::exp(walk.reflected());
  }
  return path;
}

TerminalState simulate_terminal(const ModelParams& params, const StepModel& model, const PathConfig& config,
                                std::size_t path_index) noexcept {
  Xoshiro256 rng = Xoshiro256::substream(config.master_seed, path_index);
  ReflectedLogWalk walk(model);
  for (std::size_t i = 0; i < config.n_steps; ++i) walk.step(rng);
  return {params.spot * std::exp(walk.level()), params.spot * std::exp(walk.reflected()), walk.reflection()};
}

PathStream::PathStream(const ModelParams& params, const PathConfig& config, std::size_t n_paths)
    : params_(validate_params(params)), config_(config), n_paths_(n_paths) {
  config_.validate();
}

std::optional<SimulatedPath> PathStream::next() {
  if (next_ >= n_paths_) return std::nullopt;
  return simulate_path(params_, config_, next_++);
}

PathStream simulate_batch(const ModelParams& params, const PathConfig& config, std::size_t n_paths) {
  return PathStream(params, config, n_paths);
}

void write_paths_csv_header(std::ostream& out) { out << "path,step,t,notional,observed,cum_reflection\n"; }

void write_path_csv(std::ostream& out, const SimulatedPath& path) {
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    out << path.index << ',' << i << ',' << path.times[i] << ',' << path.notional[i] << ',' << path.observed[i]
        << ',' << path.cum_reflection[i] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace rgbm
