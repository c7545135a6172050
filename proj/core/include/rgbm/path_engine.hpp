#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <thread>
#include <vector>

#include "rgbm/model_params.hpp"
#include "rgbm/rng.hpp"

namespace rgbm {

enum class Measure { risk_neutral, real_world };

/// How the running minimum of the notional price is tracked between grid
/// points. `bridge` samples the exact minimum of the Brownian bridge inside
/// each step, so barrier touches between grid points are not missed; `grid`
/// only looks at grid values (the discrete form of the reflection map).
enum class Monitoring { bridge, grid };

const char* to_string(Measure m) noexcept;
const char* to_string(Monitoring m) noexcept;

/// Skew-normal increments near the barrier, representing buying pressure.
/// alphas[k] applies for S / b in (zone_edges[k+1], zone_edges[k]]; the last
/// alpha applies at or below zone_edges.back(); above zone_edges.front() the
/// increment is plain normal.
struct SkewLadder {
  std::vector<double> zone_edges;  // descending multiples of the barrier
  std::vector<double> alphas;
  double ratio = 1.3161;

  /// alpha = 0.1 on (1.08b, 1.09b], growing by `ratio` per 1%-of-b slice
  /// down to the cap at or below 1.01b.
  static SkewLadder standard(double first_alpha = 0.1, double ratio = 1.3161, double cap = 0.9);

  void validate() const;
  double alpha_at(double price_over_barrier) const noexcept;
};

/// Log-return of one step with the skew parameter picked from the previous
/// observed price: drift_dt + vol_sqrt_dt * (sqrt(1 - a^2) w1 + a |w2|).
/// The drift term is not recentred.
double skewed_increment(double prev_observed, double barrier, const SkewLadder& ladder, double w1, double w2,
                        double drift_dt, double vol_sqrt_dt) noexcept;

struct PathConfig {
  std::size_t n_steps = 2500;
  double horizon = 25.0;
  Measure measure = Measure::risk_neutral;
  std::uint64_t master_seed = 20221206;
  std::optional<SkewLadder> skew;
  Monitoring monitoring = Monitoring::bridge;
  unsigned workers = 1;

  void validate() const;
  double dt() const noexcept { return horizon / static_cast<double>(n_steps); }
};

struct SimulatedPath {
  std::size_t index = 0;
  std::vector<double> times;
  std::vector<double> notional;
  std::vector<double> observed;
  std::vector<double> cum_reflection;  // log-units, non-decreasing
};

struct Reflection {
  std::vector<double> observed;
  std::vector<double> cum_reflection;
};

/// Grid reflection map: observed[i] = notional[i] * max(1, max_{n<=i} b / notional[n]).
Reflection reflect(std::span<const double> notional, double barrier);

/// Per-step constants shared by every path of one configuration.
struct StepModel {
  double drift_dt = 0.0;
  double vol_sqrt_dt = 0.0;
  double var_dt = 0.0;
  double log_barrier = -std::numeric_limits<double>::infinity();  // relative to the start level
  bool reflecting = false;
  Monitoring monitoring = Monitoring::bridge;
  bool skewed = false;
  std::vector<double> log_edges;     // log of the ladder's zone edges
  std::vector<double> alphas;
  std::vector<double> alpha_compl;   // sqrt(1 - alpha^2)

  static StepModel gbm(const ModelParams& params, const PathConfig& config);
  static StepModel abm(double drift, double vol, double dt, double floor_level, Monitoring monitoring);
};

/// Log-space walk x_t = ln(N_t / N_0) reflected at `log_barrier`:
/// z_t = x_t + L_t with L_t = max(0, log_barrier - min_{s<=t} x_s).
/// Every step draws, in order: one normal, a second normal when skewed, and
/// one uniform for the bridge minimum. Consumption does not depend on the
/// monitoring mode, so grid and bridge runs share notional paths.
class ReflectedLogWalk {
 public:
  explicit ReflectedLogWalk(const StepModel& model) noexcept
      : model_(&model),
        floor_(model.reflecting ? std::min(0.0, model.log_barrier) : -std::numeric_limits<double>::infinity()) {}

  void step(Xoshiro256& rng) noexcept;

  double level() const noexcept { return x_; }
  double reflection() const noexcept { return model_->reflecting ? model_->log_barrier - floor_ : 0.0; }
  double reflected() const noexcept { return x_ + reflection(); }

 private:
  // Ladder slot for log(S / b); -1 above the top edge.
  std::ptrdiff_t zone_for(double log_ratio) const noexcept;

  const StepModel* model_;
  double x_ = 0.0;
  double floor_;  // min(log_barrier, running minimum of x)
};

struct TerminalState {
  double notional = 0.0;
  double observed = 0.0;
  double cum_reflection = 0.0;
};

double path_drift(const ModelParams& params, Measure measure) noexcept;

/// Notional path on the uniform grid 0..T; determined by (master_seed, index).
std::vector<double> simulate_notional(const ModelParams& params, const PathConfig& config, std::size_t path_index);

/// Full path with reflection; observed[0] == notional[0] == spot.
SimulatedPath simulate_path(const ModelParams& params, const PathConfig& config, std::size_t path_index);

/// Same draws as simulate_path, keeping only the terminal values.
TerminalState simulate_terminal(const ModelParams& params, const StepModel& model, const PathConfig& config,
                                std::size_t path_index) noexcept;

/// Sequential stream of paths 0..n_paths-1; one path in memory at a time.
class PathStream {
 public:
  PathStream(const ModelParams& params, const PathConfig& config, std::size_t n_paths);

  std::optional<SimulatedPath> next();
  std::size_t remaining() const noexcept { return n_paths_ - next_; }

 private:
  ModelParams params_;
  PathConfig config_;
  std::size_t n_paths_;
  std::size_t next_ = 0;
};

PathStream simulate_batch(const ModelParams& params, const PathConfig& config, std::size_t n_paths);

/// Paths per reduction block. Blocks are merged in index order, so results do
/// not depend on the number of workers.
inline constexpr std::size_t kReductionBlock = 1024;

/// Runs fn(path_index, block_accumulator) for every path on up to `workers`
/// threads and merges the block accumulators in block order. Acc needs a
/// default constructor and merge(const Acc&).
template <class Acc, class PathFn>
Acc reduce_paths(std::size_t n_paths, unsigned workers, PathFn&& fn) {
  const std::size_t n_blocks = (n_paths + kReductionBlock - 1) / kReductionBlock;
  std::vector<Acc> blocks(n_blocks);
  auto run_block = [&](std::size_t b) {
    const std::size_t end = std::min(n_paths, (b + 1) * kReductionBlock);
    for (std::size_t i = b * kReductionBlock; i < end; ++i) fn(i, blocks[b]);
  };

  const std::size_t n_threads = std::min<std::size_t>(std::max(1u, workers), n_blocks);
  if (n_threads <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      pool.reserve(n_threads);
      for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
          try {
            for (std::size_t b = next++; b < n_blocks; b = next++) run_block(b);
          } catch (...) {
            std::scoped_lock lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n_blocks;
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  Acc total{};
  for (const auto& block : blocks) total.merge(block);
  return total;
}

/// CSV header: path,step,t,notional,observed,cum_reflection
void write_paths_csv_header(std::ostream& out);
void write_path_csv(std::ostream& out, const SimulatedPath& path);

}  // namespace rgbm
