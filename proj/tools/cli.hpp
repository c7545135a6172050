#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rgbm/hedging.hpp"
#include "rgbm/model_params.hpp"
#include "rgbm/path_engine.hpp"

namespace rgbm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitAssertion = 3;

/// Fully resolved run settings: built-in defaults, then the config file, then
/// flags.
struct RunConfig {
  std::string command;
  ModelParams params = reference_params();
  OptionKind kind = OptionKind::put;
  double strike = 1.0;
  double term = 25.0;

  std::size_t paths = 10000;
  std::size_t steps = 2500;
  std::uint64_t seed = 20221206;
  unsigned workers = 1;
  Monitoring monitoring = Monitoring::bridge;
  bool skew = false;

  std::string mode = "pricing";  // converge: pricing | replication
  std::vector<double> ladder;    // empty: the mode's default
  bool assert_slope = false;
  std::string strategy = "direct_put";
  double bstar = 0.0;
  double cte = 0.25;
  double growth = 0.0;           // 0: no real-world forward gap
  double loan = 1.0;
  double margin = 0.0;
  std::size_t ledger_paths = 0;  // hedge: full ledgers written for this many paths

  std::string out_dir = ".";

  OptionSpec spec() const { return {kind, strike, term}; }
  PathConfig path_config(Measure measure) const;
  /// Settings that determine the numbers; the output directory and worker
  /// count are left out since results do not depend on them.
  nlohmann::json to_json() const;
};

/// FNV-1a 64 of the serialized config, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// Runs one invocation, writing messages to `out` and `err`. Returns the exit
/// code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rgbm::cli
