#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "rgbm/closed_form.hpp"
#include "rgbm/erm.hpp"
#include "rgbm/error.hpp"
#include "rgbm/mc_pricer.hpp"
#include "rgbm/stats.hpp"

#ifndef RGBM_VERSION
#define RGBM_VERSION "0.0.0"
#endif

namespace rgbm::cli {

using nlohmann::json;

namespace {

// Raised when a run's own sanity checks fail; maps to exit code 3.
struct AssertionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw AssertionFailure(what);
}

std::vector<std::size_t> to_counts(const std::vector<double>& ladder) {
  std::vector<std::size_t> counts;
  for (double v : ladder) {
    if (!(v >= 1.0) || v != std::floor(v)) throw Error(ErrorCode::InvalidLadder, "ladder entries must be whole counts");
    counts.push_back(static_cast<std::size_t>(v));
  }
  return counts;
}

std::string utc_stamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return s.str();
}

/// Output pair `<command>_<timestamp>.{csv,json}` sharing one stem; a numeric
/// suffix keeps runs within the same second apart.
class Artifacts {
 public:
  Artifacts(const RunConfig& config, std::ostream& log)
      : config_json_(config.to_json()), hash_(config_hash(config_json_)), log_(log) {
    std::filesystem::create_directories(config.out_dir);
    created_ = utc_stamp();
    const std::filesystem::path dir(config.out_dir);
    std::string stem = config.command + "_" + created_;
    for (int k = 2; std::filesystem::exists(dir / (stem + ".json")); ++k) {
      stem = config.command + "_" + created_ + "_" + std::to_string(k);
    }
    stem_ = dir / stem;
  }

  const std::string& hash() const { return hash_; }

  /// Opens `<stem><suffix>.csv` with the config-hash comment line written.
  std::ofstream csv(const std::string& suffix = "") {
    const auto path = stem_.string() + suffix + ".csv";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "# config_hash=" << hash_ << '\n';
    f.precision(17);
    log_ << "wrote " << path << '\n';
    return f;
  }

  void write_json(json summary) {
    summary["command"] = config_json_["command"];
    summary["version"] = RGBM_VERSION;
    summary["config_hash"] = hash_;
    summary["created_utc"] = created_;
    summary["config"] = config_json_;
    const auto path = stem_.string() + ".json";
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << summary.dump(2) << '\n';
    log_ << "wrote " << path << '\n';
  }

 private:
  json config_json_;
  std::string hash_;
  std::ostream& log_;
  std::string created_;
  std::filesystem::path stem_;
};

OptionKind kind_of(StrategyKind s) {
  switch (s) {
    case StrategyKind::direct_call:
    case StrategyKind::synthetic_call:
    case StrategyKind::bs_delta_call:
    case StrategyKind::forward_static:
    case StrategyKind::forward_martingale: return OptionKind::call;
    default: return OptionKind::put;
  }
}

Strategy parse_strategy_or_throw(const RunConfig& c) {
  const auto kind = parse_strategy(c.strategy);
  if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown strategy '" + c.strategy + "'");
  return {*kind, c.bstar};
}

json summary_json(const Summary& s) {
  return {{"n", s.n},         {"mean", s.mean}, {"sd", s.sd},   {"min", s.min},   {"p10", s.p10},
          {"p25", s.p25},     {"median", s.median}, {"p75", s.p75}, {"p90", s.p90}, {"max", s.max}};
}

int cmd_price(const RunConfig& c, std::ostream& out) {
  const auto& p = c.params;
  const OptionSpec call{OptionKind::call, c.strike, c.term};
  const OptionSpec put{OptionKind::put, c.strike, c.term};
  const double cb = call_barrier(p, call).value;
  const double pb = put_barrier(p, put).value;
  const double sc = synthetic_call(p, call).value;
  const double sp = synthetic_put(p, put).value;
  const double fb = forward_martingale(p, call).value;
  const double sfb = forward_submartingale(p, call).value;
  const double iv = intervention_value(p, c.term).value;

  std::vector<std::pair<std::string, double>> rows = {
      {"call_barrier", cb},
      {"put_barrier", pb},
      {"synthetic_call", sc},
      {"synthetic_put", sp},
      {"forward_martingale", fb},
      {"forward_submartingale", sfb},
      {"intervention_value", iv},
      {"bs_call", bs_call(p, call).value},
      {"bs_put", bs_put(p, put).value},
      {"delta_call_barrier", delta_call_barrier(p, call)},
      {"delta_put_barrier", delta_put_barrier(p, put)},
      {"net_delta", net_delta(p, c.term)},
      {"parity_residual_barrier", cb - pb - fb},
      {"parity_residual_synthetic_call", sc - pb - sfb},
      {"parity_residual_synthetic_put", cb - sp - sfb},
      {"parity_residual_intervention", fb - sfb - iv},
  };
  if (c.growth != 0.0) rows.emplace_back("real_world_forward_gap", real_world_forward_gap(p, call, c.growth));

  Artifacts files(c, out);
  auto csv = files.csv();
  csv << "quantity,value\n";
  json summary;
  out << std::setprecision(10);
  for (const auto& [name, value] : rows) {
    csv << name << ',' << value << '\n';
    summary[name] = value;
    out << std::left << std::setw(32) << name << value << '\n';
  }
  files.write_json(summary);

  for (const auto& [name, value] : rows) {
    if (name.starts_with("parity_residual")) check(std::fabs(value) < 1e-12, name + " exceeds 1e-12");
  }
  return kExitOk;
}

int cmd_mc(const RunConfig& c, std::ostream& out) {
  const auto r = mc_price_call_put(c.params, c.spec(), c.path_config(Measure::risk_neutral), c.paths);
  Artifacts files(c, out);
  auto csv = files.csv();
  csv << "instrument,mean,std_error,analytic,z_score\n";
  json summary{{"n_paths", c.paths}, {"forward_mean", r.forward_mean}};
  for (const auto& [name, res] : {std::pair{"call", r.call}, std::pair{"put", r.put}}) {
    csv << name << ',' << res.mean << ',' << res.std_error << ',' << *res.analytic << ',' << *res.z_score << '\n';
    summary[std::string(name) + "_mean"] = res.mean;
    summary[std::string(name) + "_std_error"] = res.std_error;
    summary[std::string(name) + "_analytic"] = *res.analytic;
    summary[std::string(name) + "_z_score"] = *res.z_score;
    out << name << ": mc=" << res.mean << " se=" << res.std_error << " closed form=" << *res.analytic
        << " z=" << *res.z_score << '\n';
  }
  files.write_json(summary);
  check(std::fabs(*r.call.z_score) <= 4.0 && std::fabs(*r.put.z_score) <= 4.0, "|z| above 4");
  return kExitOk;
}

int cmd_converge(const RunConfig& c, std::ostream& out) {
  ConvergenceReport report;
  if (c.mode == "pricing") {
    const auto ladder = c.ladder.empty() ? std::vector<std::size_t>{1000, 10000, 100000} : to_counts(c.ladder);
    report = pricing_convergence_study(c.params, c.spec(), c.path_config(Measure::risk_neutral), ladder);
  } else if (c.mode == "replication") {
    const auto ladder = c.ladder.empty() ? std::vector<std::size_t>{250, 2500, 25000} : to_counts(c.ladder);
    const Strategy strategy = parse_strategy_or_throw(c);
    const OptionSpec spec{kind_of(strategy.kind), c.strike, c.term};
    report = replication_convergence_study(strategy, c.params, spec, c.path_config(Measure::real_world), ladder,
                                           c.paths);
  } else {
    throw Error(ErrorCode::InvalidConfig, "mode must be pricing or replication");
  }

  Artifacts files(c, out);
  auto csv = files.csv();
  write_convergence_csv(csv, report);
  json summary{{"mode", c.mode},
               {"statistic", report.statistic},
               {"fit_on", report.fit_on},
               {"slope_fitted", report.slope_fitted},
               {"note", report.note}};
  if (report.slope_fitted) {
    summary["fitted_slope"] = report.fitted_slope;
    summary["slope_ci_lo"] = report.slope_ci.lo;
    summary["slope_ci_hi"] = report.slope_ci.hi;
  }
  files.write_json(summary);
  for (const auto& pt : report.points) out << pt.n << ": " << pt.stat << " [" << pt.stat_lo << ", " << pt.stat_hi << "]\n";
  if (report.slope_fitted) out << "fitted slope " << report.fitted_slope << '\n';
  if (!report.note.empty()) out << report.note << '\n';

  if (c.assert_slope) {
    check(report.slope_fitted, "no slope fitted");
    check(report.fitted_slope >= -0.6 && report.fitted_slope <= -0.4, "slope outside [-0.6, -0.4]");
  }
  return kExitOk;
}

struct OutcomeRows {
  std::vector<std::pair<std::size_t, HedgeOutcome>> rows;
  void merge(const OutcomeRows& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }
};

int cmd_hedge(const RunConfig& c, std::ostream& out) {
  const Strategy strategy = parse_strategy_or_throw(c);
  const OptionSpec spec{kind_of(strategy.kind), c.strike, c.term};
  const PathConfig config = c.path_config(Measure::real_world);
  validate(c.params, spec);
  config.validate();

  const auto all = reduce_paths<OutcomeRows>(c.paths, config.workers, [&](std::size_t i, OutcomeRows& acc) {
    acc.rows.emplace_back(i, hedge_outcome(strategy, c.params, spec, simulate_path(c.params, config, i)));
  });

  RunningStats error;
  double worst_value = 0.0;
  Artifacts files(c, out);
  auto csv = files.csv();
  csv << "path,initial_wealth,terminal_value,target,replication_error,min_value,min_cash\n";
  for (const auto& [i, o] : all.rows) {
    csv << i << ',' << o.initial_wealth << ',' << o.terminal_value << ',' << o.target << ',' << o.replication_error
        << ',' << o.min_value << ',' << o.min_cash << '\n';
    error.add(o.replication_error);
    worst_value = std::min(worst_value, o.min_value);
  }
  if (c.ledger_paths > 0) {
    auto ledger_csv = files.csv("_ledger");
    write_ledger_csv_header(ledger_csv);
    for (std::size_t i = 0; i < std::min(c.ledger_paths, c.paths); ++i) {
      write_ledger_csv(ledger_csv, i, run_hedge(strategy, c.params, spec, simulate_path(c.params, config, i)));
    }
  }

  const Interval ci = sd_interval_95(error.sd(), error.count());
  json summary{{"strategy", to_string(strategy.kind)},
               {"n_paths", error.count()},
               {"initial_wealth", initial_wealth(strategy, c.params, spec)},
               {"error_mean", error.mean()},
               {"error_sd", error.sd()},
               {"error_sd_ci_lo", ci.lo},
               {"error_sd_ci_hi", ci.hi},
               {"worst_interim_value", worst_value},
               {"margin_fraction", c.margin},
               {"max_required_margin", c.margin * std::max(0.0, -worst_value)}};
  files.write_json(summary);
  out << to_string(strategy.kind) << ": error mean " << error.mean() << " sd " << error.sd() << " over "
      << error.count() << " paths\n";
  check(std::isfinite(error.mean()) && std::isfinite(error.sd()), "non-finite replication error");
  return kExitOk;
}

int cmd_ilr(const RunConfig& c, std::ostream& out) {
  const OptionSpec call{OptionKind::call, c.strike, c.term};
  const auto s = ilr_study(c.params, call, c.path_config(Measure::real_world), c.paths, c.cte);
  Artifacts files(c, out);
  auto csv = files.csv();
  csv << "path,ilr\n";
  for (std::size_t i = 0; i < s.ilr_per_path.size(); ++i) csv << i << ',' << s.ilr_per_path[i] << '\n';
  files.write_json({{"n_paths", s.ilr_per_path.size()},
                    {"cte_level", s.cte_level},
                    {"cte_value", s.cte_value},
                    {"frac_below_minus_one", s.frac_below_minus_one},
                    {"denominator", s.denominator},
                    {"margin_fraction", c.margin}});
  out << "CTE" << s.cte_level * 100.0 << " = " << s.cte_value << ", share below -1 = " << s.frac_below_minus_one
      << '\n';
  check(std::isfinite(s.cte_value), "non-finite CTE");
  return kExitOk;
}

int cmd_arb(const RunConfig& c, std::ostream& out) {
  const auto s = net_delta_study(c.params, c.term, c.path_config(Measure::real_world), c.paths);
  Artifacts files(c, out);
  auto csv = files.csv();
  csv << "path,terminal_gain,borrowing_multiple,loss_multiple\n";
  for (std::size_t i = 0; i < s.terminal_gain.size(); ++i) {
    csv << i << ',' << s.terminal_gain[i] << ',' << s.borrowing_multiple[i] << ',' << s.loss_multiple[i] << '\n';
  }
  files.write_json({{"target_gain", s.target_gain},
                    {"terminal_gain", summary_json(s.terminal_gain_summary)},
                    {"borrowing_multiple", summary_json(s.borrowing_summary)},
                    {"loss_multiple", summary_json(s.loss_summary)},
                    {"fraction_borrowing_above_5", s.fraction_borrowing_above(5.0)},
                    {"margin_fraction", c.margin}});
  out << "target gain " << s.target_gain << ", median terminal gain " << s.terminal_gain_summary.median
      << ", max borrowing multiple " << s.borrowing_summary.max << '\n';
  check(std::isfinite(s.terminal_gain_summary.mean), "non-finite gains");
  return kExitOk;
}

int cmd_erm(const RunConfig& c, std::ostream& out) {
  const auto r = principle_ii_report(c.params, {c.loan, c.term});
  Artifacts files(c, out);
  auto csv = files.csv();
  csv << "quantity,value,limit,holds\n";
  csv << "pv," << r.pv << ",,\n";
  csv << "put," << r.put << ",,\n";
  csv << "bound_a," << r.pv << ',' << r.bound_a.limit << ',' << r.bound_a.holds << '\n';
  csv << "bound_b," << r.pv << ',' << r.bound_b.limit << ',' << r.bound_b.holds << '\n';
  csv << "parity_limit," << r.parity_limit << ",,\n";
  files.write_json({{"pv", r.pv},
                    {"put", r.put},
                    {"bound_a_limit", r.bound_a.limit},
                    {"bound_a_holds", r.bound_a.holds},
                    {"bound_b_limit", r.bound_b.limit},
                    {"bound_b_holds", r.bound_b.holds},
                    {"parity_limit", r.parity_limit}});
  out << "pv " << r.pv << "; pv <= e^{-rT} K_T: " << (r.bound_a.holds ? "yes" : "no")
      << "; pv <= S e^{-qT}: " << (r.bound_b.holds ? "yes" : "VIOLATED") << '\n';
  check(r.bound_a.holds, "pv exceeds the discounted loan");
  return kExitOk;
}

int cmd_thresholds(const RunConfig& c, std::ostream& out) {
  const OptionSpec call{OptionKind::call, c.strike, c.term};
  const OptionSpec put{OptionKind::put, c.strike, c.term};
  const double put_vol = vol_threshold_put(c.params, put);
  const double call_vol = vol_threshold_call(c.params, call);

  Artifacts files(c, out);
  auto csv = files.csv();
  csv << "vol,call_barrier,put_barrier,bs_call,bs_put\n";
  for (int i = 1; i <= 60; ++i) {
    auto p = c.params;
    p.vol = 0.01 * i;
    csv << p.vol << ',' << call_barrier(p, call).value << ',' << put_barrier(p, put).value << ','
        << bs_call(p, call).value << ',' << bs_put(p, put).value << '\n';
  }
  files.write_json({{"vol_threshold_put", put_vol}, {"vol_threshold_call", call_vol}});
  out << "put threshold " << put_vol << ", call threshold " << call_vol << '\n';
  return kExitOk;
}

int cmd_paths(const RunConfig& c, std::ostream& out) {
  const Measure measure = c.mode == "real_world" ? Measure::real_world : Measure::risk_neutral;
  auto stream = simulate_batch(c.params, c.path_config(measure), c.paths);
  Artifacts files(c, out);
  auto csv = files.csv();
  write_paths_csv_header(csv);
  RunningStats terminal;
  while (auto path = stream.next()) {
    write_path_csv(csv, *path);
    terminal.add(path->observed.back());
  }
  files.write_json({{"n_paths", c.paths}, {"measure", to_string(measure)}, {"terminal_observed_mean", terminal.mean()}});
  return kExitOk;
}

}  // namespace

PathConfig RunConfig::path_config(Measure measure) const {
  PathConfig c;
  c.n_steps = steps;
  c.horizon = term;
  c.measure = measure;
  c.master_seed = seed;
  c.monitoring = monitoring;
  c.workers = workers;
  if (skew) c.skew = SkewLadder::standard();
  return c;
}

json RunConfig::to_json() const {
  return {{"command", command},
          {"spot", params.spot},
          {"barrier", params.barrier},
          {"strike", strike},
          {"rate", params.rate},
          {"yield", params.yield},
          {"vol", params.vol},
          {"term", term},
          {"drift", params.drift},
          {"kind", kind == OptionKind::call ? "call" : "put"},
          {"paths", paths},
          {"steps", steps},
          {"seed", seed},
          {"monitoring", to_string(monitoring)},
          {"skew", skew},
          {"mode", mode},
          {"ladder", ladder},
          {"assert_slope", assert_slope},
          {"strategy", strategy},
          {"bstar", bstar},
          {"cte", cte},
          {"growth", growth},
          {"loan", loan},
          {"margin", margin},
          {"ledger_paths", ledger_paths}};
}

std::string config_hash(const json& config) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Reflected-GBM option pricing, hedging and ERM studies", "rgbm"};
  app.set_config("--config", "", "flat key=value file; flags override its values");
  app.set_version_flag("--version", RGBM_VERSION);

  auto& p = c.params;
  app.add_option("--spot", p.spot, "current price")->capture_default_str();
  app.add_option("--barrier", p.barrier, "reflecting barrier (0 disables)")->capture_default_str();
  app.add_option("--strike", c.strike, "strike")->capture_default_str();
  app.add_option("--rate", p.rate, "risk-free rate")->capture_default_str();
  app.add_option("--yield", p.yield, "asset yield")->capture_default_str();
  app.add_option("--vol", p.vol, "volatility")->capture_default_str();
  app.add_option("--term", c.term, "years to maturity")->capture_default_str();
  app.add_option("--drift", p.drift, "real-world drift")->capture_default_str();
  app.add_option("--kind", c.kind, "call or put")
      ->transform(CLI::CheckedTransformer(std::map<std::string, OptionKind>{{"call", OptionKind::call},
                                                                            {"put", OptionKind::put}}));
  app.add_option("--paths", c.paths, "number of paths")->capture_default_str();
  app.add_option("--steps", c.steps, "time steps per path")->capture_default_str();
  app.add_option("--seed", c.seed, "master seed")->capture_default_str();
  app.add_option("--workers", c.workers, "worker threads; results do not depend on it")->capture_default_str();
  app.add_option("--monitoring", c.monitoring, "bridge or grid barrier monitoring")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Monitoring>{{"bridge", Monitoring::bridge},
                                                                            {"grid", Monitoring::grid}}));
  app.add_flag("--skew", c.skew, "skew-normal increments near the barrier");
  app.add_option("--mode", c.mode, "converge: pricing | replication; paths: risk_neutral | real_world");
  app.add_option("--ladder", c.ladder, "comma-separated path or step counts")->delimiter(',');
  app.add_flag("--assert-slope", c.assert_slope, "exit 3 unless the fitted slope lies in [-0.6, -0.4]");
  app.add_option("--strategy", c.strategy, "hedging strategy")->capture_default_str();
  app.add_option("--bstar", c.bstar, "assumed barrier for bstar_put")->capture_default_str();
  app.add_option("--cte", c.cte, "tail level for the interim loss ratio CTE")->capture_default_str();
  app.add_option("--growth", c.growth, "real-world growth for the forward gap")->capture_default_str();
  app.add_option("--loan", c.loan, "rolled-up loan at term")->capture_default_str();
  app.add_option("--margin", c.margin, "margin fraction reported with drawdowns")->capture_default_str();
  app.add_option("--ledger-paths", c.ledger_paths, "hedge: write full ledgers for this many paths");
  app.add_option("--out", c.out_dir, "output directory")->capture_default_str();

  const std::map<std::string, std::function<int(const RunConfig&, std::ostream&)>> commands = {
      {"price", cmd_price},         {"mc", cmd_mc},   {"converge", cmd_converge}, {"hedge", cmd_hedge},
      {"ilr", cmd_ilr},             {"arb", cmd_arb}, {"erm", cmd_erm},           {"thresholds", cmd_thresholds},
      {"paths", cmd_paths},
  };
  const std::map<std::string, std::string> help = {
      {"price", "closed-form quotes, deltas and parity residuals"},
      {"mc", "Monte Carlo call and put against the closed form"},
      {"converge", "pricing or replication convergence slope"},
      {"hedge", "replication errors of one strategy"},
      {"ilr", "interim loss ratio of the synthetic call"},
      {"arb", "net-delta arbitrage gains and borrowing"},
      {"erm", "ERM-let value and its bounds"},
      {"thresholds", "volatility thresholds and a price-vs-vol table"},
      {"paths", "dump simulated paths"},
  };
  for (const auto& [name, text] : help) {
    app.add_subcommand(name, text)->fallthrough()->callback([&c, name = name] { c.command = name; });
  }
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  // The interim loss ratio study runs at drift = rate unless one is given.
  if (c.command == "ilr" && app.get_option("--drift")->count() == 0) c.params.drift = c.params.rate;

  try {
    return commands.at(c.command)(c, out);
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << '\n';
    return kExitValidation;
  } catch (const AssertionFailure& e) {
    err << "assertion failed: " << e.what() << '\n';
    return kExitAssertion;
  }
}

}  // namespace rgbm::cli
