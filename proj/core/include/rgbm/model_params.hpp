#pragma once

#include <string>
#include <vector>

namespace rgbm {

enum class OptionKind { call, put };

/// Market and model inputs. Prices are usually spot-normalised (spot = 1) but
/// every formula is homogeneous of degree one in (spot, strike, barrier).
struct ModelParams {
  double spot = 1.0;
  double barrier = 0.5;
  double rate = 0.015;   // continuously compounded risk-free rate
  double yield = 0.01;   // continuous asset yield (deferment rate)
  double vol = 0.13;     // volatility of the notional (unreflected) price
  double drift = 0.03;   // real-world total return, used only for real-world paths
};

struct OptionSpec {
  OptionKind kind = OptionKind::put;
  double strike = 1.0;
  double term = 25.0;
};

/// Default scenario: S=1, b=0.5, K=1, r=1.5%, q=1%, sigma=13%, T=25y, mu=3%.
ModelParams reference_params();
OptionSpec reference_spec(OptionKind kind = OptionKind::put);

/// Rates closer than this are treated as equal.
inline constexpr double kRateYieldGuard = 1e-12;
/// Shift applied to the yield when the guard trips.
inline constexpr double kRateYieldShift = 1e-10;

enum class DegeneracyPolicy { perturb, reject };

struct ValidatedInputs {
  ModelParams params;
  OptionSpec spec;
  std::vector<std::string> diagnostics;
};

/// Checks spot > 0, 0 <= b < min(S, K), vol > 0, term > 0 and the rate/yield
/// guard. Throws rgbm::Error on failure. With DegeneracyPolicy::perturb an
/// r == q input is nudged (yield moved 1e-10 away from the rate) and a
/// diagnostic is attached; otherwise the inputs come back unchanged.
ValidatedInputs validate(const ModelParams& params, const OptionSpec& spec,
                         DegeneracyPolicy policy = DegeneracyPolicy::perturb);

/// Parameter-only checks (no strike), used where no option is involved.
ModelParams validate_params(const ModelParams& params,
                            DegeneracyPolicy policy = DegeneracyPolicy::perturb,
                            std::vector<std::string>* diagnostics = nullptr);

struct AuxQuantities {
  double theta = 0.0;  // 2 (r - q) / sigma^2
  double z1 = 0.0;
  double z2 = 0.0;
  double z3 = 0.0;
  double z4 = 0.0;
};

/// Standardised arguments of the barrier formulas.
AuxQuantities aux_quantities(const ModelParams& params, const OptionSpec& spec);

}  // namespace rgbm
