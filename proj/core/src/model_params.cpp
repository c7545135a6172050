#include "rgbm/model_params.hpp"

#include <cmath>
#include <sstream>

#include "rgbm/closed_form.hpp"
#include "rgbm/error.hpp"

namespace rgbm {

ModelParams reference_params() { return ModelParams{}; }

OptionSpec reference_spec(OptionKind kind) {
  OptionSpec spec;
  spec.kind = kind;
  return spec;
}

ModelParams validate_params(const ModelParams& params, DegeneracyPolicy policy,
                            std::vector<std::string>* diagnostics) {
  if (!(params.spot > 0.0)) throw Error(ErrorCode::NonPositiveSpot, "spot must be > 0");
  if (!(params.barrier >= 0.0)) throw Error(ErrorCode::NegativeBarrier, "barrier must be >= 0");
  if (!(params.barrier < params.spot)) {
    throw Error(ErrorCode::BarrierAboveSpot, "barrier must lie below spot");
  }
  if (!(params.vol > 0.0)) throw Error(ErrorCode::NonPositiveVol, "vol must be > 0");

  ModelParams out = params;
  if (std::fabs(params.rate - params.yield) < kRateYieldGuard) {
    if (policy == DegeneracyPolicy::reject) {
      throw Error(ErrorCode::RateYieldDegeneracy, "|rate - yield| below 1e-12");
    }
    // Shift the yield away from the rate (upwards when they coincide exactly).
    out.yield = params.yield < params.rate ? params.yield - kRateYieldShift
                                           : params.yield + kRateYieldShift;
    if (diagnostics) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "rate/yield guard: yield " << params.yield << " replaced by " << out.yield;
      diagnostics->push_back(msg.str());
    }
  }
  return out;
}

ValidatedInputs validate(const ModelParams& params, const OptionSpec& spec, DegeneracyPolicy policy) {
  ValidatedInputs out;
  out.params = validate_params(params, policy, &out.diagnostics);
  if (!(spec.strike > params.barrier)) {
    throw Error(ErrorCode::BarrierAboveStrike, "barrier must lie below strike");
  }
  if (!(spec.term > 0.0)) throw Error(ErrorCode::NonPositiveTerm, "term must be > 0");
  out.spec = spec;
  return out;
}

AuxQuantities aux_quantities(const ModelParams& params, const OptionSpec& spec) {
  const auto v = validate(params, spec);
  return formula::aux(formula::Point::from(v.params, v.spec));
}

}  // namespace rgbm
