#include "rgbm/erm.hpp"

#include <cmath>

#include "rgbm/closed_form.hpp"

namespace rgbm {

namespace {

OptionSpec loan_put(const ErmLet& erm) { return {OptionKind::put, erm.rolled_up_loan, erm.term}; }

}  // namespace

double ermlet_pv(const ModelParams& params, const ErmLet& erm) {
  const auto inputs = validate(params, loan_put(erm));
  return std::exp(-inputs.params.rate * erm.term) * erm.rolled_up_loan - put_barrier(params, loan_put(erm)).value;
}

ErmBoundsReport principle_ii_report(const ModelParams& params, const ErmLet& erm) {
  const auto inputs = validate(params, loan_put(erm));
  const ModelParams& p = inputs.params;
  ErmBoundsReport r;
  r.put = put_barrier(params, loan_put(erm)).value;
  const double loan_pv = std::exp(-p.rate * erm.term) * erm.rolled_up_loan;
  r.pv = loan_pv - r.put;
  r.bound_a = {loan_pv, r.pv <= loan_pv};
  const double prepaid_forward = p.spot * std::exp(-p.yield * erm.term);
  r.bound_b = {prepaid_forward, r.pv <= prepaid_forward};
  r.parity_limit = r.pv;
  return r;
}

}  // namespace rgbm
