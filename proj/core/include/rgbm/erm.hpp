#pragma once

#include "rgbm/model_params.hpp"

namespace rgbm {

/// Single-period equity release mortgage cash flow min(K_T, S_T) at term T.
struct ErmLet {
  double rolled_up_loan = 1.0;  // K_T
  double term = 25.0;
};

/// e^{-rT} K_T less the barrier-model no-negative-equity put struck at K_T.
double ermlet_pv(const ModelParams& params, const ErmLet& erm);

struct BoundCheck {
  double limit = 0.0;
  bool holds = false;
};

struct ErmBoundsReport {
  double pv = 0.0;
  double put = 0.0;
  BoundCheck bound_a;     // pv <= e^{-rT} K_T
  BoundCheck bound_b;     // pv <= S e^{-qT}, the prepaid forward
  double parity_limit = 0.0;  // e^{-rT} K_T - P_B, the limit the barrier model implies
};

ErmBoundsReport principle_ii_report(const ModelParams& params, const ErmLet& erm);

}  // namespace rgbm
