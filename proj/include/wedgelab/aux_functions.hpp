#pragma once

#include "wedgelab/cone.hpp"

namespace wedgelab {

// Regime-dependent barrier functions on the punctured shell 0 < |x| <= delta_star.
// alpha <= 0 carries a single function V (blows up at the tip, nonincreasing
// along reflections); 0 < alpha < 1 carries the pair V1 (sub-) / V2 (super-)
// vanishing at the tip. All carry closed-form gradients and Laplacians.
struct AuxFunctionSet {
  Regime regime = Regime::alpha_zero;
  Vector2d e = Vector2d::Zero();
  double c_e = 0.0;
  double c_V = 1.0;        // scaling of the e-term in the alpha <= 0 regime
  double delta_star = 0.0; // certified shell radius (<= the requested one)
  ScalarField V;           // alpha <= 0
  ScalarField V1, V2;      // 0 < alpha < 1
};

// Builds the barrier set, shrinking the requested shell radius on a halving
// grid until every required strict inequality holds with margin; errors when
// alpha >= 1.
AuxFunctionSet aux_functions(const WedgeSpec& spec, double delta_star);

// Grid approximation of the double ratio
//   inf_d (min_{|u|=d} V1 / max_{|u|=d} V2) * inf_d (min_{|u|=d} V2 / max_{|u|=d} V1)
// over 0 < d <= delta_star; refined (grid doubling) until stable to 1%.
// Only defined in the 0 < alpha < 1 regime.
double hitting_ratio_constant(const WedgeSpec& spec, double delta_star, int initial_grid = 48);

}  // namespace wedgelab
