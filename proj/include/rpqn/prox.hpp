#pragma once

#include "rpqn/regularizer.hpp"
#include "rpqn/types.hpp"

namespace rpqn {

/// Scalar-metric proximity context: solves
///   argmin_y phi(y) + (gamma_hat/2) * ||y - x||^2
/// i.e. the proximity operator with respect to gamma_hat * I. When counters
/// is set, every prox_scaled call bumps prox_evals.
struct ScaledProxContext {
  const RegularizerSpec* spec = nullptr;
  double gamma_hat = 1.0;
  EvalCounters* counters = nullptr;
};

/// Closed-form scaled proximity operator.
///   Zero     -> x
///   L1       -> componentwise soft threshold at t = lambda / gamma_hat
///   GroupL21 -> blockwise shrinkage x_g * max{1 - t/||x_g||, 0}
Vector prox_scaled(const ScaledProxContext& ctx, const Vector& x);

/// Applies a Newton derivative P(x) of prox_scaled to v, as an operator
/// (no dense n x n matrix is formed).
///   L1:    P_ii = 1 if |x_i| >= t, else 0
///   Group: (1 - t/||x||) I + (t/||x||^3) x x^T  if ||x|| >= t, else 0
/// Ties ||x|| = t take the active branch.
Vector prox_newton_derivative_apply(const ScaledProxContext& ctx, const Vector& x,
                                    const Vector& v);

}  // namespace rpqn
