#pragma once

#include "rpqn/lmqn.hpp"
#include "rpqn/prox.hpp"
#include "rpqn/types.hpp"

#include <optional>

namespace rpqn {

/// Factored variable metric
///   B_hat = gamma_hat I + U1 U1' - U2 U2',   gamma_hat = gamma + mu,
/// with cached small Cholesky factors for Sherman-Morrison-Woodbury
/// applications of B1_hat^{-1} and B_hat^{-1}, where B1_hat = gamma_hat I
/// + U1 U1':
///   B1_hat^{-1} = g^{-1} I - g^{-2} U1 (I + g^{-1} U1'U1)^{-1} U1'
///   B_hat^{-1}  = B1_hat^{-1} + B1_hat^{-1} U2 (I - U2' B1_hat^{-1} U2)^{-1} U2' B1_hat^{-1}
/// The second Cholesky existing is equivalent (Schur complement) to B_hat
/// being positive definite, which is how indefiniteness is detected.
struct MetricFactors {
  double gamma_hat = 1.0;
  Matrix U1;     // n x r1
  Matrix U2;     // n x r2
  Matrix W2;     // B1_hat^{-1} U2, n x r2
  Matrix cross;  // U1' B1_hat^{-1} U2, r1 x r2
  Eigen::LLT<Matrix> chol1;  // I + g^{-1} U1'U1
  Eigen::LLT<Matrix> chol2;  // I - U2' B1_hat^{-1} U2

  int r1() const { return static_cast<int>(U1.cols()); }
  int r2() const { return static_cast<int>(U2.cols()); }
};

/// Builds the factors for gamma_hat = gamma + mu. Returns nullopt when the
/// metric is not positive definite; that outcome is routed to the outer
/// method's unsuccessful-step branch, not raised as an error.
std::optional<MetricFactors> factor_metric(const SpectralSplit& split, double gamma,
                                           double mu);

Vector apply_B1_inv(const MetricFactors& fac, const Vector& v);
Vector apply_B_inv(const MetricFactors& fac, const Vector& v);

/// Stacked alpha = (alpha1, alpha2) in R^{r1 + r2}.
struct AlphaPair {
  Vector alpha1;
  Vector alpha2;

  static AlphaPair zero(int r1, int r2) { return {Vector::Zero(r1), Vector::Zero(r2)}; }
  Vector stacked() const;
  static AlphaPair split(const Vector& stacked, int r1);
};

/// Coupled residual whose unique zero characterizes the variable-metric
/// prox. With z = y + B1_hat^{-1} U2 a2 - B0_hat^{-1} U1 a1 and
/// p = prox_scaled(ctx, z):
///   L1 = U1'(y + B1_hat^{-1} U2 a2 - p) + a1
///   L2 = U2'(y - p) + a2
Vector eval_L(const MetricFactors& fac, const ScaledProxContext& ctx, const Vector& y,
              const AlphaPair& a);

/// Newton derivative of eval_L:
///   G = [U1 U2]' P(z) [B0_hat^{-1} U1, -B1_hat^{-1} U2] + [[I, U1'B1_hat^{-1}U2], [0, I]]
Matrix eval_G(const MetricFactors& fac, const ScaledProxContext& ctx, const Vector& y,
              const AlphaPair& a);

struct NewtonResult {
  AlphaPair alpha;
  bool converged = false;
  int iters = 0;           // Newton updates performed
  double residual = kNan;  // ||L|| at the returned alpha
};

/// Semismooth Newton iteration a <- a - G^{-1} L(a). Returns the first
/// iterate with ||L|| < tol; after maxit the best iterate seen is returned
/// with converged = false. A singular G is retried once with a small
/// diagonal shift.
NewtonResult semismooth_newton(const MetricFactors& fac, const ScaledProxContext& ctx,
                               const Vector& y, const AlphaPair& alpha0,
                               double tol = 1e-10, int maxit = 10);

struct ProxMetricResult {
  Vector p;
  int newton_iters = 0;
};

/// Newton start derived from a prediction p_hint of the prox output by
/// solving the coupled system as if prox(z) equalled p_hint:
///   a2 = -U2'(y - p_hint),  a1 = -U1'(y + B1_hat^{-1} U2 a2 - p_hint).
/// Exact when the prediction is; without a hint the start is zero.
AlphaPair initial_alpha(const MetricFactors& fac, const Vector& y, const Vector* p_hint);

/// prox with respect to B_hat, assembled from the Newton solution:
///   prox^{B_hat}(y) = prox^{B0_hat}(y + B1_hat^{-1} U2 a2* - B0_hat^{-1} U1 a1*)
/// Returns nullopt when the inner Newton method fails to converge.
std::optional<ProxMetricResult> prox_metric(const MetricFactors& fac,
                                            const ScaledProxContext& ctx, const Vector& y,
                                            const Vector* p_hint = nullptr,
                                            double tol = 1e-10, int maxit = 10);

struct SubsolveResult {
  Vector d;
  int newton_iters = 0;
};

/// Exact minimizer of the regularized model:
///   d = prox^{B_hat}(x - B_hat^{-1} g) - x.
std::optional<SubsolveResult> solve_subproblem(const Vector& x, const Vector& g,
                                               const MetricFactors& fac,
                                               const ScaledProxContext& ctx);

}  // namespace rpqn
