#pragma once

#include "rpqn/lmqn.hpp"
#include "rpqn/prox.hpp"
#include "rpqn/rng.hpp"
#include "rpqn/types.hpp"

#include <functional>

// Independent reference implementations used only by the test suites. They
// deliberately avoid the production code paths they are checking.
namespace rpqn::testing {

/// Dense quasi-Newton recursion rebuilt from gamma I, applying the buffered
/// pairs oldest to newest. BFGS:
///   B <- B - (B s s' B)/(s' B s) + (y y')/(s' y)
/// SR1:
///   B <- B + ((y - B s)(y - B s)')/((y - B s)' s)
Matrix dense_qn_recursion(const PairBuffer& buf, double gamma, QnKind kind);

/// Dense matrix of the compact representation gamma I + A Q^{-1} A'.
Matrix dense_from_compact(const CompactRep& rep);

/// Dense matrix of a spectral split gamma I + U1 U1' - U2 U2'.
Matrix dense_from_split(const SpectralSplit& split, double gamma);

/// prox_phi^H(y) for a dense SPD H via the proximal-gradient fixed point
///   u <- prox_scaled(gamma_hat = Lip, u - H (u - y) / Lip),  Lip = lambda_max(H),
/// iterated until the fixed-point residual drops below 1e-12.
Vector oracle_prox_dense(const Matrix& H, const RegularizerSpec& spec, const Vector& y);

/// Second, independent route: exact blockwise coordinate descent on
///   phi(u) + 0.5 (u - y)' H (u - y)
/// run until the sweep displacement drops below 1e-12. Supports Zero, L1
/// and GroupL21.
Vector oracle_prox_coordinate_descent(const Matrix& H, const RegularizerSpec& spec,
                                      const Vector& y);

/// 1-D soft-threshold-free reference: minimizes lambda |v| + g/2 (v - x)^2
/// by ternary search on [-range, range].
double scalar_prox_bruteforce(double x, double lambda, double gamma_hat);

/// Blockwise reference for the group prox: the minimizer lies on the ray
/// through x, so minimize over the radial coordinate by ternary search.
Vector block_prox_bruteforce(const Vector& x, double lambda, double gamma_hat);

/// Componentwise central finite-difference gradient with per-component
/// step h_i = 1e-6 (1 + |x_i|).
Vector finite_difference_gradient(const std::function<double(const Vector&)>& f,
                                  const Vector& x);

/// Random vector / SPD matrix helpers driven by the library RNG.
Vector random_vector(Rng& rng, int n, double scale = 1.0);
Matrix random_spd(Rng& rng, int n, double cond_scale = 1.0);

/// Random regularizer over dimension n: variant 0 = L1, 1 = GroupL21 with
/// random contiguous blocks.
RegularizerSpec random_regularizer(Rng& rng, int n, int variant, double lambda);

/// Random pair set whose dense SR1 recursion stays well-conditioned; BFGS
/// pairs additionally pass the curvature test.
PairBuffer random_pair_buffer(Rng& rng, int n, int count, QnKind kind, double gamma);

}  // namespace rpqn::testing
