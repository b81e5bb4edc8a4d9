#pragma once

#include "rpqn/regularizer.hpp"
#include "rpqn/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

namespace rpqn {

/// Composite problem min psi(x) = f(x) + phi(x) with a smooth oracle for f
/// and a structured regularizer for phi. Immutable after construction;
/// oracle calls bump the shared counters.
struct CompositeProblem {
  int n = 0;
  std::function<double(const Vector&)> smooth_value;
  std::function<Vector(const Vector&)> smooth_gradient;
  RegularizerSpec reg;
  std::shared_ptr<EvalCounters> counters = std::make_shared<EvalCounters>();

  double f(const Vector& x) const {
    check_dim(x);
    counters->f_evals.fetch_add(1, std::memory_order_relaxed);
    return smooth_value(x);
  }

  Vector grad(const Vector& x) const {
    check_dim(x);
    counters->g_evals.fetch_add(1, std::memory_order_relaxed);
    return smooth_gradient(x);
  }

  double phi(const Vector& x) const { return reg.eval(x); }

  void count_prox(long k = 1) const {
    counters->prox_evals.fetch_add(k, std::memory_order_relaxed);
  }

  void check_dim(const Vector& x) const;
};

double eval_objective(const CompositeProblem& problem, const Vector& x);

/// Dense least-squares data f(x) = 0.5 * ||A x - b||^2.
struct DenseLeastSquaresData {
  Matrix A;
  Vector b;
};

struct GeneratedInstance {
  CompositeProblem problem;
  DenseLeastSquaresData data;
  RegularizerSpec reg;
};

/// Group-sparse least squares: n = 25k, m = 16k, entries of A and b uniform
/// on [0,1], lambda = 1, contiguous random groups of 4..12 indices (a
/// remainder of fewer than 4 is merged into the last group). Deterministic
/// per seed.
GeneratedInstance make_group_lasso(std::uint64_t seed, int k);

/// l1-regularized least squares with standard-normal A and b.
GeneratedInstance make_lasso(std::uint64_t seed, int n, int m, double lambda);

/// Orthonormal 2D Haar transform of `levels` levels applied to a square
/// image stored row-major in a vector of length side*side. side must be
/// divisible by 2^levels. The inverse is the exact adjoint.
Vector haar2d(const Vector& image, int side, int levels);
Vector haar2d_inverse(const Vector& coeffs, int side, int levels);

/// 2D convolution with the normalized 9x9 Gaussian kernel (sigma = 4) under
/// half-sample symmetric (reflective) boundary handling, and its exact
/// adjoint.
Vector gaussian_blur_apply(const Vector& image, int side);
Vector gaussian_blur_adjoint(const Vector& image, int side);

/// Deterministic piecewise-constant test image on [0,1], side x side.
Vector make_test_image(int side);

struct StudentTInstance {
  CompositeProblem problem;  // in wavelet coordinates y
  Vector observed;           // b = A(image) + noise, length side^2
  Vector original;           // clean test image
  int side = 0;
  int levels = 4;
};

/// Nonconvex restoration in wavelet coordinates:
///   f(y) = sum_i log((A B^T y - b)_i^2 + 1),  phi = lambda ||y||_1,
/// with A the 9x9 Gaussian blur and B the level-4 2D Haar transform.
/// b is the blurred test image plus Student-t (nu = 1) noise scaled by
/// noise_scale. side must be a power of two >= 16.
StudentTInstance make_student_t_restoration(std::uint64_t seed, int side, double lambda,
                                            double noise_scale);

}  // namespace rpqn
