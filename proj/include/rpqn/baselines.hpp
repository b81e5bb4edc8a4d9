#pragma once

#include "rpqn/problem.hpp"
#include "rpqn/solver.hpp"
#include "rpqn/trace.hpp"

namespace rpqn {

/// Accelerated proximal gradient with backtracking. The caller is
/// responsible for f being convex; the momentum sequence assumes it.
struct FistaConfig {
  double L0 = 1.0;  // initial Lipschitz estimate
  double eta = 2.0;
  long max_iter = 100000;

  StopMode mode = StopMode::ResidualStop;
  double tol_r = 1e-6;
  double psi_star = kNan;
  double tol_obj = 1e-6;

  void validate() const;
};

SolveResult fista_solve(const CompositeProblem& problem, const Vector& x0,
                        const FistaConfig& config);

/// Proximal gradient with a Barzilai-Borwein step scalar (s'y / s's,
/// clamped to [alpha_min, alpha_max]) and monotone sufficient-decrease
/// backtracking.
struct SparsaConfig {
  double alpha_min = 1e-30;
  double alpha_max = 1e30;
  double eta = 2.0;
  long max_iter = 100000;

  StopMode mode = StopMode::ResidualStop;
  double tol_r = 1e-6;
  double psi_star = kNan;
  double tol_obj = 1e-6;

  void validate() const;
};

SolveResult sparsa_solve(const CompositeProblem& problem, const Vector& x0,
                         const SparsaConfig& config);

}  // namespace rpqn
