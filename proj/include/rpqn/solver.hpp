#pragma once

#include "rpqn/lmqn.hpp"
#include "rpqn/problem.hpp"
#include "rpqn/subsolver.hpp"
#include "rpqn/trace.hpp"
#include "rpqn/types.hpp"

namespace rpqn {

/// Outer-loop parameters. Defaults follow the tuning used throughout the
/// benchmark experiments: mu0 = 1, p_min = c1 = 1e-4, c2 = 0.9,
/// sigma1 = 0.5, sigma2 = 4, pair-skip threshold 1e-8.
struct RpqnConfig {
  double mu0 = 1.0;
  double p_min = 1e-4;
  double c1 = 1e-4;
  double c2 = 0.9;
  double sigma1 = 0.5;
  double sigma2 = 4.0;
  double eps_skip = 1e-8;
  // floor applied to the sigma1 decrease: long success streaks would
  // otherwise drive mu to floating-point zero, where the sigma2 recovery
  // multiplication can never raise it again
  double mu_min = 1e-20;
  int memory = 5;
  QnKind kind = QnKind::Bfgs;
  long max_iter = 10000;

  StopMode mode = StopMode::ResidualStop;
  double tol_r = 1e-6;       // ResidualStop: ||r(x)||_2 <= tol_r
  double psi_star = kNan;    // ObjectiveErrorStop reference value
  double tol_obj = 1e-6;     // ObjectiveErrorStop: (psi - psi*)/max(1,|psi*|) <= tol_obj

  void validate() const;  // throws std::invalid_argument on range violations
};

struct RpqnState {
  Vector x;
  double mu = 1.0;
  PairBuffer buffer;
  double gamma = 1.0;
  long k = 0;
  double fx = 0.0;
  double phix = 0.0;
  double psi = 0.0;     // fx + phix, consistent with x
  Vector grad;          // gradient of f at x
  double res_norm = 0;  // ||r(x)||, consistent with x
};

RpqnState init_state(const CompositeProblem& problem, const Vector& x0,
                     const RpqnConfig& config);

/// Stationarity residual r(x) = prox_phi(x - grad f(x)) - x (identity
/// metric). The overload taking the gradient avoids a second oracle call
/// when the caller already holds it.
Vector residual(const CompositeProblem& problem, const Vector& x);
Vector residual(const CompositeProblem& problem, const Vector& x, const Vector& grad_x);

/// pred = -(g'd + phi(x+d) - phi(x)) - 0.5 d'Bd. Note: B enters, not
/// B + mu I; the regularization term is excluded from the model decrease.
double predicted_reduction(const Vector& g, const Vector& d, double phi_x, double phi_xd,
                           const Vector& Bd);

/// rho <= c1 unsuccessful, c1 < rho <= c2 successful, rho > c2 highly
/// successful.
StepClass classify_step(double rho, double c1, double c2);

/// One outer iteration: build the compact metric from the buffer, solve the
/// regularized subproblem, gate on the predicted reduction, take or reject
/// the step and update mu. Indefinite metrics and inner-solver failures are
/// routed to the unsuccessful branch. Returns the iteration record
/// (counters and timing left for the caller to fill).
IterationRecord rpqn_step(const CompositeProblem& problem, RpqnState& state,
                          const RpqnConfig& config);

struct SolveResult {
  Vector x;
  double psi = kNan;
  double res_norm = kNan;
  SolveStatus status = SolveStatus::MaxIter;
  TraceTable trace;
};

SolveResult solve(const CompositeProblem& problem, const Vector& x0,
                  const RpqnConfig& config);

}  // namespace rpqn
