#include "rpqn/baselines.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace rpqn {

void FistaConfig::validate() const {
  if (!(L0 > 0.0)) throw std::invalid_argument("fista: L0 must be positive");
  if (!(eta > 1.0)) throw std::invalid_argument("fista: eta must exceed 1");
  if (max_iter < 0) throw std::invalid_argument("fista: max_iter must be >= 0");
  if (mode == StopMode::ObjectiveErrorStop && !std::isfinite(psi_star))
    throw std::invalid_argument("fista: psi_star must be finite");
}

void SparsaConfig::validate() const {
  if (!(alpha_min > 0.0 && alpha_min < alpha_max))
    throw std::invalid_argument("sparsa: need 0 < alpha_min < alpha_max");
  if (!(eta > 1.0)) throw std::invalid_argument("sparsa: eta must exceed 1");
  if (max_iter < 0) throw std::invalid_argument("sparsa: max_iter must be >= 0");
  if (mode == StopMode::ObjectiveErrorStop && !std::isfinite(psi_star))
    throw std::invalid_argument("sparsa: psi_star must be finite");
}

namespace {

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

double obj_err(double psi, double psi_star) {
  return (psi - psi_star) / std::max(1.0, std::abs(psi_star));
}

}  // namespace

SolveResult fista_solve(const CompositeProblem& problem, const Vector& x0,
                        const FistaConfig& config) {
  config.validate();
  ScaledProxContext base{&problem.reg, 1.0, problem.counters.get()};

  SolveResult result;
  Clock clock;

  Vector x = x0;
  Vector y = x0;  // extrapolated point
  double psi = problem.f(x) + problem.phi(x);
  double res_norm = kNan;
  if (config.mode == StopMode::ResidualStop) res_norm = residual(problem, x).norm();
  double L = config.L0;
  double t = 1.0;

  result.status = SolveStatus::MaxIter;
  for (long k = 0; k <= config.max_iter; ++k) {
    const bool stop = (config.mode == StopMode::ResidualStop)
                          ? res_norm <= config.tol_r
                          : obj_err(psi, config.psi_star) <= config.tol_obj;
    if (stop) {
      result.status = SolveStatus::Converged;
      break;
    }
    if (k == config.max_iter) break;

    const double fy = problem.f(y);
    const Vector gy = problem.grad(y);

    // backtrack on the quadratic upper bound at y
    Vector x_next;
    double f_next = 0.0;
    int trials = 0;
    for (;;) {
      ++trials;
      ScaledProxContext ctx = base;
      ctx.gamma_hat = L;
      x_next = prox_scaled(ctx, y - gy / L);
      const Vector diff = x_next - y;
      const double bound = fy + gy.dot(diff) + 0.5 * L * diff.squaredNorm();
      f_next = problem.f(x_next);
      if (f_next <= bound + 1e-15 * std::abs(bound)) break;
      L *= config.eta;
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x_next + ((t - 1.0) / t_next) * (x_next - x);
    const double d_norm = (x_next - x).norm();
    x = std::move(x_next);
    t = t_next;
    psi = f_next + problem.phi(x);
    if (config.mode == StopMode::ResidualStop) res_norm = residual(problem, x).norm();

    IterationRecord rec;
    rec.k = k;
    rec.time_s = clock.elapsed();
    rec.psi = psi;
    if (std::isfinite(config.psi_star)) rec.obj_err = obj_err(psi, config.psi_star);
    rec.res_norm = res_norm;
    rec.mu = L;  // the scalar metric plays the regularization role here
    rec.step_class = StepClass::Successful;
    rec.d_norm = d_norm;
    rec.sub_iters = trials;
    rec.f_evals = problem.counters->f_evals.load();
    rec.g_evals = problem.counters->g_evals.load();
    rec.prox_evals = problem.counters->prox_evals.load();
    rec.matvecs = problem.counters->matvecs.load();
    result.trace.rows.push_back(std::move(rec));
  }
  result.x = x;
  result.psi = psi;
  result.res_norm = res_norm;
  return result;
}

SolveResult sparsa_solve(const CompositeProblem& problem, const Vector& x0,
                         const SparsaConfig& config) {
  config.validate();
  ScaledProxContext base{&problem.reg, 1.0, problem.counters.get()};
  constexpr double kSufficientDecrease = 1e-4;

  SolveResult result;
  Clock clock;

  Vector x = x0;
  double psi = problem.f(x) + problem.phi(x);
  Vector g = problem.grad(x);
  double res_norm = kNan;
  if (config.mode == StopMode::ResidualStop)
    res_norm = residual(problem, x, g).norm();

  bool have_prev = false;
  Vector x_prev, g_prev;
  double L = 1.0;

  result.status = SolveStatus::MaxIter;
  for (long k = 0; k <= config.max_iter; ++k) {
    const bool stop = (config.mode == StopMode::ResidualStop)
                          ? res_norm <= config.tol_r
                          : obj_err(psi, config.psi_star) <= config.tol_obj;
    if (stop) {
      result.status = SolveStatus::Converged;
      break;
    }
    if (k == config.max_iter) break;

    if (have_prev) {
      const Vector s = x - x_prev;
      const Vector yv = g - g_prev;
      const double ss = s.squaredNorm();
      if (ss > 0.0) {
        const double bb = s.dot(yv) / ss;
        L = std::min(std::max(bb, config.alpha_min), config.alpha_max);
      }
    }

    Vector x_next;
    double psi_next = 0.0;
    int trials = 0;
    for (;;) {
      ++trials;
      ScaledProxContext ctx = base;
      ctx.gamma_hat = L;
      x_next = prox_scaled(ctx, x - g / L);
      psi_next = problem.f(x_next) + problem.phi(x_next);
      const double decrease_needed = 0.5 * L * kSufficientDecrease * (x_next - x).squaredNorm();
      if (psi_next <= psi - decrease_needed) break;
      if (L >= config.alpha_max) {  // safeguard ceiling: refuse the move
        x_next = x;
        psi_next = psi;
        break;
      }
      L = std::min(L * config.eta, config.alpha_max);
    }

    x_prev = x;
    g_prev = g;
    have_prev = true;
    const double d_norm = (x_next - x).norm();
    x = std::move(x_next);
    psi = psi_next;
    g = problem.grad(x);
    if (config.mode == StopMode::ResidualStop)
      res_norm = residual(problem, x, g).norm();

    IterationRecord rec;
    rec.k = k;
    rec.time_s = clock.elapsed();
    rec.psi = psi;
    if (std::isfinite(config.psi_star)) rec.obj_err = obj_err(psi, config.psi_star);
    rec.res_norm = res_norm;
    rec.mu = L;
    rec.step_class = StepClass::Successful;
    rec.d_norm = d_norm;
    rec.sub_iters = trials;
    rec.f_evals = problem.counters->f_evals.load();
    rec.g_evals = problem.counters->g_evals.load();
    rec.prox_evals = problem.counters->prox_evals.load();
    rec.matvecs = problem.counters->matvecs.load();
    result.trace.rows.push_back(std::move(rec));
  }
  result.x = x;
  result.psi = psi;
  result.res_norm = res_norm;
  return result;
}

}  // namespace rpqn
