#include "rpqn/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace rpqn {

void RpqnConfig::validate() const {
  if (!(mu0 > 0.0)) throw std::invalid_argument("config: mu0 must be positive");
  if (!(p_min > 0.0 && p_min < 0.5)) throw std::invalid_argument("config: p_min not in (0, 1/2)");
  if (!(c1 > 0.0 && c1 < 0.5)) throw std::invalid_argument("config: c1 not in (0, 1/2)");
  if (!(c2 > c1 && c2 < 1.0)) throw std::invalid_argument("config: c2 not in (c1, 1)");
  if (!(sigma1 > 0.0 && sigma1 < 1.0)) throw std::invalid_argument("config: sigma1 not in (0, 1)");
  if (!(sigma2 > 1.0)) throw std::invalid_argument("config: sigma2 must exceed 1");
  if (!(eps_skip > 0.0)) throw std::invalid_argument("config: eps_skip must be positive");
  if (!(mu_min > 0.0)) throw std::invalid_argument("config: mu_min must be positive");
  if (memory < 0) throw std::invalid_argument("config: memory must be >= 0");
  if (max_iter < 0) throw std::invalid_argument("config: max_iter must be >= 0");
  if (mode == StopMode::ResidualStop) {
    if (!(tol_r > 0.0)) throw std::invalid_argument("config: tol_r must be positive");
  } else {
    if (!std::isfinite(psi_star)) throw std::invalid_argument("config: psi_star must be finite");
    if (!(tol_obj > 0.0)) throw std::invalid_argument("config: tol_obj must be positive");
  }
}

Vector residual(const CompositeProblem& problem, const Vector& x) {
  return residual(problem, x, problem.grad(x));
}

Vector residual(const CompositeProblem& problem, const Vector& x, const Vector& grad_x) {
  ScaledProxContext ctx{&problem.reg, 1.0, problem.counters.get()};
  return prox_scaled(ctx, x - grad_x) - x;
}

double predicted_reduction(const Vector& g, const Vector& d, double phi_x, double phi_xd,
                           const Vector& Bd) {
  return -(g.dot(d) + phi_xd - phi_x) - 0.5 * d.dot(Bd);
}

StepClass classify_step(double rho, double c1, double c2) {
  if (rho <= c1) return StepClass::Unsuccessful;
  if (rho <= c2) return StepClass::Successful;
  return StepClass::HighlySuccessful;
}

RpqnState init_state(const CompositeProblem& problem, const Vector& x0,
                     const RpqnConfig& config) {
  RpqnState state;
  state.x = x0;
  state.mu = config.mu0;
  state.buffer = PairBuffer(config.memory);
  state.gamma = 1.0;
  state.k = 0;
  state.fx = problem.f(x0);
  state.phix = problem.phi(x0);
  state.psi = state.fx + state.phix;
  state.grad = problem.grad(x0);
  state.res_norm = residual(problem, x0, state.grad).norm();
  return state;
}

IterationRecord rpqn_step(const CompositeProblem& problem, RpqnState& state,
                          const RpqnConfig& config) {
  IterationRecord rec;
  rec.k = state.k;
  rec.psi = state.psi;
  rec.res_norm = state.res_norm;
  rec.mu = state.mu;
  rec.step_class = StepClass::Unsuccessful;

  const auto unsuccessful = [&] {
    state.mu *= config.sigma2;
    ++state.k;
    return rec;
  };

  CompactRep rep = build_compact(state.buffer, state.gamma, config.kind);
  // The drop threshold guards against ill-conditioned directions, which is
  // relative to Q's scale; Q's entries shrink like ||s||^2, so an absolute
  // threshold would discard all curvature once steps get small.
  double eps_eff = config.eps_skip;
  if (rep.s_dim() > 0)
    eps_eff = config.eps_skip * std::max(rep.Q.cwiseAbs().maxCoeff(), 1e-300);
  SpectralSplit split;
  try {
    split = eigensplit(rep, eps_eff);
  } catch (const std::runtime_error&) {
    return unsuccessful();
  }

  auto fac = factor_metric(split, state.gamma, state.mu);
  if (!fac) return unsuccessful();  // B + mu I not positive definite

  ScaledProxContext ctx{&problem.reg, fac->gamma_hat, problem.counters.get()};
  auto sub = solve_subproblem(state.x, state.grad, *fac, ctx);
  if (!sub) {
    rec.sub_converged = false;  // inner Newton failed: treat as no solution
    return unsuccessful();
  }
  rec.sub_iters = sub->newton_iters;

  const Vector& d = sub->d;
  rec.d_norm = d.norm();

  // After the eigensplit the metric actually used is
  // gamma I + U1 U1' - U2 U2' (+ mu I); pred must use the same B.
  const Vector Bd = apply_B_split(split, state.gamma, d);
  const Vector xd = state.x + d;
  const double phi_xd = problem.phi(xd);
  const double pred = predicted_reduction(state.grad, d, state.phix, phi_xd, Bd);
  rec.pred = pred;

  if (pred <= config.p_min * rec.d_norm * state.res_norm) return unsuccessful();
  if (pred < 1e-30) return unsuccessful();  // degenerate: do not trust the ratio

  const double f_xd = problem.f(xd);
  const double psi_xd = f_xd + phi_xd;
  const double ared = state.psi - psi_xd;
  rec.ared = ared;

  const double rho = ared / pred;
  rec.rho = rho;
  rec.step_class = classify_step(rho, config.c1, config.c2);

  if (rec.step_class == StepClass::Unsuccessful) return unsuccessful();

  // accepted step
  Vector grad_new = problem.grad(xd);
  const Vector s = d;
  const Vector y = grad_new - state.grad;
  const PushResult push = push_pair(state.buffer, s, y, config.kind, config.eps_skip);
  rec.skipped_pair = (push == PushResult::Skipped);
  if (push == PushResult::Accepted) state.gamma = gamma_init(s, y, state.gamma);

  state.x = xd;
  state.fx = f_xd;
  state.phix = phi_xd;
  state.psi = psi_xd;
  state.grad = std::move(grad_new);
  state.res_norm = residual(problem, state.x, state.grad).norm();
  if (rec.step_class == StepClass::HighlySuccessful)
    state.mu = std::max(config.sigma1 * state.mu, config.mu_min);
  ++state.k;
  return rec;
}

namespace {

bool stop_reached(const RpqnState& state, const RpqnConfig& config) {
  if (config.mode == StopMode::ResidualStop) return state.res_norm <= config.tol_r;
  return (state.psi - config.psi_star) / std::max(1.0, std::abs(config.psi_star)) <=
         config.tol_obj;
}

}  // namespace

SolveResult solve(const CompositeProblem& problem, const Vector& x0,
                  const RpqnConfig& config) {
  config.validate();
  RpqnState state = init_state(problem, x0, config);

  SolveResult result;
  const auto t0 = std::chrono::steady_clock::now();
  result.status = SolveStatus::MaxIter;
  for (long k = 0; k <= config.max_iter; ++k) {
    if (stop_reached(state, config)) {
      result.status = SolveStatus::Converged;
      break;
    }
    if (k == config.max_iter) break;
    IterationRecord rec = rpqn_step(problem, state, config);
    rec.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (std::isfinite(config.psi_star))
      rec.obj_err = (rec.psi - config.psi_star) / std::max(1.0, std::abs(config.psi_star));
    rec.f_evals = problem.counters->f_evals.load();
    rec.g_evals = problem.counters->g_evals.load();
    rec.prox_evals = problem.counters->prox_evals.load();
    rec.matvecs = problem.counters->matvecs.load();
    result.trace.rows.push_back(std::move(rec));
  }
  result.x = state.x;
  result.psi = state.psi;
  result.res_norm = state.res_norm;
  return result;
}

}  // namespace rpqn
