#include "rpqn/subsolver.hpp"

#include <cmath>
#include <stdexcept>

namespace rpqn {

std::optional<MetricFactors> factor_metric(const SpectralSplit& split, double gamma,
                                           double mu) {
  const double gh = gamma + mu;
  if (gh <= 0.0) throw std::invalid_argument("factor_metric: gamma + mu must be positive");
  MetricFactors fac;
  fac.gamma_hat = gh;
  fac.U1 = split.U1;
  fac.U2 = split.U2;
  const int r1 = fac.r1();
  const int r2 = fac.r2();

  if (r1 > 0) {
    Matrix M1 = Matrix::Identity(r1, r1) + fac.U1.transpose() * fac.U1 / gh;
    fac.chol1.compute(M1);
    if (fac.chol1.info() != Eigen::Success) return std::nullopt;  // cannot happen for finite U1
  }

  // W2 = B1_hat^{-1} U2, column by column through the SMW form
  fac.W2.resize(fac.U2.rows(), r2);
  if (r2 > 0) {
    if (r1 > 0) {
      fac.W2 = fac.U2 / gh -
               fac.U1 * fac.chol1.solve(fac.U1.transpose() * fac.U2) / (gh * gh);
    } else {
      fac.W2 = fac.U2 / gh;
    }
    Matrix M2 = Matrix::Identity(r2, r2) - fac.U2.transpose() * fac.W2;
    M2 = 0.5 * (M2 + M2.transpose());
    fac.chol2.compute(M2);
    if (fac.chol2.info() != Eigen::Success) return std::nullopt;  // B_hat not positive definite
  }
  if (r1 > 0 && r2 > 0)
    fac.cross = fac.U1.transpose() * fac.W2;
  else
    fac.cross = Matrix::Zero(r1, r2);
  return fac;
}

Vector apply_B1_inv(const MetricFactors& fac, const Vector& v) {
  const double gh = fac.gamma_hat;
  if (fac.r1() == 0) return v / gh;
  return v / gh - fac.U1 * fac.chol1.solve(fac.U1.transpose() * v) / (gh * gh);
}

Vector apply_B_inv(const MetricFactors& fac, const Vector& v) {
  Vector w = apply_B1_inv(fac, v);
  if (fac.r2() == 0) return w;
  return w + fac.W2 * fac.chol2.solve(fac.U2.transpose() * w);
}

Vector AlphaPair::stacked() const {
  Vector out(alpha1.size() + alpha2.size());
  out.head(alpha1.size()) = alpha1;
  out.tail(alpha2.size()) = alpha2;
  return out;
}

AlphaPair AlphaPair::split(const Vector& stacked, int r1) {
  AlphaPair a;
  a.alpha1 = stacked.head(r1);
  a.alpha2 = stacked.tail(stacked.size() - r1);
  return a;
}

namespace {

Vector shifted_point(const MetricFactors& fac, const Vector& y, const AlphaPair& a) {
  Vector z = y;
  if (fac.r2() > 0) z += fac.W2 * a.alpha2;
  if (fac.r1() > 0) z -= fac.U1 * a.alpha1 / fac.gamma_hat;
  return z;
}

}  // namespace

Vector eval_L(const MetricFactors& fac, const ScaledProxContext& ctx, const Vector& y,
              const AlphaPair& a) {
  if (ctx.gamma_hat != fac.gamma_hat)
    throw std::invalid_argument("eval_L: context metric does not match factors");
  const Vector z = shifted_point(fac, y, a);
  const Vector p = prox_scaled(ctx, z);
  Vector out(fac.r1() + fac.r2());
  if (fac.r1() > 0) {
    Vector w = y - p;
    if (fac.r2() > 0) w += fac.W2 * a.alpha2;
    out.head(fac.r1()) = fac.U1.transpose() * w + a.alpha1;
  }
  if (fac.r2() > 0) out.tail(fac.r2()) = fac.U2.transpose() * (y - p) + a.alpha2;
  return out;
}

Matrix eval_G(const MetricFactors& fac, const ScaledProxContext& ctx, const Vector& y,
              const AlphaPair& a) {
  if (ctx.gamma_hat != fac.gamma_hat)
    throw std::invalid_argument("eval_G: context metric does not match factors");
  const int r1 = fac.r1();
  const int r2 = fac.r2();
  const int r = r1 + r2;
  const Vector z = shifted_point(fac, y, a);

  // P(z) applied column-wise to [B0_hat^{-1} U1, -B1_hat^{-1} U2]
  Matrix PM(z.size(), r);
  for (int j = 0; j < r1; ++j)
    PM.col(j) = prox_newton_derivative_apply(ctx, z, fac.U1.col(j) / fac.gamma_hat);
  for (int j = 0; j < r2; ++j)
    PM.col(r1 + j) = prox_newton_derivative_apply(ctx, z, -fac.W2.col(j));

  Matrix G(r, r);
  if (r1 > 0) G.topRows(r1) = fac.U1.transpose() * PM;
  if (r2 > 0) G.bottomRows(r2) = fac.U2.transpose() * PM;
  G += Matrix::Identity(r, r);
  if (r1 > 0 && r2 > 0) G.topRightCorner(r1, r2) += fac.cross;
  return G;
}

namespace {

struct NewtonStep {
  Vector delta;
  bool ok = false;
};

NewtonStep newton_direction(const MetricFactors& fac, const ScaledProxContext& ctx,
                            const Vector& y, const AlphaPair& a, const Vector& L) {
  NewtonStep step;
  Matrix G = eval_G(fac, ctx, y, a);
  Eigen::FullPivLU<Matrix> lu(G);
  if (!lu.isInvertible()) {
    const double shift = 1e-12 * std::max(1.0, G.cwiseAbs().maxCoeff());
    G += shift * Matrix::Identity(G.rows(), G.cols());
    lu.compute(G);
    if (!lu.isInvertible()) return step;
  }
  step.delta = lu.solve(L);
  step.ok = true;
  return step;
}

}  // namespace

NewtonResult semismooth_newton(const MetricFactors& fac, const ScaledProxContext& ctx,
                               const Vector& y, const AlphaPair& alpha0, double tol,
                               int maxit) {
  NewtonResult res;
  res.alpha = alpha0;
  AlphaPair best = alpha0;
  double best_norm = std::numeric_limits<double>::infinity();

  // plain updates first; they converge in one or two iterations on
  // well-behaved instances
  for (int j = 0; j <= maxit; ++j) {
    const Vector L = eval_L(fac, ctx, y, res.alpha);
    const double norm = L.norm();
    if (norm < best_norm) {
      best_norm = norm;
      best = res.alpha;
    }
    if (norm < tol) {
      res.converged = true;
      res.residual = norm;
      res.iters = j;
      return res;
    }
    if (j == maxit) break;

    NewtonStep step = newton_direction(fac, ctx, y, res.alpha, L);
    if (!step.ok) break;
    res.alpha = AlphaPair::split(res.alpha.stacked() - step.delta, fac.r1());
    res.iters = j + 1;
  }

  // fallback: the plain iteration can cycle between pieces of the
  // nonsmooth system; restart from the best iterate with step halving on
  // the residual norm, which restores global convergence for this
  // strongly monotone system
  res.alpha = best;
  double norm = best_norm;
  for (int j = 0; j < maxit; ++j) {
    Vector L = eval_L(fac, ctx, y, res.alpha);
    norm = L.norm();
    if (norm < best_norm) {
      best_norm = norm;
      best = res.alpha;
    }
    if (norm < tol) {
      res.converged = true;
      res.residual = norm;
      return res;
    }
    NewtonStep step = newton_direction(fac, ctx, y, res.alpha, L);
    if (!step.ok) break;
    double tau = 1.0;
    AlphaPair candidate = res.alpha;
    while (tau > 1e-10) {
      candidate = AlphaPair::split(res.alpha.stacked() - tau * step.delta, fac.r1());
      if (eval_L(fac, ctx, y, candidate).norm() <= (1.0 - 1e-4 * tau) * norm) break;
      tau *= 0.5;
    }
    res.alpha = candidate;
    ++res.iters;
  }

  const Vector L = eval_L(fac, ctx, y, res.alpha);
  if (L.norm() < tol) {
    res.converged = true;
    res.residual = L.norm();
    return res;
  }
  res.converged = false;
  res.alpha = best;
  res.residual = best_norm;
  return res;
}

AlphaPair initial_alpha(const MetricFactors& fac, const Vector& y, const Vector* p_hint) {
  AlphaPair a = AlphaPair::zero(fac.r1(), fac.r2());
  if (p_hint == nullptr) return a;
  if (fac.r2() > 0) a.alpha2 = -fac.U2.transpose() * (y - *p_hint);
  if (fac.r1() > 0) {
    Vector w = y - *p_hint;
    if (fac.r2() > 0) w += fac.W2 * a.alpha2;
    a.alpha1 = -fac.U1.transpose() * w;
  }
  return a;
}

std::optional<ProxMetricResult> prox_metric(const MetricFactors& fac,
                                            const ScaledProxContext& ctx, const Vector& y,
                                            const Vector* p_hint, double tol, int maxit) {
  const int r1 = fac.r1();
  const int r2 = fac.r2();
  if (r1 == 0 && r2 == 0) {
    ProxMetricResult out;
    out.p = prox_scaled(ctx, y);
    return out;
  }
  NewtonResult nr = semismooth_newton(fac, ctx, y, initial_alpha(fac, y, p_hint), tol, maxit);
  if (!nr.converged) return std::nullopt;
  ProxMetricResult out;
  out.p = prox_scaled(ctx, shifted_point(fac, y, nr.alpha));
  out.newton_iters = nr.iters;
  return out;
}

std::optional<SubsolveResult> solve_subproblem(const Vector& x, const Vector& g,
                                               const MetricFactors& fac,
                                               const ScaledProxContext& ctx) {
  const Vector shifted = x - apply_B_inv(fac, g);
  // warm start from the prediction p = x, exact in the small-step limit
  auto pm = prox_metric(fac, ctx, shifted, &x);
  if (!pm) return std::nullopt;
  SubsolveResult out;
  out.d = pm->p - x;
  out.newton_iters = pm->newton_iters;
  return out;
}

}  // namespace rpqn
