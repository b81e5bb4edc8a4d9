#include "rpqn/prox.hpp"

#include <cmath>
#include <stdexcept>

namespace rpqn {

namespace {

double soft(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

}  // namespace

Vector prox_scaled(const ScaledProxContext& ctx, const Vector& x) {
  if (ctx.spec == nullptr || ctx.gamma_hat <= 0.0)
    throw std::invalid_argument("prox_scaled: invalid context");
  if (ctx.counters) ctx.counters->prox_evals.fetch_add(1, std::memory_order_relaxed);
  const RegularizerSpec& spec = *ctx.spec;
  switch (spec.kind) {
    case RegularizerSpec::Kind::Zero:
      return x;
    case RegularizerSpec::Kind::L1: {
      const double t = spec.lambda / ctx.gamma_hat;
      Vector p(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) p[i] = soft(x[i], t);
      return p;
    }
    case RegularizerSpec::Kind::GroupL21: {
      const double t = spec.lambda / ctx.gamma_hat;
      Vector p = Vector::Zero(x.size());
      for (const auto& g : spec.groups) {
        double sq = 0.0;
        for (int i : g) sq += x[i] * x[i];
        const double norm = std::sqrt(sq);
        if (norm > t) {
          const double scale = 1.0 - t / norm;
          for (int i : g) p[i] = scale * x[i];
        }
      }
      return p;
    }
  }
  return x;
}

Vector prox_newton_derivative_apply(const ScaledProxContext& ctx, const Vector& x,
                                    const Vector& v) {
  if (ctx.spec == nullptr || ctx.gamma_hat <= 0.0)
    throw std::invalid_argument("prox_newton_derivative_apply: invalid context");
  const RegularizerSpec& spec = *ctx.spec;
  switch (spec.kind) {
    case RegularizerSpec::Kind::Zero:
      return v;
    case RegularizerSpec::Kind::L1: {
      const double t = spec.lambda / ctx.gamma_hat;
      Vector out = Vector::Zero(v.size());
      for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::abs(x[i]) >= t) out[i] = v[i];
      return out;
    }
    case RegularizerSpec::Kind::GroupL21: {
      const double t = spec.lambda / ctx.gamma_hat;
      Vector out = Vector::Zero(v.size());
      for (const auto& g : spec.groups) {
        double sq = 0.0, dot = 0.0;
        for (int i : g) {
          sq += x[i] * x[i];
          dot += x[i] * v[i];
        }
        const double norm = std::sqrt(sq);
        if (norm >= t && norm > 0.0) {
          const double a = 1.0 - t / norm;
          const double b = t / (norm * norm * norm);
          for (int i : g) out[i] = a * v[i] + b * dot * x[i];
        }
      }
      return out;
    }
  }
  return v;
}

}  // namespace rpqn
