#include "rpqn/regularizer.hpp"

#include <cmath>
#include <stdexcept>

namespace rpqn {

RegularizerSpec RegularizerSpec::zero() { return {}; }

RegularizerSpec RegularizerSpec::l1(double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("l1: lambda must be positive");
  RegularizerSpec spec;
  spec.kind = Kind::L1;
  spec.lambda = lambda;
  return spec;
}

RegularizerSpec RegularizerSpec::group_l21(double lambda,
                                           std::vector<std::vector<int>> groups) {
  if (lambda <= 0.0) throw std::invalid_argument("group_l21: lambda must be positive");
  RegularizerSpec spec;
  spec.kind = Kind::GroupL21;
  spec.lambda = lambda;
  spec.groups = std::move(groups);
  return spec;
}

void RegularizerSpec::validate(int n) const {
  if (kind != Kind::Zero && lambda <= 0.0)
    throw std::invalid_argument("regularizer: lambda must be positive");
  if (kind == Kind::GroupL21) {
    std::vector<char> seen(n, 0);
    for (const auto& g : groups) {
      for (int i : g) {
        if (i < 0 || i >= n) throw std::invalid_argument("regularizer: group index out of range");
        if (seen[i]) throw std::invalid_argument("regularizer: groups overlap");
        seen[i] = 1;
      }
    }
    for (int i = 0; i < n; ++i)
      if (!seen[i]) throw std::invalid_argument("regularizer: groups do not cover all indices");
  }
}

double RegularizerSpec::eval(const Vector& x) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::L1:
      return lambda * x.lpNorm<1>();
    case Kind::GroupL21: {
      double sum = 0.0;
      for (const auto& g : groups) {
        double sq = 0.0;
        for (int i : g) sq += x[i] * x[i];
        sum += std::sqrt(sq);
      }
      return lambda * sum;
    }
  }
  return 0.0;
}

double eval_regularizer(const RegularizerSpec& spec, const Vector& x) {
  return spec.eval(x);
}

}  // namespace rpqn
