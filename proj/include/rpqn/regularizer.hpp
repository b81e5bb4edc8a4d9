#pragma once

#include "rpqn/types.hpp"

#include <vector>

namespace rpqn {

/// Nonsmooth part of a composite objective. Three variants:
///   Zero              phi(x) = 0
///   L1                phi(x) = lambda * ||x||_1
///   GroupL21          phi(x) = lambda * sum_j ||x_{I_j}||_2
/// For GroupL21 the index sets I_j must partition {0..n-1}.
struct RegularizerSpec {
  enum class Kind { Zero, L1, GroupL21 };

  Kind kind = Kind::Zero;
  double lambda = 0.0;
  std::vector<std::vector<int>> groups;  // GroupL21 only

  static RegularizerSpec zero();
  static RegularizerSpec l1(double lambda);
  static RegularizerSpec group_l21(double lambda, std::vector<std::vector<int>> groups);

  /// Throws std::invalid_argument if lambda or the group partition is
  /// inconsistent with dimension n.
  void validate(int n) const;

  double eval(const Vector& x) const;
};

double eval_regularizer(const RegularizerSpec& spec, const Vector& x);

}  // namespace rpqn
