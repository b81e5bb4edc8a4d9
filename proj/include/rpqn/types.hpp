#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <limits>

namespace rpqn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

enum class QnKind { Bfgs, Sr1 };

enum class StepClass { Unsuccessful, Successful, HighlySuccessful };

enum class SolveStatus { Converged, MaxIter };

enum class StopMode { ResidualStop, ObjectiveErrorStop };

/// Evaluation counters shared by a problem instance and the solvers
/// running on it. Incremented on every oracle call; atomics so problem
/// objects stay shareable across threads.
struct EvalCounters {
  std::atomic<long> f_evals{0};
  std::atomic<long> g_evals{0};
  std::atomic<long> prox_evals{0};
  std::atomic<long> matvecs{0};

  void reset() {
    f_evals = 0;
    g_evals = 0;
    prox_evals = 0;
    matvecs = 0;
  }
};

}  // namespace rpqn
