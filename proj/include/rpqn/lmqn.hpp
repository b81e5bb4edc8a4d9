#pragma once

#include "rpqn/types.hpp"

#include <deque>
#include <memory>
#include <utility>

namespace rpqn {

enum class PushResult { Accepted, Skipped };

/// FIFO buffer of curvature pairs (s, y), oldest first, capacity `memory`.
class PairBuffer {
 public:
  explicit PairBuffer(int memory = 0);

  int memory() const { return memory_; }
  int size() const { return static_cast<int>(pairs_.size()); }
  bool empty() const { return pairs_.empty(); }
  const Vector& s(int i) const { return pairs_[i].first; }
  const Vector& y(int i) const { return pairs_[i].second; }

  void push(Vector s, Vector y);  // evicts the oldest pair when full
  void clear() { pairs_.clear(); }

 private:
  int memory_;
  std::deque<std::pair<Vector, Vector>> pairs_;
};

/// Gated insertion. BFGS skips the pair iff s'y < eps * ||s||^2 (the update
/// would not stay positive definite); SR1 always stores, ill-conditioning is
/// handled later by the eigensplit. s = 0 is always skipped.
PushResult push_pair(PairBuffer& buf, const Vector& s, const Vector& y, QnKind kind,
                     double eps);

/// Initial scaling y'y / s'y when the curvature is positive, otherwise the
/// fallback (previous gamma).
double gamma_init(const Vector& s, const Vector& y, double fallback);

/// Compact form B = gamma I + A Q^{-1} A^T. s_dim = A.cols() is 2m for BFGS
/// and m for SR1; an empty buffer gives s_dim = 0 and B = gamma I exactly.
/// Carries a factorization of Q so apply_B does not refactor per call.
struct CompactRep {
  QnKind kind = QnKind::Bfgs;
  double gamma = 1.0;
  Matrix A;  // n x s_dim
  Matrix Q;  // s_dim x s_dim, symmetric
  std::shared_ptr<const Eigen::FullPivLU<Matrix>> Q_lu;

  int s_dim() const { return static_cast<int>(A.cols()); }
};

/// Assembles the compact representation from the buffered pairs (columns
/// oldest to newest). With S, Y stacked column-wise, D = diag(S'Y) and
/// L = strict lower triangle of S'Y:
///   BFGS:  A = [gamma S, Y],  Q = [[-gamma S'S, -L], [-L', D]]
///   SR1:   A = Y - gamma S,   Q = D + L + L' - gamma S'S
CompactRep build_compact(const PairBuffer& buf, double gamma, QnKind kind);

/// Low-rank split gamma I + U1 U1' - U2 U2' of a compact representation,
/// obtained from the eigendecomposition Q = V diag(l) V'. Eigendirections
/// with |l_i| <= eps are dropped; the retained ones are inverted, positive
/// ones scaled into U1 and negative ones into U2.
struct SpectralSplit {
  Matrix U1;  // n x r1
  Matrix U2;  // n x r2
  int dropped = 0;

  int r1() const { return static_cast<int>(U1.cols()); }
  int r2() const { return static_cast<int>(U2.cols()); }
};

SpectralSplit eigensplit(const CompactRep& rep, double eps);

/// gamma v + A Q^{-1} A' v through an LU solve on the small Q. Throws
/// std::domain_error on singular Q; callers then fall back to the
/// eigensplit-filtered form.
Vector apply_B(const CompactRep& rep, const Vector& v);

/// B v through a spectral split: gamma v + U1 U1' v - U2 U2' v.
Vector apply_B_split(const SpectralSplit& split, double gamma, const Vector& v);

}  // namespace rpqn
