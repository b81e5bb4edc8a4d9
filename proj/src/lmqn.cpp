#include "rpqn/lmqn.hpp"

#include <cmath>
#include <stdexcept>

namespace rpqn {

PairBuffer::PairBuffer(int memory) : memory_(memory) {
  if (memory < 0) throw std::invalid_argument("PairBuffer: memory must be >= 0");
}

void PairBuffer::push(Vector s, Vector y) {
  if (memory_ == 0) return;
  if (static_cast<int>(pairs_.size()) == memory_) pairs_.pop_front();
  pairs_.emplace_back(std::move(s), std::move(y));
}

PushResult push_pair(PairBuffer& buf, const Vector& s, const Vector& y, QnKind kind,
                     double eps) {
  if (s.size() != y.size()) throw std::invalid_argument("push_pair: dimension mismatch");
  const double ss = s.squaredNorm();
  if (ss == 0.0) return PushResult::Skipped;
  if (kind == QnKind::Bfgs && s.dot(y) < eps * ss) return PushResult::Skipped;
  buf.push(s, y);
  return PushResult::Accepted;
}

double gamma_init(const Vector& s, const Vector& y, double fallback) {
  const double sy = s.dot(y);
  if (sy > 0.0) return y.dot(y) / sy;
  return fallback;
}

CompactRep build_compact(const PairBuffer& buf, double gamma, QnKind kind) {
  if (gamma <= 0.0) throw std::invalid_argument("build_compact: gamma must be positive");
  CompactRep rep;
  rep.kind = kind;
  rep.gamma = gamma;
  const int p = buf.size();
  if (p == 0) {
    rep.A.resize(0, 0);
    rep.Q.resize(0, 0);
    return rep;
  }
  const Eigen::Index n = buf.s(0).size();
  Matrix S(n, p), Y(n, p);
  for (int j = 0; j < p; ++j) {
    S.col(j) = buf.s(j);
    Y.col(j) = buf.y(j);
  }
  const Matrix SY = S.transpose() * Y;
  const Matrix D = SY.diagonal().asDiagonal();
  Matrix L = SY.template triangularView<Eigen::StrictlyLower>();
  Matrix StS = S.transpose() * S;
  StS = 0.5 * (StS + StS.transpose());  // enforce exact symmetry

  if (kind == QnKind::Bfgs) {
    rep.A.resize(n, 2 * p);
    rep.A.leftCols(p) = gamma * S;
    rep.A.rightCols(p) = Y;
    rep.Q.resize(2 * p, 2 * p);
    rep.Q.topLeftCorner(p, p) = -gamma * StS;
    rep.Q.topRightCorner(p, p) = -L;
    rep.Q.bottomLeftCorner(p, p) = -L.transpose();
    rep.Q.bottomRightCorner(p, p) = D;
  } else {
    rep.A = Y - gamma * S;
    rep.Q = D + L + L.transpose() - gamma * StS;
  }
  rep.Q_lu = std::make_shared<const Eigen::FullPivLU<Matrix>>(rep.Q);
  return rep;
}

SpectralSplit eigensplit(const CompactRep& rep, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("eigensplit: eps must be positive");
  SpectralSplit split;
  const int s = rep.s_dim();
  const Eigen::Index n = rep.A.rows();
  if (s == 0) {
    split.U1.resize(n, 0);
    split.U2.resize(n, 0);
    return split;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(rep.Q);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("eigensplit: eigendecomposition failed");
  const Vector& lam = eig.eigenvalues();
  const Matrix AV = rep.A * eig.eigenvectors();

  int r1 = 0, r2 = 0;
  for (int i = 0; i < s; ++i) {
    if (lam[i] > eps)
      ++r1;
    else if (lam[i] < -eps)
      ++r2;
    else
      ++split.dropped;
  }
  split.U1.resize(n, r1);
  split.U2.resize(n, r2);
  int c1 = 0, c2 = 0;
  for (int i = 0; i < s; ++i) {
    // eigenvalues of Q^{-1} are 1/lam with the same eigenvectors
    if (lam[i] > eps)
      split.U1.col(c1++) = AV.col(i) * std::sqrt(1.0 / lam[i]);
    else if (lam[i] < -eps)
      split.U2.col(c2++) = AV.col(i) * std::sqrt(1.0 / -lam[i]);
  }
  return split;
}

Vector apply_B(const CompactRep& rep, const Vector& v) {
  if (rep.s_dim() == 0) return rep.gamma * v;
  auto lu = rep.Q_lu;
  if (!lu) lu = std::make_shared<const Eigen::FullPivLU<Matrix>>(rep.Q);
  if (!lu->isInvertible()) throw std::domain_error("apply_B: singular Q");
  return rep.gamma * v + rep.A * lu->solve(rep.A.transpose() * v);
}

Vector apply_B_split(const SpectralSplit& split, double gamma, const Vector& v) {
  Vector out = gamma * v;
  if (split.r1() > 0) out += split.U1 * (split.U1.transpose() * v);
  if (split.r2() > 0) out -= split.U2 * (split.U2.transpose() * v);
  return out;
}

}  // namespace rpqn
