#include "rpqn/lmqn.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace rpqn;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

PairBuffer make_pairs(Rng& rng, int n, int count, QnKind kind, double gamma) {
  return testing::random_pair_buffer(rng, n, count, kind, gamma);
}

}  // namespace

TEST_CASE("pair acceptance rules") {
  PairBuffer buf(5);
  CHECK(push_pair(buf, vec2(1, 0), vec2(2, 0), QnKind::Bfgs, 1e-8) == PushResult::Accepted);
  CHECK(push_pair(buf, vec2(1, 0), vec2(-1, 0), QnKind::Bfgs, 1e-8) == PushResult::Skipped);
  CHECK(buf.size() == 1);

  // SR1 stores negative-curvature pairs
  CHECK(push_pair(buf, vec2(1, 0), vec2(-1, 0), QnKind::Sr1, 1e-8) == PushResult::Accepted);

  // zero steps are always skipped
  CHECK(push_pair(buf, Vector::Zero(2), vec2(1, 1), QnKind::Sr1, 1e-8) == PushResult::Skipped);

  CHECK_THROWS_AS(push_pair(buf, Vector::Zero(3), vec2(1, 1), QnKind::Bfgs, 1e-8),
                  std::invalid_argument);
}

TEST_CASE("FIFO eviction at capacity") {
  PairBuffer buf(3);
  for (int i = 1; i <= 3; ++i)
    push_pair(buf, vec2(i, 0), vec2(2 * i, 0), QnKind::Bfgs, 1e-8);
  CHECK(buf.size() == 3);
  CHECK(buf.s(0)[0] == 1.0);
  push_pair(buf, vec2(4, 0), vec2(8, 0), QnKind::Bfgs, 1e-8);
  CHECK(buf.size() == 3);
  CHECK(buf.s(0)[0] == 2.0);  // oldest evicted
  CHECK(buf.s(2)[0] == 4.0);
}

TEST_CASE("gamma_init values") {
  CHECK(gamma_init(vec2(1, 0), vec2(2, 0), 1.0) == doctest::Approx(2.0));
  CHECK(gamma_init(vec2(3, 1), vec2(3, 1), 7.0) == doctest::Approx(1.0));
  CHECK(gamma_init(vec2(1, 0), vec2(-2, 0), 3.0) == 3.0);  // fallback branch
}

TEST_CASE("empty buffer gives the scalar matrix exactly") {
  PairBuffer buf(4);
  CompactRep rep = build_compact(buf, 2.0, QnKind::Bfgs);
  CHECK(rep.s_dim() == 0);
  Vector v = vec2(3, -1);
  CHECK((apply_B(rep, v) - 2.0 * v).norm() == 0.0);
}

TEST_CASE("compact representation matches one dense BFGS update") {
  Rng rng(51);
  const int n = 10;
  const double gamma = 1.7;
  PairBuffer buf = make_pairs(rng, n, 1, QnKind::Bfgs, gamma);
  CompactRep rep = build_compact(buf, gamma, QnKind::Bfgs);
  const Matrix dense = testing::dense_qn_recursion(buf, gamma, QnKind::Bfgs);
  const Matrix compact = testing::dense_from_compact(rep);
  CHECK((dense - compact).norm() <= 1e-12 * dense.norm());
}

TEST_CASE("compact representation matches the dense recursion for both kinds") {
  Rng rng(53);
  for (QnKind kind : {QnKind::Bfgs, QnKind::Sr1}) {
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 6 + rng.uniform_int(0, 24);
      const int m = 1 + rng.uniform_int(0, 4);
      const double gamma = 0.5 + 2.0 * rng.uniform();
      PairBuffer buf = make_pairs(rng, n, m, kind, gamma);
      CompactRep rep = build_compact(buf, gamma, kind);
      const Matrix dense = testing::dense_qn_recursion(buf, gamma, kind);
      const Matrix compact = testing::dense_from_compact(rep);
      CHECK((dense - compact).norm() <= 1e-9 * dense.norm());
    }
  }
}

TEST_CASE("eigensplit on a diagonal Q") {
  CompactRep rep;
  rep.gamma = 1.0;
  rep.A = Matrix::Identity(5, 2);  // first two unit columns
  rep.Q = Matrix::Zero(2, 2);
  rep.Q(0, 0) = 2.0;
  rep.Q(1, 1) = -4.0;
  SpectralSplit split = eigensplit(rep, 1e-8);
  CHECK(split.r1() == 1);
  CHECK(split.r2() == 1);
  CHECK(split.dropped == 0);
  CHECK(split.U1.col(0).norm() == doctest::Approx(std::sqrt(0.5)));
  CHECK(split.U2.col(0).norm() == doctest::Approx(std::sqrt(0.25)));
}

TEST_CASE("eigensplit drops near-singular directions") {
  CompactRep rep;
  rep.gamma = 1.0;
  rep.A = Matrix::Identity(4, 2);
  rep.Q = Matrix::Zero(2, 2);
  rep.Q(0, 0) = 1.0;
  rep.Q(1, 1) = 1e-12;
  SpectralSplit split = eigensplit(rep, 1e-8);
  CHECK(split.dropped == 1);
  CHECK(split.r1() == 1);
  CHECK(split.r2() == 0);
}

TEST_CASE("eigensplit reconstruction matches the compact matrix") {
  Rng rng(59);
  for (QnKind kind : {QnKind::Bfgs, QnKind::Sr1}) {
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 12;
      const double gamma = 1.0 + rng.uniform();
      PairBuffer buf = make_pairs(rng, n, 3, kind, gamma);
      CompactRep rep = build_compact(buf, gamma, kind);
      SpectralSplit split = eigensplit(rep, 1e-12);
      if (split.dropped != 0) continue;
      const Matrix lhs = testing::dense_from_split(split, gamma);
      const Matrix rhs = testing::dense_from_compact(rep);
      CHECK((lhs - rhs).norm() <= 1e-9 * rhs.norm());
    }
  }
}

TEST_CASE("apply_B matches the dense matrix and is symmetric") {
  Rng rng(61);
  const int n = 15;
  const double gamma = 2.0;
  PairBuffer buf = make_pairs(rng, n, 4, QnKind::Bfgs, gamma);
  CompactRep rep = build_compact(buf, gamma, QnKind::Bfgs);
  const Matrix dense = testing::dense_from_compact(rep);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector v = testing::random_vector(rng, n, 1.0);
    const Vector w = testing::random_vector(rng, n, 1.0);
    CHECK((apply_B(rep, v) - dense * v).norm() <= 1e-10 * dense.norm());
    CHECK(apply_B(rep, v).dot(w) ==
          doctest::Approx(v.dot(apply_B(rep, w))).epsilon(1e-12));
  }
}

TEST_CASE("apply_B signals a singular Q") {
  CompactRep rep;
  rep.gamma = 1.0;
  rep.A = Matrix::Identity(3, 2);
  rep.Q = Matrix::Zero(2, 2);  // singular
  CHECK_THROWS_AS(apply_B(rep, Vector::Ones(3)), std::domain_error);
}

TEST_CASE("BFGS with curvature-positive pairs stays positive definite under mu >= 0") {
  Rng rng(67);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 10;
    const double gamma = 0.8 + rng.uniform();
    PairBuffer buf = make_pairs(rng, n, 4, QnKind::Bfgs, gamma);
    CompactRep rep = build_compact(buf, gamma, QnKind::Bfgs);
    const Matrix dense = testing::dense_from_compact(rep);
    for (double mu : {0.0, 0.5, 4.0}) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(dense + mu * Matrix::Identity(n, n));
      CHECK(eig.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("eigensplit reconstruction is invariant under consistent column permutation") {
  // permuting the columns of A together with rows/columns of Q leaves
  // A Q^{-1} A' unchanged; the reconstructed splits must agree
  Rng rng(71);
  const int n = 9;
  const double gamma = 1.3;
  PairBuffer buf = make_pairs(rng, n, 3, QnKind::Sr1, gamma);
  CompactRep rep = build_compact(buf, gamma, QnKind::Sr1);

  const int s = rep.s_dim();
  Eigen::PermutationMatrix<Eigen::Dynamic> P(s);
  P.setIdentity();
  for (int i = s - 1; i > 0; --i) {
    const int j = rng.uniform_int(0, i);
    std::swap(P.indices()[i], P.indices()[j]);
  }
  CompactRep permuted = rep;
  permuted.A = rep.A * P;
  permuted.Q = P.transpose() * rep.Q * P;

  const Matrix m1 = testing::dense_from_split(eigensplit(rep, 1e-12), gamma);
  const Matrix m2 = testing::dense_from_split(eigensplit(permuted, 1e-12), gamma);
  CHECK((m1 - m2).norm() <= 1e-9 * m1.norm());
}
