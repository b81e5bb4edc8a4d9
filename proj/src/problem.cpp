#include "rpqn/problem.hpp"

#include "rpqn/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rpqn {

void CompositeProblem::check_dim(const Vector& x) const {
  if (x.size() != n) throw std::invalid_argument("problem: dimension mismatch");
}

double eval_objective(const CompositeProblem& problem, const Vector& x) {
  return problem.f(x) + problem.phi(x);
}

namespace {

// f(x) = 0.5 ||Ax - b||^2 with matvec counting (one per application of A
// or A^T).
CompositeProblem make_least_squares_problem(Matrix A, Vector b, RegularizerSpec reg) {
  auto data = std::make_shared<DenseLeastSquaresData>(DenseLeastSquaresData{std::move(A), std::move(b)});
  CompositeProblem p;
  p.n = static_cast<int>(data->A.cols());
  p.reg = std::move(reg);
  auto counters = p.counters;
  p.smooth_value = [data, counters](const Vector& x) {
    counters->matvecs.fetch_add(1, std::memory_order_relaxed);
    return 0.5 * (data->A * x - data->b).squaredNorm();
  };
  p.smooth_gradient = [data, counters](const Vector& x) {
    counters->matvecs.fetch_add(2, std::memory_order_relaxed);
    return Vector(data->A.transpose() * (data->A * x - data->b));
  };
  return p;
}

std::vector<std::vector<int>> draw_groups(Rng& rng, int n) {
  std::vector<std::vector<int>> groups;
  int pos = 0;
  while (n - pos >= 4) {
    int len = rng.uniform_int(4, 12);
    if (len > n - pos) len = n - pos;
    std::vector<int> g(len);
    for (int i = 0; i < len; ++i) g[i] = pos + i;
    groups.push_back(std::move(g));
    pos += len;
  }
  // fewer than 4 indices left: merge into the previous group
  while (pos < n) groups.back().push_back(pos++);
  return groups;
}

}  // namespace

GeneratedInstance make_group_lasso(std::uint64_t seed, int k) {
  if (k < 1) throw std::invalid_argument("make_group_lasso: k must be >= 1");
  const int n = 25 * k;
  const int m = 16 * k;
  Rng rng(seed);
  Matrix A(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.uniform();
  Vector b(m);
  for (int i = 0; i < m; ++i) b[i] = rng.uniform();
  auto groups = draw_groups(rng, n);
  RegularizerSpec reg = RegularizerSpec::group_l21(1.0, std::move(groups));
  reg.validate(n);
  GeneratedInstance inst;
  inst.data = {A, b};
  inst.reg = reg;
  inst.problem = make_least_squares_problem(std::move(A), std::move(b), std::move(reg));
  return inst;
}

GeneratedInstance make_lasso(std::uint64_t seed, int n, int m, double lambda) {
  if (n < 1 || m < 1) throw std::invalid_argument("make_lasso: n, m must be >= 1");
  Rng rng(seed);
  Matrix A(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
  Vector b(m);
  for (int i = 0; i < m; ++i) b[i] = rng.normal();
  RegularizerSpec reg = RegularizerSpec::l1(lambda);
  GeneratedInstance inst;
  inst.data = {A, b};
  inst.reg = reg;
  inst.problem = make_least_squares_problem(std::move(A), std::move(b), std::move(reg));
  return inst;
}

namespace {

void haar_rows_forward(Matrix& img, int active) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Vector tmp(active);
  for (int r = 0; r < active; ++r) {
    for (int c = 0; c < active / 2; ++c) {
      tmp[c] = (img(r, 2 * c) + img(r, 2 * c + 1)) * inv_sqrt2;
      tmp[active / 2 + c] = (img(r, 2 * c) - img(r, 2 * c + 1)) * inv_sqrt2;
    }
    for (int c = 0; c < active; ++c) img(r, c) = tmp[c];
  }
}

void haar_cols_forward(Matrix& img, int active) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Vector tmp(active);
  for (int c = 0; c < active; ++c) {
    for (int r = 0; r < active / 2; ++r) {
      tmp[r] = (img(2 * r, c) + img(2 * r + 1, c)) * inv_sqrt2;
      tmp[active / 2 + r] = (img(2 * r, c) - img(2 * r + 1, c)) * inv_sqrt2;
    }
    for (int r = 0; r < active; ++r) img(r, c) = tmp[r];
  }
}

void haar_rows_inverse(Matrix& img, int active) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Vector tmp(active);
  for (int r = 0; r < active; ++r) {
    for (int c = 0; c < active / 2; ++c) {
      tmp[2 * c] = (img(r, c) + img(r, active / 2 + c)) * inv_sqrt2;
      tmp[2 * c + 1] = (img(r, c) - img(r, active / 2 + c)) * inv_sqrt2;
    }
    for (int c = 0; c < active; ++c) img(r, c) = tmp[c];
  }
}

void haar_cols_inverse(Matrix& img, int active) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Vector tmp(active);
  for (int c = 0; c < active; ++c) {
    for (int r = 0; r < active / 2; ++r) {
      tmp[2 * r] = (img(r, c) + img(active / 2 + r, c)) * inv_sqrt2;
      tmp[2 * r + 1] = (img(r, c) - img(active / 2 + r, c)) * inv_sqrt2;
    }
    for (int r = 0; r < active; ++r) img(r, c) = tmp[r];
  }
}

Matrix to_square(const Vector& v, int side) {
  if (v.size() != static_cast<Eigen::Index>(side) * side)
    throw std::invalid_argument("haar2d/blur: vector length must be side^2");
  Matrix img(side, side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) img(r, c) = v[r * side + c];
  return img;
}

Vector to_vector(const Matrix& img) {
  const int side = static_cast<int>(img.rows());
  Vector v(static_cast<Eigen::Index>(side) * side);
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) v[r * side + c] = img(r, c);
  return v;
}

void check_levels(int side, int levels) {
  if (levels < 1) throw std::invalid_argument("haar2d: levels must be >= 1");
  if (side < 1 || side % (1 << levels) != 0)
    throw std::invalid_argument("haar2d: side must be divisible by 2^levels");
}

}  // namespace

Vector haar2d(const Vector& image, int side, int levels) {
  check_levels(side, levels);
  Matrix img = to_square(image, side);
  int active = side;
  for (int l = 0; l < levels; ++l) {
    haar_rows_forward(img, active);
    haar_cols_forward(img, active);
    active /= 2;
  }
  return to_vector(img);
}

Vector haar2d_inverse(const Vector& coeffs, int side, int levels) {
  check_levels(side, levels);
  Matrix img = to_square(coeffs, side);
  int active = side >> (levels - 1);
  for (int l = levels - 1; l >= 0; --l) {
    haar_cols_inverse(img, active);
    haar_rows_inverse(img, active);
    active *= 2;
  }
  return to_vector(img);
}

namespace {

constexpr int kBlurRadius = 4;  // 9x9 kernel
constexpr double kBlurSigma = 4.0;

const Vector& blur_kernel_1d() {
  static const Vector kernel = [] {
    Vector k(2 * kBlurRadius + 1);
    for (int i = -kBlurRadius; i <= kBlurRadius; ++i)
      k[i + kBlurRadius] = std::exp(-0.5 * i * i / (kBlurSigma * kBlurSigma));
    k /= k.sum();
    return k;
  }();
  return kernel;
}

// Half-sample symmetric reflection of index i into [0, n).
inline int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

// Separable 1D pass along rows (axis = 0) or columns (axis = 1); gather
// form for the forward operator, scatter form for its exact transpose.
Matrix conv1d_pass(const Matrix& img, int axis, bool adjoint) {
  const Vector& k = blur_kernel_1d();
  const int side = static_cast<int>(img.rows());
  Matrix out = Matrix::Zero(side, side);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      for (int o = -kBlurRadius; o <= kBlurRadius; ++o) {
        const double w = k[o + kBlurRadius];
        int rr = r, cc = c;
        if (axis == 0)
          cc = reflect(c + o, side);
        else
          rr = reflect(r + o, side);
        if (adjoint)
          out(rr, cc) += w * img(r, c);
        else
          out(r, c) += w * img(rr, cc);
      }
    }
  }
  return out;
}

}  // namespace

Vector gaussian_blur_apply(const Vector& image, int side) {
  Matrix img = to_square(image, side);
  img = conv1d_pass(img, 0, false);
  img = conv1d_pass(img, 1, false);
  return to_vector(img);
}

Vector gaussian_blur_adjoint(const Vector& image, int side) {
  Matrix img = to_square(image, side);
  img = conv1d_pass(img, 1, true);
  img = conv1d_pass(img, 0, true);
  return to_vector(img);
}

Vector make_test_image(int side) {
  // Piecewise-constant blocks plus a bright square and a dark stripe.
  Vector img(static_cast<Eigen::Index>(side) * side);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      double v = 0.25;
      if (r < side / 2 && c >= side / 2) v = 0.75;
      if (r >= side / 2 && c < side / 2) v = 0.5;
      const int q1 = side / 8, q3 = 3 * side / 8;
      if (r >= q1 && r < q3 && c >= q1 && c < q3) v = 1.0;
      if (r >= 5 * side / 8 && r < 6 * side / 8) v = 0.0;
      img[r * side + c] = v;
    }
  }
  return img;
}

StudentTInstance make_student_t_restoration(std::uint64_t seed, int side, double lambda,
                                            double noise_scale) {
  if (side < 16 || (side & (side - 1)) != 0)
    throw std::invalid_argument("make_student_t_restoration: side must be a power of two >= 16");
  const int levels = 4;
  const int n = side * side;

  Vector original = make_test_image(side);
  Vector blurred = gaussian_blur_apply(original, side);
  Rng rng(seed);
  Vector b(n);
  for (int i = 0; i < n; ++i) b[i] = blurred[i] + noise_scale * rng.student_t1();

  StudentTInstance inst;
  inst.side = side;
  inst.levels = levels;
  inst.original = original;
  inst.observed = b;

  CompositeProblem p;
  p.n = n;
  p.reg = RegularizerSpec::l1(lambda);
  auto counters = p.counters;
  auto bcopy = std::make_shared<Vector>(std::move(b));
  p.smooth_value = [bcopy, counters, side, levels](const Vector& y) {
    counters->matvecs.fetch_add(1, std::memory_order_relaxed);
    Vector r = gaussian_blur_apply(haar2d_inverse(y, side, levels), side) - *bcopy;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) sum += std::log1p(r[i] * r[i]);
    return sum;
  };
  p.smooth_gradient = [bcopy, counters, side, levels](const Vector& y) {
    counters->matvecs.fetch_add(2, std::memory_order_relaxed);
    Vector r = gaussian_blur_apply(haar2d_inverse(y, side, levels), side) - *bcopy;
    Vector u(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) u[i] = 2.0 * r[i] / (r[i] * r[i] + 1.0);
    return haar2d(gaussian_blur_adjoint(u, side), side, levels);
  };
  inst.problem = std::move(p);
  return inst;
}

}  // namespace rpqn
