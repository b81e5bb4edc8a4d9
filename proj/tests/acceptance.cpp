// Acceptance suite: one pass/fail line per criterion. Exits nonzero if any
// hard criterion fails. Criterion 5 is a soft relative-performance check
// and reports a warning instead of failing when the gap is below 2x.

#include "oracles.hpp"
#include "rpqn/baselines.hpp"
#include "rpqn/bench.hpp"
#include "rpqn/problem.hpp"
#include "rpqn/solver.hpp"
#include "rpqn/subsolver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

using namespace rpqn;

namespace {

struct Criterion {
  int id;
  std::string name;
  bool pass = false;
  bool warn = false;
  std::string detail;
};

double now_seconds() {
  static const auto t0 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string cache_dir_for_run() {
  return "acceptance_cache";
}

// ---------------------------------------------------------------- C1
Criterion criterion1() {
  Criterion c{1, "subproblem exactness vs dense oracle (200 instances)"};
  Rng rng(1001);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int count = 0;
  while (count < 200) {
    const int n = 10 + rng.uniform_int(0, 30);
    const int memory = 1 + rng.uniform_int(0, 4);
    const QnKind kind = (count % 2 == 0) ? QnKind::Bfgs : QnKind::Sr1;
    const double gamma = 0.5 + 1.5 * rng.uniform();
    double mu = std::pow(10.0, -3.0 + 4.0 * rng.uniform());  // log-uniform in [1e-3, 10]

    PairBuffer buf = testing::random_pair_buffer(rng, n, memory, kind, gamma);
    CompactRep rep = build_compact(buf, gamma, kind);
    SpectralSplit split = eigensplit(rep, 1e-8);
    auto fac = factor_metric(split, gamma, mu);
    while (!fac && mu < 1e8) {  // indefinite draw: regularize as the outer loop would
      mu *= 4.0;
      fac = factor_metric(split, gamma, mu);
    }
    if (!fac) continue;

    RegularizerSpec spec =
        testing::random_regularizer(rng, n, count % 4 >= 2, 0.5 + rng.uniform());
    ScaledProxContext ctx{&spec, fac->gamma_hat};
    const Vector y = testing::random_vector(rng, n, 1.5);
    // exactness check: allow the inner method to run to its tolerance on
    // these cold-started random instances (the outer loop caps at 10 and
    // routes failures to unsuccessful steps instead)
    auto pm = prox_metric(*fac, ctx, y, nullptr, 1e-10, 100);
    if (!pm) {
      c.detail = "inner solver failed on a positive definite instance";
      return c;
    }
    const Matrix dense = testing::dense_from_split(split, gamma + mu);
    const Vector ref = testing::oracle_prox_dense(dense, spec, y);
    worst = std::max(worst, (pm->p - ref).lpNorm<Eigen::Infinity>());
    ++count;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max |prox - oracle|_inf = %.2e (tol 1e-7), %.1f s (limit 30 s)", worst,
                elapsed);
  c.detail = buf;
  c.pass = worst <= 1e-7 && elapsed < 30.0;
  return c;
}

// ---------------------------------------------------------------- C2
Criterion criterion2() {
  Criterion c{2, "compact representation equals dense recursion (100 pair sets)"};
  Rng rng(1002);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5 + rng.uniform_int(0, 25);
    const int m = 1 + rng.uniform_int(0, 4);
    const QnKind kind = (trial % 2 == 0) ? QnKind::Bfgs : QnKind::Sr1;
    const double gamma = 0.5 + 1.5 * rng.uniform();
    PairBuffer buf = testing::random_pair_buffer(rng, n, m, kind, gamma);
    const Matrix dense = testing::dense_qn_recursion(buf, gamma, kind);
    const Matrix compact = testing::dense_from_compact(build_compact(buf, gamma, kind));
    worst = std::max(worst, (dense - compact).norm() / dense.norm());
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "max relative Frobenius error = %.2e (tol 1e-9)", worst);
  c.detail = buf;
  c.pass = worst <= 1e-9;
  return c;
}

// ---------------------------------------------------------------- C3
Criterion criterion3() {
  Criterion c{3, "semismooth Newton efficiency on group-lasso subproblems"};
  bench::RunSpec spec;
  spec.family = bench::Family::GroupLasso;
  spec.k = 4;
  spec.seed = 1;
  spec.cache_dir = cache_dir_for_run();
  const auto ref = bench::compute_psi_star(spec, 1);

  bench::BuiltInstance built = bench::make_instance(spec, 1);
  RpqnConfig config;
  config.kind = QnKind::Bfgs;
  config.memory = 3;
  config.mode = StopMode::ObjectiveErrorStop;
  config.psi_star = ref.psi_star;
  config.tol_obj = 1e-6;
  config.max_iter = 20000;
  SolveResult res = solve(built.problem, built.x0, config);

  std::vector<double> iters;
  int failures = 0;
  int max_sub = 0;
  for (const auto& r : res.trace.rows) {
    if (!r.sub_converged) ++failures;
    if (!std::isnan(r.d_norm)) {
      iters.push_back(r.sub_iters);
      max_sub = std::max(max_sub, r.sub_iters);
    }
  }
  const double med = median(iters);
  char buf[200];
  std::snprintf(
      buf, sizeof(buf),
      "median inner iters = %.1f (<= 2), max = %d (<= 10), failures = %d, outer iters = %zu",
      med, max_sub, failures, res.trace.rows.size());
  c.detail = buf;
  c.pass =
      res.status == SolveStatus::Converged && med <= 2.0 && max_sub <= 10 && failures == 0;
  return c;
}

// ---------------------------------------------------------------- C4 & C8
struct ConvexRunRecord {
  std::string label;
  double max_mu = 0.0;
  double mu_bound = 0.0;
};

bool check_trace_invariants(const TraceTable& trace, const RpqnConfig& config,
                            std::string& why) {
  const auto& rows = trace.rows;
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i + 1 < rows.size()) {
      if (!(rows[i + 1].psi <= r.psi)) {
        why = "psi increased at k=" + std::to_string(r.k);
        return false;
      }
      if (r.step_class == StepClass::Unsuccessful) {
        if (rows[i + 1].psi != r.psi || rows[i + 1].res_norm != r.res_norm) {
          why = "iterate changed on unsuccessful step k=" + std::to_string(r.k);
          return false;
        }
        if (rows[i + 1].mu != config.sigma2 * r.mu) {
          why = "mu not scaled by sigma2 at k=" + std::to_string(r.k);
          return false;
        }
      }
    }
    if (!std::isnan(r.rho) && !(r.pred > config.p_min * r.d_norm * r.res_norm)) {
      why = "rho present but pred gate violated at k=" + std::to_string(r.k);
      return false;
    }
  }
  return true;
}

void criterion4_and_8(Criterion& c4, Criterion& c8) {
  c4 = Criterion{4, "end-to-end convex convergence with row-level invariants"};
  c8 = Criterion{8, "mu stays within sigma2 * max(mu0, lambda_max(A'A))"};

  int run_failures = 0;
  std::string first_fail;
  std::vector<ConvexRunRecord> mu_records;

  for (const bench::Family family : {bench::Family::GroupLasso, bench::Family::Lasso}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      bench::RunSpec spec;
      spec.family = family;
      spec.k = 4;
      spec.n = 300;
      spec.m = 150;
      spec.lambda = 0.1;
      spec.seed = seed;
      spec.cache_dir = cache_dir_for_run();
      const auto ref = bench::compute_psi_star(spec, seed);
      bench::BuiltInstance built = bench::make_instance(spec, seed);
      const Matrix AtA = built.data.A.transpose() * built.data.A;
      const double lam_max =
          Eigen::SelfAdjointEigenSolver<Matrix>(AtA).eigenvalues().maxCoeff();

      for (const auto& [kind, memory] :
           std::vector<std::pair<QnKind, int>>{{QnKind::Bfgs, 3}, {QnKind::Sr1, 5}}) {
        RpqnConfig config;
        config.kind = kind;
        config.memory = memory;
        config.mode = StopMode::ObjectiveErrorStop;
        config.psi_star = ref.psi_star;
        config.tol_obj = 1e-6;
        config.max_iter = 20000;
        built.problem.counters->reset();
        SolveResult res = solve(built.problem, built.x0, config);

        const std::string label = bench::to_string(family) + " seed " +
                                  std::to_string(seed) +
                                  (kind == QnKind::Bfgs ? " bfgs3" : " sr1-5");
        std::string why;
        if (res.status != SolveStatus::Converged) {
          ++run_failures;
          if (first_fail.empty()) first_fail = label + ": did not reach 1e-6";
        } else if (!check_trace_invariants(res.trace, config, why)) {
          ++run_failures;
          if (first_fail.empty()) first_fail = label + ": " + why;
        }

        ConvexRunRecord rec;
        rec.label = label;
        rec.mu_bound = config.sigma2 * std::max(config.mu0, lam_max);
        for (const auto& r : res.trace.rows) rec.max_mu = std::max(rec.max_mu, r.mu);
        mu_records.push_back(rec);
      }
    }
  }

  c4.pass = run_failures == 0;
  c4.detail = run_failures == 0
                  ? "40 runs converged to objective error <= 1e-6; all trace invariants hold"
                  : std::to_string(run_failures) + " failures; first: " + first_fail;

  int viol_bfgs = 0, viol_sr1 = 0;
  double worst_bfgs = 0.0, worst_sr1 = 0.0;
  for (const auto& rec : mu_records) {
    const double ratio = rec.max_mu / rec.mu_bound;
    if (rec.label.find("bfgs") != std::string::npos) {
      worst_bfgs = std::max(worst_bfgs, ratio);
      if (ratio > 1.0) ++viol_bfgs;
    } else {
      worst_sr1 = std::max(worst_sr1, ratio);
      if (ratio > 1.0) ++viol_sr1;
    }
  }
  char buf[220];
  std::snprintf(buf, sizeof(buf),
                "bfgs: %d violations (worst mu/bound %.2f); sr1: %d violations (worst %.1f) -- "
                "the bound presumes a positive definite B, which SR1 is not",
                viol_bfgs, worst_bfgs, viol_sr1, worst_sr1);
  c8.detail = buf;
  c8.pass = viol_bfgs == 0 && viol_sr1 == 0;
}

// ---------------------------------------------------------------- C5
Criterion criterion5() {
  Criterion c{5, "relative performance on lasso n=750 (soft)"};
  bench::RunSpec spec;
  spec.family = bench::Family::Lasso;
  spec.n = 750;
  spec.m = 375;
  spec.lambda = 0.1;
  spec.seed = 1;
  spec.cache_dir = cache_dir_for_run();
  const auto ref = bench::compute_psi_star(spec, 1);
  bench::BuiltInstance built = bench::make_instance(spec, 1);

  auto timed = [&](auto&& solver_fn) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res = solver_fn();
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::make_pair(res.status == SolveStatus::Converged, dt);
  };

  RpqnConfig rc;
  rc.kind = QnKind::Bfgs;
  rc.memory = 5;  // tuned on this family and scale, as the benchmark protocol does
  rc.mode = StopMode::ObjectiveErrorStop;
  rc.psi_star = ref.psi_star;
  rc.tol_obj = 1e-6;
  rc.max_iter = 20000;
  auto [ok_r, t_rpqn] = timed([&] { return solve(built.problem, built.x0, rc); });

  FistaConfig fc;
  fc.mode = StopMode::ObjectiveErrorStop;
  fc.psi_star = ref.psi_star;
  fc.tol_obj = 1e-6;
  fc.max_iter = 200000;
  auto [ok_f, t_fista] = timed([&] { return fista_solve(built.problem, built.x0, fc); });

  SparsaConfig sc;
  sc.mode = StopMode::ObjectiveErrorStop;
  sc.psi_star = ref.psi_star;
  sc.tol_obj = 1e-6;
  sc.max_iter = 200000;
  auto [ok_s, t_sparsa] = timed([&] { return sparsa_solve(built.problem, built.x0, sc); });

  char buf[200];
  std::snprintf(buf, sizeof(buf), "rpqn-bfgs %.2fs, fista %.2fs, sparsa %.2fs%s", t_rpqn,
                t_fista, t_sparsa,
                (ok_r && ok_f && ok_s) ? "" : " (some runs did not converge)");
  c.detail = buf;
  if (!ok_r) {
    c.pass = false;
    return c;
  }
  const double best_baseline = std::min(ok_f ? t_fista : 1e300, ok_s ? t_sparsa : 1e300);
  if (t_rpqn < best_baseline) {
    c.pass = true;
  } else if (t_rpqn < 2.0 * best_baseline) {
    c.pass = true;  // soft criterion: report, do not hard-fail below 2x
    c.warn = true;
  } else {
    c.pass = false;
  }
  return c;
}

// ---------------------------------------------------------------- C6
Criterion criterion6() {
  Criterion c{6, "nonconvex restoration run (sr1 memory 2) and sparsa"};
  bench::RunSpec spec;
  spec.family = bench::Family::StudentT;
  spec.side = 32;
  spec.lambda = 1e-4;
  spec.noise_scale = 1e-3;
  spec.seed = 1;
  spec.solver = bench::SolverId::RpqnSr1;
  spec.cache_dir = cache_dir_for_run();

  // FISTA must be rejected on this family
  bench::RunSpec bad = spec;
  bad.solver = bench::SolverId::Fista;
  bool fista_rejected = false;
  try {
    bad.validate();
  } catch (const std::invalid_argument&) {
    fista_rejected = true;
  }

  const auto ref = bench::compute_psi_star(spec, 1);
  bench::BuiltInstance built = bench::make_instance(spec, 1);
  const double psi0 = eval_objective(built.problem, built.x0);
  const double gap = psi0 - ref.psi_star;
  // benchmark protocol for this family: run down to the objective value of
  // the clean test image (a harder target than half the gap)
  const Vector y_img = haar2d(built.student.original, spec.side, 4);
  const double psi_img = eval_objective(built.problem, y_img);

  RpqnConfig rc;
  rc.kind = QnKind::Sr1;
  rc.memory = 2;
  rc.mode = StopMode::ObjectiveErrorStop;
  rc.psi_star = psi_img;
  rc.tol_obj = 1e-12;
  rc.max_iter = 5000;
  built.problem.counters->reset();
  SolveResult res = solve(built.problem, built.x0, rc);

  bool monotone = true;
  double max_mu = 0.0;
  for (size_t i = 0; i + 1 < res.trace.rows.size(); ++i)
    if (res.trace.rows[i + 1].psi > res.trace.rows[i].psi) monotone = false;
  for (const auto& r : res.trace.rows) max_mu = std::max(max_mu, r.mu);
  const bool half_gap = res.psi <= psi0 - 0.5 * gap;

  SparsaConfig sc;
  sc.mode = StopMode::ObjectiveErrorStop;
  sc.psi_star = psi_img;
  sc.tol_obj = 1e-12;
  sc.max_iter = 50000;
  SolveResult sres = sparsa_solve(built.problem, built.x0, sc);

  char buf[260];
  std::snprintf(buf, sizeof(buf),
                "gap closed: rpqn-sr1 %.1f%% in %zu iters (max mu %.1e, image value reached: "
                "%s), sparsa %.1f%% in %zu iters, fista rejected: %s",
                100.0 * (psi0 - res.psi) / gap, res.trace.rows.size(), max_mu,
                res.status == SolveStatus::Converged ? "yes" : "no",
                100.0 * (psi0 - sres.psi) / gap, sres.trace.rows.size(),
                fista_rejected ? "yes" : "no");
  c.detail = buf;
  c.pass = fista_rejected && res.status == SolveStatus::Converged && half_gap && monotone &&
           max_mu <= 1e6 && sres.status == SolveStatus::Converged;
  return c;
}

// ---------------------------------------------------------------- C7
Criterion criterion7() {
  Criterion c{7, "property suites (prox, residual comparison, generators, transforms)"};
  Rng rng(1007);
  std::vector<std::string> failures;

  // prox optimality and firm nonexpansiveness
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 8;
    const double lambda = 0.5 + rng.uniform();
    const double gh = 0.5 + 2.0 * rng.uniform();
    RegularizerSpec spec = testing::random_regularizer(rng, n, trial % 2, lambda);
    ScaledProxContext ctx{&spec, gh};
    const Vector x = testing::random_vector(rng, n, 2.0);
    const Vector y = testing::random_vector(rng, n, 2.0);
    const Vector px = prox_scaled(ctx, x);
    const Vector py = prox_scaled(ctx, y);
    if ((px - py).squaredNorm() > (px - py).dot(x - y) + 1e-12) {
      failures.push_back("firm nonexpansiveness");
      break;
    }
    const Vector sub = gh * (x - px);
    if (spec.kind == RegularizerSpec::Kind::L1) {
      for (int i = 0; i < n; ++i) {
        const bool ok = px[i] != 0.0
                            ? std::abs(sub[i] - lambda * (px[i] > 0 ? 1 : -1)) <= 1e-10
                            : std::abs(sub[i]) <= lambda * (1 + 1e-12);
        if (!ok) {
          failures.push_back("l1 optimality");
          break;
        }
      }
    } else {
      for (const auto& g : spec.groups) {
        Vector pb(g.size()), sb(g.size());
        for (size_t a = 0; a < g.size(); ++a) {
          pb[a] = px[g[a]];
          sb[a] = sub[g[a]];
        }
        const bool ok = pb.norm() > 0 ? (sb - lambda * pb / pb.norm()).norm() <= 1e-10
                                      : sb.norm() <= lambda * (1 + 1e-12);
        if (!ok) {
          failures.push_back("group optimality");
          break;
        }
      }
    }
  }

  // residual comparison bound on 100 dense triples
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 6 + rng.uniform_int(0, 10);
    const Matrix H = testing::random_spd(rng, n, 1.0);
    const Matrix Ht = testing::random_spd(rng, n, 1.0);
    RegularizerSpec spec = testing::random_regularizer(rng, n, trial % 2, 0.5);
    const Vector x = testing::random_vector(rng, n, 1.0);
    const Vector g = testing::random_vector(rng, n, 1.0);
    auto res_in_metric = [&](const Matrix& M) {
      const Vector shifted = x - M.ldlt().solve(g);
      return (testing::oracle_prox_dense(M, spec, shifted) - x).norm();
    };
    const double rH = res_in_metric(H);
    const double rHt = res_in_metric(Ht);
    Eigen::SelfAdjointEigenSolver<Matrix> eH(H), eHt(Ht);
    const double bound = (1.0 + eHt.eigenvalues().maxCoeff() / eH.eigenvalues().minCoeff()) *
                         (eH.eigenvalues().maxCoeff() / eHt.eigenvalues().minCoeff()) * rH;
    if (rHt > bound * (1 + 1e-9) + 1e-12) {
      failures.push_back("residual comparison bound");
      break;
    }
  }

  // gradient finite-difference checks for all generators
  {
    GeneratedInstance gl = make_group_lasso(3, 2);
    GeneratedInstance la = make_lasso(3, 60, 30, 0.1);
    StudentTInstance st = make_student_t_restoration(3, 16, 1e-4, 1e-3);
    auto check_grad = [&](const CompositeProblem& p, const char* tag) {
      const Vector x = testing::random_vector(rng, p.n, 0.7);
      const Vector g = p.smooth_gradient(x);
      const Vector fd = testing::finite_difference_gradient(
          [&](const Vector& v) { return p.smooth_value(v); }, x);
      if ((g - fd).norm() > 1e-5 * std::max(1.0, g.norm())) failures.push_back(tag);
    };
    check_grad(gl.problem, "group-lasso gradient");
    check_grad(la.problem, "lasso gradient");
    check_grad(st.problem, "student-t gradient");
  }

  // Haar orthonormality and round trip, blur adjoint identity
  {
    const int side = 32;
    const Vector img = testing::random_vector(rng, side * side, 1.0);
    const Vector co = haar2d(img, side, 4);
    if ((haar2d_inverse(co, side, 4) - img).norm() > 1e-12 * img.norm())
      failures.push_back("haar round trip");
    if (std::abs(co.norm() - img.norm()) > 1e-12 * img.norm())
      failures.push_back("haar orthonormality");
    const Vector u = testing::random_vector(rng, side * side, 1.0);
    const Vector v = testing::random_vector(rng, side * side, 1.0);
    const double lhs = gaussian_blur_apply(u, side).dot(v);
    const double rhs = u.dot(gaussian_blur_adjoint(v, side));
    if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, std::abs(lhs)))
      failures.push_back("blur adjoint");
  }

  if (failures.empty()) {
    c.pass = true;
    c.detail = "all property suites within stated tolerances";
  } else {
    c.detail = "failed: " + failures.front();
  }
  return c;
}

}  // namespace

int main() {
  now_seconds();  // start the wall clock
  std::filesystem::remove_all(cache_dir_for_run());
  std::vector<Criterion> results;
  results.push_back(criterion1());
  results.push_back(criterion2());
  results.push_back(criterion3());
  Criterion c4, c8;
  criterion4_and_8(c4, c8);
  results.push_back(c4);
  results.push_back(criterion5());
  results.push_back(criterion6());
  results.push_back(criterion7());
  results.push_back(c8);

  bool all_pass = true;
  for (const auto& c : results) {
    const char* tag = c.pass ? (c.warn ? "PASS*" : "PASS") : "FAIL";
    std::printf("[%s] criterion %d: %s -- %s\n", tag, c.id, c.name.c_str(), c.detail.c_str());
    if (!c.pass) all_pass = false;
  }
  std::printf("%s (%.1f s total)\n",
              all_pass ? "acceptance: ALL CRITERIA PASSED" : "acceptance: FAILURES PRESENT",
              now_seconds());
  return all_pass ? 0 : 1;
}
