#pragma once

#include "rpqn/baselines.hpp"
#include "rpqn/problem.hpp"
#include "rpqn/solver.hpp"
#include "rpqn/trace.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rpqn::bench {

enum class Family { GroupLasso, Lasso, StudentT };
enum class SolverId { RpqnBfgs, RpqnSr1, Fista, Sparsa };

std::string to_string(Family f);
std::string to_string(SolverId s);
Family family_from_string(const std::string& s);
SolverId solver_from_string(const std::string& s);

/// One benchmark run: a problem family at some scale, a solver, and the
/// repetition protocol (seeds seed, seed+1, ...).
struct RunSpec {
  Family family = Family::GroupLasso;
  int k = 4;                 // group-lasso: n = 25k, m = 16k
  int n = 300;               // lasso
  int m = 150;               // lasso
  double lambda = 0.1;       // lasso / student-t penalty
  int side = 32;             // student-t
  double noise_scale = 1e-3; // student-t
  std::uint64_t seed = 1;
  SolverId solver = SolverId::RpqnBfgs;
  int memory = 5;            // rpqn solvers
  double tol = 1e-6;         // objective value error tolerance
  long max_iter = 100000;
  int reps = 1;
  std::string out_dir = "out";
  std::string cache_dir = "cache";

  /// Throws std::invalid_argument on bad ranges or solver/family
  /// incompatibility (FISTA is convex-only and rejects student-t).
  void validate() const;

  std::string scale_tag() const;  // e.g. "k4", "n300_m150_lam0.1"
  std::string run_tag() const;    // family + scale + solver

  static RunSpec from_json_file(const std::string& path);
};

struct BuiltInstance {
  CompositeProblem problem;
  Vector x0;
  DenseLeastSquaresData data;  // empty for student-t
  StudentTInstance student;    // populated for student-t only
};

/// Deterministic instance for (spec.family, scale, seed). x0 is 0 for the
/// least-squares families and the observed image for the restoration.
BuiltInstance make_instance(const RunSpec& spec, std::uint64_t seed);

struct PsiStarResult {
  double psi_star = kNan;
  bool warning = false;  // reference run hit max_iter before tol_r = 1e-10
};

/// Tight-tolerance reference optimum (residual tolerance 1e-10, at most
/// 1e5 iterations), cached on disk under
/// cache_dir/<family>/<scale>/<seed>/psistar.json.
PsiStarResult compute_psi_star(const RunSpec& spec, std::uint64_t seed);

struct RunOutput {
  std::vector<std::string> trace_paths;
  std::string aggregate_path;
  std::vector<SolveStatus> statuses;
  std::vector<double> psi_stars;
  bool all_converged() const;
};

/// Executes spec.reps repetitions with seeds seed, seed+1, ...; writes one
/// trace CSV per repetition plus an aggregate with per-iteration values
/// averaged across repetitions.
RunOutput run(const RunSpec& spec);

/// Per-trace totals in the style of an iteration-count table.
struct CompareRow {
  std::string label;
  long iters = 0;
  long highly_successful = 0;
  long successful = 0;
  long unsuccessful = 0;
  long sub_iters = 0;
  long f_evals = 0;
  long prox_evals = 0;
  long matvecs = 0;
  double final_obj_err = kNan;
  double total_time_s = 0.0;
};

struct CompareOutput {
  std::vector<CompareRow> rows;
  std::string table_path;
  std::string svg_path;
};

/// Aggregates counts from existing trace CSVs and emits a summary table
/// plus an SVG convergence plot (time on x, objective value error on a log
/// y axis, one polyline per trace). Matrix-vector products count
/// applications of A and A^T separately.
CompareOutput compare(const std::vector<std::string>& trace_paths,
                      const std::vector<std::string>& labels, const std::string& out_dir);

/// Writes the instance to disk: matrix CSV (one row per line) plus a JSON
/// sidecar {n, m, lambda, groups, seed, family}. The restoration family
/// writes the observed image as CSV and PGM previews instead of a dense
/// matrix.
void write_instance(const RunSpec& spec, std::uint64_t seed, const std::string& dir);

void write_pgm(const Vector& image, int side, const std::string& path);

}  // namespace rpqn::bench
