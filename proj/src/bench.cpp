#include "rpqn/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;
using nlohmann::json;

namespace rpqn::bench {

std::string to_string(Family f) {
  switch (f) {
    case Family::GroupLasso:
      return "group-lasso";
    case Family::Lasso:
      return "lasso";
    case Family::StudentT:
      return "student-t";
  }
  return "group-lasso";
}

std::string to_string(SolverId s) {
  switch (s) {
    case SolverId::RpqnBfgs:
      return "rpqn-bfgs";
    case SolverId::RpqnSr1:
      return "rpqn-sr1";
    case SolverId::Fista:
      return "fista";
    case SolverId::Sparsa:
      return "sparsa";
  }
  return "rpqn-bfgs";
}

Family family_from_string(const std::string& s) {
  if (s == "group-lasso") return Family::GroupLasso;
  if (s == "lasso") return Family::Lasso;
  if (s == "student-t") return Family::StudentT;
  throw std::invalid_argument("unknown family: " + s);
}

SolverId solver_from_string(const std::string& s) {
  if (s == "rpqn-bfgs") return SolverId::RpqnBfgs;
  if (s == "rpqn-sr1") return SolverId::RpqnSr1;
  if (s == "fista") return SolverId::Fista;
  if (s == "sparsa") return SolverId::Sparsa;
  throw std::invalid_argument("unknown solver: " + s);
}

void RunSpec::validate() const {
  if (family == Family::GroupLasso && k < 1)
    throw std::invalid_argument("run spec: k must be >= 1");
  if (family == Family::Lasso && (n < 1 || m < 1 || lambda <= 0.0))
    throw std::invalid_argument("run spec: lasso needs n, m >= 1 and lambda > 0");
  if (family == Family::StudentT) {
    if (side < 16 || (side & (side - 1)) != 0)
      throw std::invalid_argument("run spec: side must be a power of two >= 16");
    if (lambda <= 0.0) throw std::invalid_argument("run spec: lambda must be positive");
    if (solver == SolverId::Fista)
      throw std::invalid_argument("run spec: fista is convex-only and cannot run student-t");
  }
  if (memory < 0) throw std::invalid_argument("run spec: memory must be >= 0");
  if (tol <= 0.0) throw std::invalid_argument("run spec: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("run spec: max_iter must be >= 1");
  if (reps < 1) throw std::invalid_argument("run spec: reps must be >= 1");
}

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

std::string RunSpec::scale_tag() const {
  switch (family) {
    case Family::GroupLasso:
      return "k" + std::to_string(k);
    case Family::Lasso:
      return "n" + std::to_string(n) + "_m" + std::to_string(m) + "_lam" + fmt_double(lambda);
    case Family::StudentT:
      return "side" + std::to_string(side) + "_lam" + fmt_double(lambda) + "_ns" +
             fmt_double(noise_scale);
  }
  return "";
}

std::string RunSpec::run_tag() const {
  return to_string(family) + "_" + scale_tag() + "_" + to_string(solver);
}

RunSpec RunSpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j = json::parse(in);
  RunSpec spec;
  if (j.contains("family")) spec.family = family_from_string(j["family"]);
  if (j.contains("k")) spec.k = j["k"];
  if (j.contains("n")) spec.n = j["n"];
  if (j.contains("m")) spec.m = j["m"];
  if (j.contains("lambda")) spec.lambda = j["lambda"];
  if (j.contains("side")) spec.side = j["side"];
  if (j.contains("noise_scale")) spec.noise_scale = j["noise_scale"];
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("solver")) spec.solver = solver_from_string(j["solver"]);
  if (j.contains("memory")) spec.memory = j["memory"];
  if (j.contains("tol")) spec.tol = j["tol"];
  if (j.contains("max_iter")) spec.max_iter = j["max_iter"].get<long>();
  if (j.contains("reps")) spec.reps = j["reps"];
  if (j.contains("out")) spec.out_dir = j["out"];
  if (j.contains("cache")) spec.cache_dir = j["cache"];
  return spec;
}

BuiltInstance make_instance(const RunSpec& spec, std::uint64_t seed) {
  BuiltInstance built;
  switch (spec.family) {
    case Family::GroupLasso: {
      GeneratedInstance g = make_group_lasso(seed, spec.k);
      built.problem = std::move(g.problem);
      built.data = std::move(g.data);
      built.x0 = Vector::Zero(built.problem.n);
      break;
    }
    case Family::Lasso: {
      GeneratedInstance g = make_lasso(seed, spec.n, spec.m, spec.lambda);
      built.problem = std::move(g.problem);
      built.data = std::move(g.data);
      built.x0 = Vector::Zero(built.problem.n);
      break;
    }
    case Family::StudentT: {
      StudentTInstance s = make_student_t_restoration(seed, spec.side, spec.lambda,
                                                      spec.noise_scale);
      built.x0 = s.observed;  // start from the observed data
      built.student = std::move(s);
      built.problem = built.student.problem;
      break;
    }
  }
  return built;
}

namespace {

fs::path psistar_path(const RunSpec& spec, std::uint64_t seed) {
  return fs::path(spec.cache_dir) / to_string(spec.family) / spec.scale_tag() /
         std::to_string(seed) / "psistar.json";
}

}  // namespace

PsiStarResult compute_psi_star(const RunSpec& spec, std::uint64_t seed) {
  const fs::path path = psistar_path(spec, seed);
  if (fs::exists(path)) {
    std::ifstream in(path);
    json j = json::parse(in);
    return {j["psi_star"].get<double>(), j["warning"].get<bool>()};
  }

  BuiltInstance built = make_instance(spec, seed);
  RpqnConfig config;
  config.kind = QnKind::Bfgs;
  config.memory = 5;
  config.mode = StopMode::ResidualStop;
  config.tol_r = 1e-10;
  config.max_iter = 100000;
  SolveResult res = solve(built.problem, built.x0, config);

  PsiStarResult out;
  out.psi_star = res.psi;
  out.warning = (res.status != SolveStatus::Converged);

  fs::create_directories(path.parent_path());
  json j;
  j["psi_star"] = out.psi_star;
  j["warning"] = out.warning;
  j["res_norm"] = res.res_norm;
  j["family"] = to_string(spec.family);
  j["scale"] = spec.scale_tag();
  j["seed"] = seed;
  std::ofstream os(path);
  os << j.dump(2) << "\n";
  return out;
}

namespace {

SolveResult dispatch_solver(const RunSpec& spec, const BuiltInstance& built,
                            double psi_star) {
  switch (spec.solver) {
    case SolverId::RpqnBfgs:
    case SolverId::RpqnSr1: {
      RpqnConfig config;
      config.kind = spec.solver == SolverId::RpqnBfgs ? QnKind::Bfgs : QnKind::Sr1;
      config.memory = spec.memory;
      config.mode = StopMode::ObjectiveErrorStop;
      config.psi_star = psi_star;
      config.tol_obj = spec.tol;
      config.max_iter = spec.max_iter;
      return solve(built.problem, built.x0, config);
    }
    case SolverId::Fista: {
      FistaConfig config;
      config.mode = StopMode::ObjectiveErrorStop;
      config.psi_star = psi_star;
      config.tol_obj = spec.tol;
      config.max_iter = spec.max_iter;
      return fista_solve(built.problem, built.x0, config);
    }
    case SolverId::Sparsa: {
      SparsaConfig config;
      config.mode = StopMode::ObjectiveErrorStop;
      config.psi_star = psi_star;
      config.tol_obj = spec.tol;
      config.max_iter = spec.max_iter;
      return sparsa_solve(built.problem, built.x0, config);
    }
  }
  throw std::logic_error("unreachable solver id");
}

}  // namespace

bool RunOutput::all_converged() const {
  return std::all_of(statuses.begin(), statuses.end(),
                     [](SolveStatus s) { return s == SolveStatus::Converged; });
}

RunOutput run(const RunSpec& spec) {
  spec.validate();
  fs::create_directories(spec.out_dir);
  RunOutput out;

  std::vector<TraceTable> traces;
  for (int rep = 0; rep < spec.reps; ++rep) {
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(rep);
    const PsiStarResult ref = compute_psi_star(spec, seed);
    BuiltInstance built = make_instance(spec, seed);
    SolveResult res = dispatch_solver(spec, built, ref.psi_star);

    const fs::path trace_path =
        fs::path(spec.out_dir) / (spec.run_tag() + "_rep" + std::to_string(rep) + ".csv");
    res.trace.write_csv(trace_path.string());
    out.trace_paths.push_back(trace_path.string());
    out.statuses.push_back(res.status);
    out.psi_stars.push_back(ref.psi_star);
    traces.push_back(std::move(res.trace));
  }

  // aggregate: per-iteration means across repetitions
  size_t max_rows = 0;
  for (const auto& t : traces) max_rows = std::max(max_rows, t.rows.size());
  const fs::path agg_path = fs::path(spec.out_dir) / (spec.run_tag() + "_aggregate.csv");
  std::ofstream agg(agg_path);
  agg << "k,reps,time_s_mean,psi_mean,obj_err_mean\n";
  for (size_t i = 0; i < max_rows; ++i) {
    int count = 0;
    double time_sum = 0.0, psi_sum = 0.0, err_sum = 0.0;
    for (const auto& t : traces) {
      if (i < t.rows.size()) {
        ++count;
        time_sum += t.rows[i].time_s;
        psi_sum += t.rows[i].psi;
        err_sum += t.rows[i].obj_err;
      }
    }
    agg << i << ',' << count << ',' << time_sum / count << ',' << psi_sum / count << ','
        << err_sum / count << "\n";
  }
  out.aggregate_path = agg_path.string();
  return out;
}

namespace {

std::string svg_color(size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                  "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[i % 8];
}

void write_svg_plot(const std::vector<TraceTable>& traces,
                    const std::vector<std::string>& labels, const std::string& path) {
  const double width = 760, height = 520;
  const double ml = 70, mr = 20, mt = 30, mb = 50;

  double tmax = 0.0, emin = 1e300, emax = 0.0;
  for (const auto& t : traces) {
    for (const auto& r : t.rows) {
      if (!std::isfinite(r.obj_err) || r.obj_err <= 0.0) continue;
      tmax = std::max(tmax, r.time_s);
      emin = std::min(emin, r.obj_err);
      emax = std::max(emax, r.obj_err);
    }
  }
  if (tmax <= 0.0) tmax = 1.0;
  if (emax <= 0.0) {
    emin = 1e-8;
    emax = 1.0;
  }
  const double lo = std::floor(std::log10(emin));
  const double hi = std::ceil(std::log10(emax));

  auto xmap = [&](double t) { return ml + (width - ml - mr) * (t / tmax); };
  auto ymap = [&](double e) {
    const double l = std::log10(e);
    return mt + (height - mt - mb) * (hi - l) / std::max(1.0, hi - lo);
  };

  std::ofstream out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">run time [s]</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << (mt + height - mb) / 2 << ")\">objective value error</text>\n";
  for (int dec = static_cast<int>(lo); dec <= static_cast<int>(hi); ++dec) {
    const double y = ymap(std::pow(10.0, dec));
    out << "<line x1=\"" << ml - 4 << "\" y1=\"" << y << "\" x2=\"" << width - mr
        << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\">1e" << dec << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double t = tmax * i / 5.0;
    out << "<text x=\"" << xmap(t) << "\" y=\"" << height - mb + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt_double(t) << "</text>\n";
  }

  for (size_t ti = 0; ti < traces.size(); ++ti) {
    out << "<!-- data " << labels[ti] << ": k,time_s,obj_err -->\n";
    std::ostringstream pts;
    for (const auto& r : traces[ti].rows) {
      if (!std::isfinite(r.obj_err) || r.obj_err <= 0.0) continue;
      pts << xmap(r.time_s) << ',' << ymap(r.obj_err) << ' ';
      out << "<!-- " << r.k << ',' << r.time_s << ',' << r.obj_err << " -->\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << svg_color(ti)
        << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    out << "<text x=\"" << width - mr - 180 << "\" y=\"" << mt + 16 * (ti + 1)
        << "\" font-size=\"12\" fill=\"" << svg_color(ti) << "\">" << labels[ti]
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

CompareOutput compare(const std::vector<std::string>& trace_paths,
                      const std::vector<std::string>& labels, const std::string& out_dir) {
  if (trace_paths.empty()) throw std::invalid_argument("compare: no traces given");
  if (labels.size() != trace_paths.size())
    throw std::invalid_argument("compare: labels and traces must match");
  fs::create_directories(out_dir);

  CompareOutput out;
  std::vector<TraceTable> traces;
  for (size_t i = 0; i < trace_paths.size(); ++i) {
    TraceTable t = TraceTable::read_csv(trace_paths[i]);
    CompareRow row;
    row.label = labels[i];
    row.iters = static_cast<long>(t.rows.size());
    for (const auto& r : t.rows) {
      switch (r.step_class) {
        case StepClass::HighlySuccessful:
          ++row.highly_successful;
          break;
        case StepClass::Successful:
          ++row.successful;
          break;
        case StepClass::Unsuccessful:
          ++row.unsuccessful;
          break;
      }
      row.sub_iters += r.sub_iters;
    }
    if (!t.rows.empty()) {
      const auto& last = t.rows.back();
      row.f_evals = last.f_evals;
      row.prox_evals = last.prox_evals;
      row.matvecs = last.matvecs;
      row.final_obj_err = last.obj_err;
      row.total_time_s = last.time_s;
    }
    out.rows.push_back(row);
    traces.push_back(std::move(t));
  }

  const fs::path table_path = fs::path(out_dir) / "compare.csv";
  std::ofstream table(table_path);
  table << "label,iter,highly_succ_iter,succ_iter,unsucc_iter,sub_iter,function_eval,"
           "proximity_eval,matvec_products,obj_err_last_row,total_time_s\n";
  // matvec_products counts applications of A and A^T separately.
  for (const auto& r : out.rows) {
    table << r.label << ',' << r.iters << ',' << r.highly_successful << ',' << r.successful
          << ',' << r.unsuccessful << ',' << r.sub_iters << ',' << r.f_evals << ','
          << r.prox_evals << ',' << r.matvecs << ',' << fmt_double(r.final_obj_err) << ','
          << fmt_double(r.total_time_s) << "\n";
  }
  out.table_path = table_path.string();

  const fs::path svg_path = fs::path(out_dir) / "compare.svg";
  write_svg_plot(traces, labels, svg_path.string());
  out.svg_path = svg_path.string();
  return out;
}

namespace {

void write_matrix_csv(const Matrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j) out << ',';
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", A(i, j));
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace

void write_pgm(const Vector& image, int side, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const double lo = image.minCoeff();
  const double hi = image.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  out << "P5\n" << side << " " << side << "\n255\n";
  for (int i = 0; i < side * side; ++i) {
    const int v = static_cast<int>(std::lround(255.0 * (image[i] - lo) / span));
    out.put(static_cast<char>(std::clamp(v, 0, 255)));
  }
}

void write_instance(const RunSpec& spec, std::uint64_t seed, const std::string& dir) {
  fs::create_directories(dir);
  json sidecar;
  sidecar["seed"] = seed;
  sidecar["family"] = to_string(spec.family);
  sidecar["groups"] = nullptr;

  if (spec.family == Family::StudentT) {
    StudentTInstance inst =
        make_student_t_restoration(seed, spec.side, spec.lambda, spec.noise_scale);
    const int side = spec.side;
    Matrix obs(side, side);
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c) obs(r, c) = inst.observed[r * side + c];
    write_matrix_csv(obs, (fs::path(dir) / "observed.csv").string());
    write_pgm(inst.original, side, (fs::path(dir) / "original.pgm").string());
    write_pgm(inst.observed, side, (fs::path(dir) / "observed.pgm").string());
    sidecar["n"] = side * side;
    sidecar["m"] = side * side;
    sidecar["lambda"] = spec.lambda;
    sidecar["side"] = side;
    sidecar["noise_scale"] = spec.noise_scale;
  } else {
    GeneratedInstance inst = spec.family == Family::GroupLasso
                                 ? make_group_lasso(seed, spec.k)
                                 : make_lasso(seed, spec.n, spec.m, spec.lambda);
    write_matrix_csv(inst.data.A, (fs::path(dir) / "A.csv").string());
    write_matrix_csv(inst.data.b.transpose(), (fs::path(dir) / "b.csv").string());
    sidecar["n"] = static_cast<int>(inst.data.A.cols());
    sidecar["m"] = static_cast<int>(inst.data.A.rows());
    sidecar["lambda"] = inst.reg.lambda;
    if (inst.reg.kind == RegularizerSpec::Kind::GroupL21) sidecar["groups"] = inst.reg.groups;
  }

  std::ofstream out(fs::path(dir) / "instance.json");
  out << sidecar.dump(2) << "\n";
}

}  // namespace rpqn::bench
