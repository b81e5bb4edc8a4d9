#include "rpqn/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rpqn {

std::string to_string(StepClass c) {
  switch (c) {
    case StepClass::Unsuccessful:
      return "unsuccessful";
    case StepClass::Successful:
      return "successful";
    case StepClass::HighlySuccessful:
      return "highly_successful";
  }
  return "unsuccessful";
}

StepClass step_class_from_string(const std::string& s) {
  if (s == "successful") return StepClass::Successful;
  if (s == "highly_successful") return StepClass::HighlySuccessful;
  if (s == "unsuccessful") return StepClass::Unsuccessful;
  throw std::invalid_argument("unknown step class: " + s);
}

const char* TraceTable::csv_header() {
  return "k,time_s,psi,obj_err,res_norm,mu,rho,step_class,pred,ared,d_norm,sub_iters,"
         "f_evals,g_evals,prox_evals,matvecs";
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_field(const std::string& s) {
  if (s.empty()) return kNan;
  return std::stod(s);
}

}  // namespace

void TraceTable::validate() const {
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].k <= rows[i - 1].k) throw std::logic_error("trace: k not strictly increasing");
    if (rows[i].time_s < rows[i - 1].time_s)
      throw std::logic_error("trace: time not nondecreasing");
  }
}

void TraceTable::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file for writing: " + path);
  out << csv_header() << "\n";
  for (const auto& r : rows) {
    out << r.k << ',' << fmt(r.time_s) << ',' << fmt(r.psi) << ',' << fmt(r.obj_err) << ','
        << fmt(r.res_norm) << ',' << fmt(r.mu) << ',' << fmt(r.rho) << ','
        << to_string(r.step_class) << ',' << fmt(r.pred) << ',' << fmt(r.ared) << ','
        << fmt(r.d_norm) << ',' << r.sub_iters << ',' << r.f_evals << ',' << r.g_evals << ','
        << r.prox_evals << ',' << r.matvecs << "\n";
  }
  if (!out) throw std::runtime_error("error writing trace file: " + path);
}

TraceTable TraceTable::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace file: " + path);
  if (line != csv_header()) throw std::runtime_error("unexpected trace header in " + path);
  TraceTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    while (fields.size() < 16) fields.emplace_back();
    IterationRecord r;
    r.k = std::stol(fields[0]);
    r.time_s = parse_field(fields[1]);
    r.psi = parse_field(fields[2]);
    r.obj_err = parse_field(fields[3]);
    r.res_norm = parse_field(fields[4]);
    r.mu = parse_field(fields[5]);
    r.rho = parse_field(fields[6]);
    r.step_class = step_class_from_string(fields[7]);
    r.pred = parse_field(fields[8]);
    r.ared = parse_field(fields[9]);
    r.d_norm = parse_field(fields[10]);
    r.sub_iters = static_cast<int>(std::stol(fields[11]));
    r.f_evals = std::stol(fields[12]);
    r.g_evals = std::stol(fields[13]);
    r.prox_evals = std::stol(fields[14]);
    r.matvecs = std::stol(fields[15]);
    table.rows.push_back(std::move(r));
  }
  return table;
}

}  // namespace rpqn
