#pragma once

#include "rpqn/types.hpp"

#include <string>
#include <vector>

namespace rpqn {

/// One row per outer iteration. psi, res_norm and mu describe the state the
/// iteration started from (the values that drove its decisions); the
/// remaining fields describe what the iteration did. Counters are
/// cumulative at the end of the iteration. NaN fields serialize as empty
/// CSV cells.
struct IterationRecord {
  long k = 0;
  double time_s = 0.0;
  double psi = kNan;
  double obj_err = kNan;   // (psi - psi*) / max(1, |psi*|), when psi* is known
  double res_norm = kNan;  // ||r(x^k)||_2
  double mu = kNan;
  double rho = kNan;  // empty when the ratio test was skipped
  StepClass step_class = StepClass::Unsuccessful;
  double pred = kNan;
  double ared = kNan;
  double d_norm = kNan;
  int sub_iters = 0;
  bool skipped_pair = false;
  bool sub_converged = true;  // false when the inner Newton method gave up
  long f_evals = 0;
  long g_evals = 0;
  long prox_evals = 0;
  long matvecs = 0;
};

std::string to_string(StepClass c);
StepClass step_class_from_string(const std::string& s);

struct TraceTable {
  std::vector<IterationRecord> rows;

  /// k strictly increasing, time nondecreasing.
  void validate() const;

  void write_csv(const std::string& path) const;
  static TraceTable read_csv(const std::string& path);

  static const char* csv_header();
};

}  // namespace rpqn
