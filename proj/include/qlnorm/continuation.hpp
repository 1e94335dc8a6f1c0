#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlnorm/error.hpp"
#include "qlnorm/flow.hpp"
#include "qlnorm/mpass.hpp"

namespace qlnorm {

// Geometric ladder mu0, mu0*factor, ... ending at mu_min.
std::vector<double> mu_schedule(double mu0, double factor, double mu_min);

struct ContinuationRow {
  double mu;
  double J;
  double mu_grad4;
  double lambda;
  double mass;
  double grad2;
  double quasi;
  double pot;
  bool converged;
  bool warm;  // false when the cold default start was lower and used instead
};

struct ContinuationTrace {
  Classification kind = Classification::GlobalMin;
  Params params;
  std::vector<ContinuationRow> rows;
  std::optional<RadialField> final_field;
  std::optional<double> reference_J;  // J at mu = 0 of the minimum a mountain pass starts from
  double k0 = 0.0;
  bool truncated = false;
  bool nonnegative_multiplier = false;  // some row had lambda >= 0
  std::string note;
  std::optional<ErrorKind> error;  // set when a row threw
  // First-row mountain-pass path: final J values and per-sweep maxima.
  std::vector<double> path_values, max_history;

  std::string csv() const;
};

struct ContinuationConfig {
  FlowConfig flow;
  MPassConfig mpass;
  NewtonOptions newton;
  int probes = 60;
  std::uint64_t seed = 1;
  // Start for the first row. Local minima and mountain passes default to the
  // minimizer at 1.5 c rescaled to mass c.
  std::optional<RadialField> init;
};

ContinuationTrace continue_solve(Classification kind, const Params& prm, GridPtr grid,
                                 const std::vector<double>& schedule,
                                 const ContinuationConfig& cfg);

// Evaluates the final field at mu = 0 and checks it against the expected sign
// table, lambda < 0, and a non-increasing profile. Violations set
// classification = Failed with the reason in note.
SolveReport classify_limit(const ContinuationTrace& trace, double grad_tol = 1e-6);

// Non-increasing up to slack * max|u|.
bool is_nonincreasing(const RadialField& u, double slack = 1e-8);

}  // namespace qlnorm
