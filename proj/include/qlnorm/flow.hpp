#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlnorm/model.hpp"

namespace qlnorm {

struct FlowConfig {
  double tau = 1.0;          // initial step of the preconditioned flow
  int max_iters = 20000;
  double grad_tol = 1e-8;    // ||projected gradient||_L2 / ||u||_L2
  double q_tol = 1e-3;       // |Q_mu| / (grad2 + quasi)
  double backtrack = 0.5;
  int restarts = 8;
  double newton_switch = 1e-3;  // residual below which Newton steps are tried
  bool use_newton = true;
  // Early exit once J drops below this value (sign probes of m(c)).
  std::optional<double> stop_below;

  void validate() const;
};

enum class Classification { GlobalMin, LocalMin, MountainPass, Failed };
const char* to_string(Classification c);
Classification classification_from_string(const std::string& s);

struct SolveReport {
  RadialField field;
  double lambda = 0.0;
  double J_value = 0.0;
  double Q_value = 0.0;
  double pohozaev_residual = 0.0;  // relative residual of the mu-perturbed Pohozaev identity
  double grad_residual = 0.0;      // ||projected gradient|| / ||u||
  int iters = 0;
  bool converged = false;
  Classification classification = Classification::Failed;
  double mu = 0.0;
  double c = 0.0;
  std::string note;
};

// Fills the scalar fields of a report from a field.
SolveReport make_report(const RadialField& u, const Params& prm, int iters, bool converged,
                        Classification cls, double grad_tol);

RadialField project_gradient(const RadialField& u, double mu, double p);

// Direction -P^{-1} G corrected so that <d, w u> = 0, where P is the convex part
// of the Hessian plus sigma times the mass matrix. Size n (Dirichlet node dropped).
Vec preconditioned_direction(const RadialField& u, const Vec& G, double mu, double sigma);
// normalize_mass(u + tau d) with d over the free nodes.
RadialField step_on_sphere(const RadialField& u, const Vec& d, double tau, double c);
double gradient_residual(const RadialField& u, double mu, double p);

// Preconditioned constrained descent on the mass sphere with backtracking.
SolveReport descend(const RadialField& u0, const Params& prm, const FlowConfig& cfg);

// Bordered Newton on (u, lambda) with residual-norm damping. Converges to the
// nearest nondegenerate constrained critical point, minimum or saddle.
struct NewtonOptions {
  int max_iters = 60;
  double tol = 1e-10;
  bool require_descent = false;        // reject steps that raise J
  std::optional<double> barrier_k0;    // reject steps entering the barrier
};
SolveReport newton_refine(const RadialField& u0, const Params& prm, const NewtonOptions& opt);

// Dilation onto the nearest root of Q_mu along the fiber t -> u^t.
RadialField scale_to_zero_Q(const RadialField& u, double mu, double p);
// The root t* found by the closed-form search (no resampling).
double zero_Q_factor(const EnergyBreakdown& b, double mu, double p, int N);

// Dilation factor of the lowest interior local minimum of t -> J_mu(u^t),
// or 1 when the fiber has none in [1e-3, 1e3].
double best_dilation(const EnergyBreakdown& b, double mu, double p, int N);

// Probe shapes (mass 1 before normalization) used for barrier calibration.
std::vector<RadialField> probe_family(GridPtr grid, int count, std::uint64_t seed);

struct RingSample {
  double k;      // barrier value of the probe
  double J;
  double Q;
};
// Evaluates probes dilated (in closed form) to barrier values in [lo, hi].
std::vector<RingSample> ring_samples(const std::vector<RadialField>& probes, const Params& prm,
                                     double lo, double hi, int per_probe);

double calibrate_k0(const Params& prm, GridPtr grid, int probes, std::uint64_t seed = 1);

// Default starting profile: Gaussian at mass c dilated to its best fiber point.
RadialField default_guess(const Params& prm, GridPtr grid);

// Descent from init (or the default guess) toward the global minimizer.
SolveReport global_minimize(const Params& prm, GridPtr grid, const FlowConfig& cfg,
                            const std::optional<RadialField>& init = std::nullopt);

// Descent restricted to fields outside the barrier set.
SolveReport minimize_local(const Params& prm, double k0, const FlowConfig& cfg,
                           const RadialField& init);

// Threshold used to call a computed m(c) negative.
double negative_threshold(const FlowConfig& cfg);

struct CpnEstimate {
  double c = 0.0;
  double lo = 0.0, hi = 0.0;
  std::optional<RadialField> minimizer;  // minimizer at the upper bracket end
  int evaluations = 0;
};
CpnEstimate estimate_cpn(double p, int N, double c_lo, double c_hi, GridPtr grid,
                         const FlowConfig& cfg, double rel_width = 0.01);

// For p = 3 + 4/N: smallest c whose probe family contains u with inf_t J(u^t) <= 0.
double estimate_cN(int N, GridPtr grid, double c_lo, double c_hi, int probes = 32);

enum class RowStatus { Converged, NotConverged, Unbounded, Failed };
const char* to_string(RowStatus s);

struct MassScanRow {
  double c;
  double m;
  double lambda;
  RowStatus status;
};
struct MassScan {
  int N = 0;
  double p = 0.0;
  std::vector<MassScanRow> rows;
  std::string csv() const;
};

// Dilation ladder: J of u^t for t = 2^k until J < floor, closed form.
bool dilation_ladder_unbounded(const RadialField& u, double mu, double p, double floor = -1e6);

MassScan mass_scan(double p, int N, const std::vector<double>& c_list, GridPtr grid,
                   const FlowConfig& cfg, int jobs = 1);

}  // namespace qlnorm
