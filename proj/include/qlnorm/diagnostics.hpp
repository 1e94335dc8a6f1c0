#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qlnorm/flow.hpp"
#include "qlnorm/model.hpp"

namespace qlnorm {

constexpr double kEpsFloor = 1e-12;
constexpr double kIdentityTol = 1e-3;

struct IdentityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_residual = 0.0;
  double rel_residual = 0.0;
  double tolerance = kIdentityTol;
  bool pass = true;
  bool skipped = false;  // identity outside the scope of the known results
};

IdentityReport make_identity(std::string name, double lhs, double rhs, double tol = kIdentityTol);

// (N-2)/N (grad2/2 + quasi) - lambda/2 mass = pot/(p+1)
IdentityReport pohozaev_residual(const EnergyBreakdown& b, double lambda, double p, int N);
IdentityReport pohozaev_residual(const RadialField& u, double lambda, double p, int N);

// mu grad4 + grad2 + 4 quasi - lambda mass = pot
IdentityReport nehari_residual(const EnergyBreakdown& b, double lambda, double p, double mu = 0.0);
IdentityReport nehari_residual(const RadialField& u, double lambda, double p, double mu = 0.0);

// lambda mass = A grad2 + 2 B quasi with A, B fixed by (N, p).
IdentityReport multiplier_identity(const EnergyBreakdown& b, double lambda, double p, int N);
// Coefficients (a, b) with residual(multiplier) = a residual(pohozaev) + b residual(nehari).
std::pair<double, double> multiplier_identity_combination(double p);
std::pair<double, double> multiplier_identity_coefficients(double p, int N);

// mu (N-4)/(4N) grad4 + (N-2)/N (grad2/2 + quasi) - beta/2 mass = pot/(p+1)
IdentityReport perturbed_pohozaev_residual(const EnergyBreakdown& b, double beta, double mu,
                                           double p, int N);
IdentityReport perturbed_pohozaev_residual(const RadialField& u, double beta, double mu, double p,
                                           int N);

// J_mu = mu/N grad4 + (grad2 + 2 quasi)/N + beta/2 mass
IdentityReport energy_identity_residual(const EnergyBreakdown& b, double beta, double mu, double p,
                                        int N);
IdentityReport energy_identity_residual(const RadialField& u, double beta, double mu, double p,
                                        int N);

double fixed_lambda_energy(const EnergyBreakdown& b, double lambda, double p);
double fixed_lambda_energy(const RadialField& u, double lambda, double p);

// Strong-form residual ||J'(u) - lambda u|| relative to ||lambda u|| + ||u^p||.
double strong_residual(const RadialField& u, double lambda, double mu, double p);

// Every identity applicable to a report (mu = 0 and mu > 0 forms).
std::vector<IdentityReport> identity_suite(const SolveReport& rep, double p, int N);
std::string identity_csv(const std::vector<IdentityReport>& reports);
std::string identity_summary(const std::vector<IdentityReport>& reports);

struct AsymptoticScaling {
  double alpha, beta, lambda1, lambda2, lambda3;
};
AsymptoticScaling asymptotic_scaling(double p, int N);

struct GroundStateComparison {
  bool skipped = false;  // N = 1
  double beta = 0.0;
  double I_value_minimizer = 0.0;
  double I_value_shooting = 0.0;
  double relative_gap = 0.0;
  double t0 = 1.0;         // mass-matching dilation of the shooting solution
  double I_value_t0 = 0.0;
  double t_argmax = 1.0;   // maximizer of the directly evaluated t-profile
  std::vector<double> t, profile_closed, profile_direct;
  bool ordering_ok = false;  // I(minimizer) <= I(u_t0) <= I(shooting), with slack
};

// u_t(x) = phi(x/t) profile of I_beta; shooting is the primal field u = f(v).
GroundStateComparison groundstate_compare(const SolveReport& minimizer, const RadialField& shooting,
                                          double p, int N);

struct AsymptoticRow {
  double c;
  double beta;
  double m;
  double m_over_c;
  double comparator;  // closed-form upper bound J(v^t)/(t c0) from the first row
  bool converged;
};
struct AsymptoticTable {
  AsymptoticScaling scaling;
  std::vector<AsymptoticRow> rows;
  bool beta_decreasing = false;
  bool beta_doubling = false;  // |beta| at least doubles on every step after the first
  bool m_over_c_decreasing = false;
};

AsymptoticTable multiplier_asymptotics(double p, int N, const std::vector<double>& c_ladder,
                                       const std::function<GridPtr(double)>& grid_for,
                                       const FlowConfig& cfg);

IdentityReport nonexistence_check(const SolveReport& rep, double p, int N);

}  // namespace qlnorm
