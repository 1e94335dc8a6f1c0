#pragma once

#include <utility>
#include <vector>

#include "qlnorm/flow.hpp"
#include "qlnorm/model.hpp"

namespace qlnorm {

// Discrete path on the mass sphere. aux_s[j] is the dilation coordinate of
// point j: the point represents H(u, s) = e^{Ns/2} u(e^s .).
struct Path {
  std::vector<RadialField> points;
  std::vector<double> aux_s;

  size_t size() const { return points.size(); }
  // Energies J_mu(H(u_j, s_j)) in closed form.
  std::vector<double> energies(double mu, double p) const;
  std::string csv(double mu, double p) const;
};

struct MPassConfig {
  int points = 24;
  int max_sweeps = 400;
  double step = 0.5;        // preconditioned descent step at the path ends
  double peak_factor = 0.2; // step multiplier at the current maximum
  double s_step = 0.02;     // clip on the aux-coordinate update
  double tol = 1e-9;        // relative peak decrease that ends deformation
  int patience = 10;        // sweeps below tol before stopping
  int retries = 3;
  NewtonOptions newton;

  void validate() const;
};

struct MPReport {
  double gamma = 0.0;                 // best path maximum
  SolveReport peak;                   // refined critical point
  std::vector<double> path_values;    // J_mu along the final path
  std::vector<double> gamma_history;  // running min of the per-sweep maximum
  std::vector<double> max_history;    // raw per-sweep maximum
  bool saddle_check = false;
  double J_u0 = 0.0, J_u1 = 0.0;
  int sweeps = 0;
  Path path;
};

struct Endpoints {
  RadialField u0, u1;
  double theta0 = 1.0;  // u0 = dilate(v, theta0), v a bump with the gradient scale of u1
  bool strict = true;   // J(u1) < k0/4 held; otherwise the ring-sample bound was used
};

// u1 must have mass c (global minimizer, local minimizer, or a shrunk threshold
// minimizer). u0 is the dilation closest to 1 of a compactly supported bump with barrier < k0
// and J <= k0/8.
Endpoints endpoints(const Params& prm, double k0, const RadialField& u1, double ring_floor);

Path init_path(const RadialField& u0, const RadialField& u1, int P);

struct AuxGradient {
  RadialField g_u;
  double g_s;
};
// Tangential gradient of u -> J_mu(H(u, s)) and its s-derivative Q_mu(H(u, s)).
AuxGradient aux_gradient(const RadialField& u, double s, double mu, double p, int N);
double aux_energy(const RadialField& u, double s, double mu, double p, int N);

SolveReport refine_peak(const RadialField& peak, const Params& prm, const MPassConfig& cfg,
                        double floor_J);

MPReport deform(Path path, const Params& prm, const MPassConfig& cfg);

// Endpoints + path + deformation + refinement in one call.
MPReport mountain_pass(const Params& prm, double k0, const RadialField& u1, double ring_floor,
                       const MPassConfig& cfg);

}  // namespace qlnorm
