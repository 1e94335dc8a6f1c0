#pragma once

#include <utility>
#include <vector>

#include "qlnorm/dual.hpp"
#include "qlnorm/model.hpp"

namespace qlnorm {

// Shooting parameters for v'' + (N-1)/r v' + rhs(v) = 0, v(0) = v0, v'(0) = 0.
struct ShootConfig {
  double lambda = 0.0;
  double v0_lo = 1e-3;
  double v0_hi = 1e3;
  double r_max = 200.0;
  double step = 0.05;          // output grid spacing
  double zero_tolerance = 1e-8;
  double rtol = 1e-12;

  void validate() const;
};

enum class ShotOutcome {
  Crossed,   // v changed sign
  Turned,    // v' > 0 while v > 0 (falls back toward a nonzero state)
  Reached,   // arrived at r_max positive and decreasing
  Diverged,  // blow-up or integrator failure
};

const char* to_string(ShotOutcome o);

struct ShotResult {
  ShotOutcome outcome = ShotOutcome::Reached;
  double v0 = 0.0;
  double r_stop = 0.0;      // radius where integration ended
  double tail_from = -1.0;  // radius where the linear tail was spliced in (< 0: none)
  GridPtr grid;
  Vec v;   // samples on grid, zero past r_stop
  Vec dv;  // derivative samples

  // Same samples as a field (Dirichlet node set to zero).
  RadialField field() const;
};

ShotResult integrate_radial(const ShootConfig& cfg, double v0, const DualTransform& t, double p, int N);

// Bisects v0 between a crossing shot and a non-crossing one. The returned profile
// is positive and non-increasing. For lambda < 0 the exponentially small tail,
// where the nonlinearity is negligible, is replaced by the decaying linear mode.
ShotResult find_ground(const ShootConfig& cfg, const DualTransform& t, double p, int N);

struct DecayReport {
  double slope = 0.0;
  double C_fit = 0.0;
  double C_integral = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  std::vector<double> r, a_r, b_r, A_r;
};

// Tail analysis of a lambda = 0 profile on [r_lo, r_hi]; defaults to
// [r_max/10, r_max/2] when the window is left empty.
DecayReport decay_fit(const ShotResult& shot, const DualTransform& t, double p, int N,
                      std::pair<double, double> window = {0.0, 0.0});

// Doubling-window test of the convergence of int r^{N-1} v^2 dr.
bool l2_membership(const RadialField& v, int N);
// Ratios of successive doubling-window increments used by l2_membership.
std::vector<double> l2_increment_ratios(const RadialField& v, int N);

// Primitive of the semilinear right-hand side: F(v) = f^{p+1}/(p+1) + lambda f^2/2.
double rhs_primitive(const DualTransform& t, double v, double lambda, double p);

}  // namespace qlnorm
