#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <utility>

#include "qlnorm/params.hpp"

namespace qlnorm {

using Vec = Eigen::VectorXd;

// Uniform radial grid r_i = i*h, i = 0..n. Node n carries the Dirichlet value.
// w_i is the exact measure of the dual shell [r_i - h/2, r_i + h/2] clipped to
// [0, R_max], so sum(w) is the ball volume and the origin has a finite cell.
struct RadialGrid {
  int N = 0;
  double R_max = 0.0;
  int n = 0;
  double h = 0.0;
  double surface = 0.0;  // |S^{N-1}|
  Vec r;                 // n+1 nodes
  Vec w;                 // n+1 node weights
  Vec face_w;            // n face weights |S| r_{i+1/2}^{N-1} h
  Vec face_r;            // n face midpoints

  int size() const { return n + 1; }
  double ball_volume() const;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

GridPtr build_grid(int N, double R_max, int n);
double sphere_surface(int N);

struct RadialField {
  GridPtr grid;
  Vec u;

  RadialField() = default;
  RadialField(GridPtr g, Vec values);
  // Samples fn(r) at the nodes and zeroes the Dirichlet node.
  template <class F>
  static RadialField sample(GridPtr g, F&& fn) {
    Vec v(g->size());
    for (int i = 0; i < g->size(); ++i) v[i] = fn(g->r[i]);
    v[g->n] = 0.0;
    return RadialField(std::move(g), std::move(v));
  }
  int N() const { return grid->N; }
};

struct EnergyBreakdown {
  double grad2 = 0.0;
  double grad4 = 0.0;
  double quasi = 0.0;
  double pot = 0.0;
  double mass = 0.0;
};

EnergyBreakdown breakdown(const RadialField& u, double p);
double mass(const RadialField& u);
double l2_inner(const RadialField& a, const RadialField& b);
double l2_norm(const RadialField& u);

double J_mu(const EnergyBreakdown& b, double mu, double p);
double Q_mu(const EnergyBreakdown& b, double mu, double p, int N);

// Linear functional sum a4*grad4 + a2*grad2 + aq*quasi + ap*pot + am*mass.
struct EnergyWeights {
  double a4 = 0.0, a2 = 0.0, aq = 0.0, ap = 0.0, am = 0.0;
  static EnergyWeights J(double mu, double p);
  double eval(const EnergyBreakdown& b) const;
};

// Partial derivatives dE/du_i (Dirichlet entry zero).
Vec energy_gradient(const RadialField& u, const EnergyWeights& e, double p);

// Tridiagonal Hessian of E over nodes 0..n-1 (the Dirichlet node is excluded).
struct Tridiag {
  Vec lower, diag, upper;  // sizes m-1, m, m-1
};
Tridiag energy_hessian(const RadialField& u, const EnergyWeights& e, double p);

// Strong-form residual of J_mu'(u) - lambda u, normalized so that its weighted
// L2 pairing with any test field equals the directional derivative of the
// discrete energy.
RadialField euler_lagrange(const RadialField& u, double lambda, double mu, double p);

double multiplier(const RadialField& u, double mu, double p);
double multiplier(const EnergyBreakdown& b, double mu);

RadialField dilate(const RadialField& u, double t);
// Rescales to the prescribed mass; throws on a zero field.
RadialField normalize_mass(const RadialField& u, double c);

struct DilationValue {
  double J;
  double Q;
};
DilationValue dilation_profile(const EnergyBreakdown& b, double mu, double p, int N, double t);

double barrier_value(const EnergyBreakdown& b);
double barrier_value(const RadialField& u);
bool in_barrier(const RadialField& u, double k0);

double X_norm(const RadialField& u);

RadialField rearrange_decreasing(const RadialField& u);

struct GNBounds {
  double lhs;
  double rhs11;
  std::optional<double> rhs12;  // empty for N < 3
  double rhs451;
};
GNBounds gn_bounds(const RadialField& u, double p, int N);

// Same grid check used by every binary operation.
void require_same_grid(const RadialField& a, const RadialField& b);

}  // namespace qlnorm
