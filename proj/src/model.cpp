#include "qlnorm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qlnorm/error.hpp"

namespace qlnorm {

double sphere_surface(int N) {
  return 2.0 * std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N);
}

double RadialGrid::ball_volume() const { return surface / N * std::pow(R_max, N); }

GridPtr build_grid(int N, double R_max, int n) {
  if (N < 1) throw Error(ErrorKind::InvalidConfig, "grid dimension must be >= 1");
  if (!(R_max > 0.0) || !std::isfinite(R_max))
    throw Error(ErrorKind::InvalidConfig, "grid radius must be positive");
  if (n < 16) throw Error(ErrorKind::InvalidConfig, "grid needs at least 16 intervals");

  auto g = std::make_shared<RadialGrid>();
  g->N = N;
  g->R_max = R_max;
  g->n = n;
  g->h = R_max / n;
  g->surface = sphere_surface(N);
  g->r.resize(n + 1);
  g->w.resize(n + 1);
  g->face_w.resize(n);
  g->face_r.resize(n);
  const double h = g->h;
  for (int i = 0; i <= n; ++i) {
    g->r[i] = (i == n) ? R_max : i * h;
    const double lo = std::max(g->r[i] - 0.5 * h, 0.0);
    const double hi = std::min(g->r[i] + 0.5 * h, R_max);
    g->w[i] = g->surface / N * (std::pow(hi, N) - std::pow(lo, N));
  }
  for (int f = 0; f < n; ++f) {
    g->face_r[f] = (f + 0.5) * h;
    g->face_w[f] = g->surface * std::pow(g->face_r[f], N - 1) * h;
  }
  return g;
}

RadialField::RadialField(GridPtr g, Vec values) : grid(std::move(g)), u(std::move(values)) {
  if (!grid) throw Error(ErrorKind::InvalidConfig, "field without grid");
  if (u.size() != grid->size())
    throw Error(ErrorKind::DimensionMismatch, "field size does not match grid");
}

void require_same_grid(const RadialField& a, const RadialField& b) {
  if (a.grid == b.grid) return;
  if (!a.grid || !b.grid || a.grid->N != b.grid->N || a.grid->n != b.grid->n ||
      a.grid->R_max != b.grid->R_max)
    throw Error(ErrorKind::DimensionMismatch, "fields live on different grids");
}

EnergyBreakdown breakdown(const RadialField& f, double p) {
  const auto& g = *f.grid;
  const Vec& u = f.u;
  EnergyBreakdown b;
  for (int k = 0; k < g.n; ++k) {
    const double d = (u[k + 1] - u[k]) / g.h;
    const double d2 = d * d;
    const double W = g.face_w[k];
    b.grad2 += W * d2;
    b.grad4 += W * d2 * d2;
    b.quasi += W * 0.5 * (u[k] * u[k] + u[k + 1] * u[k + 1]) * d2;
  }
  for (int i = 0; i <= g.n; ++i) {
    const double a = std::abs(u[i]);
    b.pot += g.w[i] * std::pow(a, p + 1.0);
    b.mass += g.w[i] * a * a;
  }
  return b;
}

double mass(const RadialField& f) { return (f.grid->w.array() * f.u.array().square()).sum(); }

double l2_inner(const RadialField& a, const RadialField& b) {
  require_same_grid(a, b);
  return (a.grid->w.array() * a.u.array() * b.u.array()).sum();
}

double l2_norm(const RadialField& u) { return std::sqrt(mass(u)); }

double J_mu(const EnergyBreakdown& b, double mu, double p) {
  return mu / 4.0 * b.grad4 + 0.5 * b.grad2 + b.quasi - b.pot / (p + 1.0);
}

double Q_mu(const EnergyBreakdown& b, double mu, double p, int N) {
  return mu * (N + 4) / 4.0 * b.grad4 + b.grad2 + (N + 2) * b.quasi -
         N * (p - 1.0) / (2.0 * (p + 1.0)) * b.pot;
}

EnergyWeights EnergyWeights::J(double mu, double p) {
  return EnergyWeights{mu / 4.0, 0.5, 1.0, -1.0 / (p + 1.0), 0.0};
}

double EnergyWeights::eval(const EnergyBreakdown& b) const {
  return a4 * b.grad4 + a2 * b.grad2 + aq * b.quasi + ap * b.pot + am * b.mass;
}

Vec energy_gradient(const RadialField& f, const EnergyWeights& e, double p) {
  const auto& g = *f.grid;
  const Vec& u = f.u;
  Vec out = Vec::Zero(g.size());
  const double h = g.h;
  for (int k = 0; k < g.n; ++k) {
    const double d = (u[k + 1] - u[k]) / h;
    const double s = 0.5 * (u[k] * u[k] + u[k + 1] * u[k + 1]);
    const double W = g.face_w[k];
    const double phi = 4.0 * e.a4 * d * d * d + 2.0 * e.a2 * d + 2.0 * e.aq * s * d;
    out[k] += W * (-phi / h + e.aq * d * d * u[k]);
    out[k + 1] += W * (phi / h + e.aq * d * d * u[k + 1]);
  }
  for (int i = 0; i <= g.n; ++i) {
    const double a = std::abs(u[i]);
    out[i] += g.w[i] * (e.ap * (p + 1.0) * std::pow(a, p - 1.0) * u[i] + 2.0 * e.am * u[i]);
  }
  out[g.n] = 0.0;
  return out;
}

Tridiag energy_hessian(const RadialField& f, const EnergyWeights& e, double p) {
  const auto& g = *f.grid;
  const Vec& u = f.u;
  const int m = g.n;
  Tridiag H{Vec::Zero(m - 1), Vec::Zero(m), Vec::Zero(m - 1)};
  const double h = g.h;
  const double h2 = h * h;
  for (int k = 0; k < g.n; ++k) {
    const double d = (u[k + 1] - u[k]) / h;
    const double s = 0.5 * (u[k] * u[k] + u[k + 1] * u[k + 1]);
    const double W = g.face_w[k];
    const double phig = 12.0 * e.a4 * d * d + 2.0 * e.a2 + 2.0 * e.aq * s;
    H.diag[k] += W * (phig / h2 - 4.0 * e.aq * d * u[k] / h + e.aq * d * d);
    if (k + 1 < m) {
      H.diag[k + 1] += W * (phig / h2 + 4.0 * e.aq * d * u[k + 1] / h + e.aq * d * d);
      const double off = W * (-phig / h2 - 2.0 * e.aq * d * d);
      H.lower[k] += off;
      H.upper[k] += off;
    }
  }
  for (int i = 0; i < m; ++i) {
    const double a = std::abs(u[i]);
    H.diag[i] += g.w[i] * (e.ap * (p + 1.0) * p * std::pow(a, p - 1.0) + 2.0 * e.am);
  }
  return H;
}

RadialField euler_lagrange(const RadialField& f, double lambda, double mu, double p) {
  auto e = EnergyWeights::J(mu, p);
  e.am = -0.5 * lambda;
  Vec grad = energy_gradient(f, e, p);
  grad.array() /= f.grid->w.array();
  grad[f.grid->n] = 0.0;
  return RadialField(f.grid, std::move(grad));
}

double multiplier(const EnergyBreakdown& b, double mu) {
  if (!(b.mass > 0.0)) throw Error(ErrorKind::DivisionByZero, "multiplier of a zero field");
  return (mu * b.grad4 + b.grad2 + 4.0 * b.quasi - b.pot) / b.mass;
}

double multiplier(const RadialField& u, double mu, double p) {
  return multiplier(breakdown(u, p), mu);
}

RadialField normalize_mass(const RadialField& u, double c) {
  const double m = mass(u);
  if (!(m > 0.0)) throw Error(ErrorKind::DivisionByZero, "cannot normalize a zero field");
  Vec v = u.u * std::sqrt(c / m);
  v[u.grid->n] = 0.0;
  return RadialField(u.grid, std::move(v));
}

RadialField dilate(const RadialField& f, double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw Error(ErrorKind::InvalidConfig, "dilation factor must be positive");
  if (t == 1.0) return f;
  const auto& g = *f.grid;
  Vec v = Vec::Zero(g.size());
  const double amp = std::pow(t, 0.5 * g.N);
  for (int i = 0; i < g.n; ++i) {
    const double x = t * g.r[i] / g.h;
    if (x >= g.n) break;
    const int k = static_cast<int>(x);
    const double a = x - k;
    v[i] = amp * ((1.0 - a) * f.u[k] + a * f.u[k + 1]);
  }
  RadialField out(f.grid, std::move(v));
  const double m0 = mass(f);
  const double m1 = mass(out);
  if (m0 > 0.0 && m1 > 0.0) out.u *= std::sqrt(m0 / m1);
  return out;
}

DilationValue dilation_profile(const EnergyBreakdown& b, double mu, double p, int N, double t) {
  const double e4 = N + 4.0;
  const double e3 = N + 2.0;
  const double ep = N * (p - 1.0) / 2.0;
  const double t4 = std::pow(t, e4);
  const double t2 = t * t;
  const double t3 = std::pow(t, e3);
  const double tp = std::pow(t, ep);
  DilationValue d;
  d.J = mu / 4.0 * t4 * b.grad4 + 0.5 * t2 * b.grad2 + t3 * b.quasi - tp * b.pot / (p + 1.0);
  d.Q = mu * e4 / 4.0 * t4 * b.grad4 + t2 * b.grad2 + e3 * t3 * b.quasi -
        ep / (p + 1.0) * tp * b.pot;
  return d;
}

double barrier_value(const EnergyBreakdown& b) { return b.grad2 + b.quasi; }
double barrier_value(const RadialField& u) { return barrier_value(breakdown(u, 2.0)); }
bool in_barrier(const RadialField& u, double k0) { return barrier_value(u) <= k0; }

double X_norm(const RadialField& f) {
  const auto b = breakdown(f, 3.0);  // pot with p = 3 is the L4 integral
  return std::pow(b.grad4, 0.25) + std::pow(b.pot, 0.25) + std::sqrt(b.grad2) +
         std::sqrt(b.mass);
}

RadialField rearrange_decreasing(const RadialField& f) {
  const auto& g = *f.grid;
  const int sz = g.size();
  std::vector<int> order(sz);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(f.u[a]) > std::abs(f.u[b]); });
  // Sorted values form a step function in cumulative measure; each node takes
  // the root mean square over its own measure cell, which conserves mass.
  Vec out = Vec::Zero(sz);
  int k = 0;
  double k_end = g.w[order[0]];
  double cell_start = 0.0;
  for (int i = 0; i < sz; ++i) {
    const double cell_end = cell_start + g.w[i];
    double acc = 0.0, pos = cell_start;
    while (pos < cell_end && k < sz) {
      const double stop = std::min(cell_end, k_end);
      acc += (stop - pos) * f.u[order[k]] * f.u[order[k]];
      pos = stop;
      if (stop >= k_end && ++k < sz) k_end += g.w[order[k]];
    }
    out[i] = g.w[i] > 0.0 ? std::sqrt(acc / g.w[i]) : std::abs(f.u[order[std::min(k, sz - 1)]]);
    cell_start = cell_end;
  }
  out[g.n] = 0.0;
  return RadialField(f.grid, std::move(out));
}

GNBounds gn_bounds(const RadialField& u, double p, int N) {
  const auto b = breakdown(u, p);
  const double bar = barrier_value(b);
  GNBounds out;
  out.lhs = b.pot;
  out.rhs11 = std::pow(bar, N * (p - 1.0) / 4.0) *
              std::pow(b.mass, ((N + 2.0) - (N - 2.0) * p) / 4.0);
  if (N >= 3) out.rhs12 = std::pow(bar, double(N) / (N - 2.0));
  out.rhs451 = std::pow(b.mass, (3.0 * N + 2.0 - (N - 2.0) * p) / (2.0 * (N + 2.0))) *
               std::pow(b.quasi, N * (p - 1.0) / (2.0 * (N + 2.0)));
  return out;
}

}  // namespace qlnorm
