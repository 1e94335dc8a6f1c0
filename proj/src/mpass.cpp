#include "qlnorm/mpass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "qlnorm/error.hpp"

namespace qlnorm {

namespace {

EnergyWeights aux_weights(double mu, double p, int N, double t) {
  return EnergyWeights{mu / 4.0 * std::pow(t, N + 4.0), 0.5 * t * t, std::pow(t, N + 2.0),
                       -std::pow(t, N * (p - 1.0) / 2.0) / (p + 1.0), 0.0};
}

RadialField blend(const RadialField& a, const RadialField& b, double x, double c) {
  require_same_grid(a, b);
  return normalize_mass(RadialField(a.grid, (1.0 - x) * a.u + x * b.u), c);
}

// Re-spaces interior points uniformly in energy-weighted L2 arc length.
void respace(Path& path, double mu, double p, double c) {
  const size_t P = path.size();
  if (P < 3) return;
  const auto E = path.energies(mu, p);
  const auto [lo, hi] = std::minmax_element(E.begin(), E.end());
  const double span = std::max(*hi - *lo, 1e-300);
  std::vector<double> L(P, 0.0);
  for (size_t j = 1; j < P; ++j) {
    const double d = l2_norm(RadialField(path.points[j].grid, path.points[j].u - path.points[j - 1].u));
    const double e = 0.5 * (E[j] + E[j - 1]) - *lo;
    L[j] = L[j - 1] + d * (1.0 + e / span);
  }
  if (!(L.back() > 0.0) || !std::isfinite(L.back())) throw Error(ErrorKind::Geometry, "degenerate path");
  Path out;
  out.points.reserve(P);
  out.aux_s.reserve(P);
  out.points.push_back(path.points.front());
  out.aux_s.push_back(path.aux_s.front());
  size_t seg = 1;
  for (size_t j = 1; j + 1 < P; ++j) {
    const double target = L.back() * double(j) / double(P - 1);
    while (seg + 1 < P && L[seg] < target) ++seg;
    const double len = L[seg] - L[seg - 1];
    const double x = len > 0.0 ? (target - L[seg - 1]) / len : 0.0;
    out.points.push_back(blend(path.points[seg - 1], path.points[seg], x, c));
    out.aux_s.push_back((1.0 - x) * path.aux_s[seg - 1] + x * path.aux_s[seg]);
  }
  out.points.push_back(path.points.back());
  out.aux_s.push_back(path.aux_s.back());
  path = std::move(out);
}

}  // namespace

std::vector<double> Path::energies(double mu, double p) const {
  std::vector<double> E(points.size());
  for (size_t j = 0; j < points.size(); ++j)
    E[j] = aux_energy(points[j], aux_s[j], mu, p, points[j].N());
  return E;
}

std::string Path::csv(double mu, double p) const {
  std::ostringstream os;
  os.precision(12);
  os << "index,tau,s,J\n";
  const auto E = energies(mu, p);
  for (size_t j = 0; j < points.size(); ++j)
    os << j << ',' << double(j) / std::max<size_t>(1, points.size() - 1) << ',' << aux_s[j] << ','
       << E[j] << '\n';
  return os.str();
}

void MPassConfig::validate() const {
  if (points < 16) throw Error(ErrorKind::InvalidConfig, "a path needs at least 16 points");
  if (!(step > 0.0) || !(peak_factor > 0.0 && peak_factor <= 1.0) || !(s_step > 0.0) ||
      !(tol > 0.0) || max_sweeps < 1)
    throw Error(ErrorKind::InvalidConfig, "mountain-pass configuration out of range");
}

double aux_energy(const RadialField& u, double s, double mu, double p, int N) {
  return dilation_profile(breakdown(u, p), mu, p, N, std::exp(s)).J;
}

AuxGradient aux_gradient(const RadialField& u, double s, double mu, double p, int N) {
  const double t = std::exp(s);
  Vec G = energy_gradient(u, aux_weights(mu, p, N, t), p);
  G.array() /= u.grid->w.array();
  G[u.grid->n] = 0.0;
  RadialField g(u.grid, std::move(G));
  const double m = mass(u);
  if (m > 0.0) g.u -= (l2_inner(g, u) / m) * u.u;
  return {std::move(g), dilation_profile(breakdown(u, p), mu, p, N, t).Q};
}

Endpoints endpoints(const Params& prm, double k0, const RadialField& u1_in, double ring_floor) {
  prm.validate();
  if (!(k0 > 0.0)) throw Error(ErrorKind::InvalidConfig, "barrier level must be positive");
  Endpoints ep;
  ep.u1 = normalize_mass(u1_in, prm.c);
  const auto b1 = breakdown(ep.u1, prm.p);
  const double J1 = J_mu(b1, prm.mu, prm.p);
  if (barrier_value(b1) < 1.5 * k0)
    throw Error(ErrorKind::Geometry, "far endpoint lies too close to the barrier");
  if (J1 < k0 / 4.0) {
    ep.strict = true;
  } else if (J1 < ring_floor) {
    ep.strict = false;
  } else {
    throw Error(ErrorKind::Geometry, "far endpoint energy is not below the barrier ring");
  }
  // Compactly supported bump with the gradient scale of u1; dilations stay
  // exact on the grid while the support fits inside the box.
  RadialField v = normalize_mass(RadialField::sample(ep.u1.grid, [](double r) {
                                   const double x = 1.0 - r * r;
                                   return x > 0.0 ? x * x * x : 0.0;
                                 }),
                                 prm.c);
  const double t1 = std::sqrt(b1.grad2 / breakdown(v, prm.p).grad2);
  const double support = 1.0 / t1;
  v = dilate(v, t1);
  const auto bv = breakdown(v, prm.p);
  const double R = ep.u1.grid->R_max;
  for (double theta = 0.98; support / theta < R; theta *= 0.98) {
    const auto d = dilation_profile(bv, prm.mu, prm.p, prm.N, theta);
    const double bar = theta * theta * bv.grad2 + std::pow(theta, prm.N + 2.0) * bv.quasi;
    if (bar >= k0 || d.J > k0 / 8.0) continue;
    RadialField u0 = dilate(v, theta);
    const auto b0 = breakdown(u0, prm.p);
    if (barrier_value(b0) < k0 && J_mu(b0, prm.mu, prm.p) <= k0 / 8.0) {
      ep.u0 = std::move(u0);
      ep.theta0 = theta;
      return ep;
    }
  }
  throw Error(ErrorKind::Geometry, "no small dilation satisfies the near-endpoint bounds");
}

Path init_path(const RadialField& u0, const RadialField& u1, int P) {
  if (P < 16) throw Error(ErrorKind::InvalidConfig, "a path needs at least 16 points");
  require_same_grid(u0, u1);
  const double c = mass(u1);
  // First half: dilate u0 up to the gradient scale of u1. Second half: blend.
  const double theta = std::sqrt(breakdown(u0, 2.0).grad2 / breakdown(u1, 2.0).grad2);
  const RadialField mid = dilate(u0, 1.0 / theta);
  Path path;
  path.points.reserve(P);
  path.aux_s.assign(P, 0.0);
  path.points.push_back(u0);
  for (int j = 1; j + 1 < P; ++j) {
    const double tau = double(j) / (P - 1);
    if (tau <= 0.5)
      path.points.push_back(dilate(u0, std::pow(theta, -2.0 * tau)));
    else
      path.points.push_back(blend(mid, u1, 2.0 * tau - 1.0, c));
  }
  path.points.push_back(u1);
  return path;
}

SolveReport refine_peak(const RadialField& peak, const Params& prm, const MPassConfig& cfg,
                        double floor_J) {
  RadialField u = peak;
  try {
    u = scale_to_zero_Q(u, prm.mu, prm.p);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoRoot) throw;
  }
  SolveReport r = newton_refine(u, prm, cfg.newton);
  const auto b = breakdown(r.field, prm.p);
  const double margin = 1e-6 * (b.grad2 + b.quasi);
  if (!(r.J_value > floor_J + margin))
    throw Error(ErrorKind::Refinement, "peak refinement collapsed toward an endpoint basin");
  // One-dimensional saddle test along the dilation fiber.
  const double Jm = dilation_profile(b, prm.mu, prm.p, prm.N, 0.98).J;
  const double Jp = dilation_profile(b, prm.mu, prm.p, prm.N, 1.02).J;
  const bool fiber_max = Jm < r.J_value && Jp < r.J_value;
  if (r.converged && r.lambda < 0.0 && r.J_value > 0.0 && fiber_max)
    r.classification = Classification::MountainPass;
  else
    r.note = fiber_max ? "stationarity or sign conditions not met" : "peak is not a fiber maximum";
  return r;
}

MPReport deform(Path path, const Params& prm, const MPassConfig& cfg) {
  cfg.validate();
  prm.validate();
  const int N = prm.N;
  const size_t P = path.size();
  if (P < 3) throw Error(ErrorKind::InvalidConfig, "path too short");
  MPReport rep;
  const RadialField u0 = path.points.front();
  const RadialField u1 = path.points.back();
  rep.J_u0 = aux_energy(u0, path.aux_s.front(), prm.mu, prm.p, N);
  rep.J_u1 = aux_energy(u1, path.aux_s.back(), prm.mu, prm.p, N);
  double gamma = std::numeric_limits<double>::infinity();
  double prev_max = gamma;
  int quiet = 0, retries = 0;
  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    const auto E = path.energies(prm.mu, prm.p);
    const auto [lo, hi] = std::minmax_element(E.begin(), E.end());
    const double span = std::max(*hi - *lo, 1e-300);
    // Interior points read the frozen previous sweep, so updates are independent.
    Path next = path;
    for (size_t j = 1; j + 1 < P; ++j) {
      const RadialField& u = path.points[j];
      const double s = path.aux_s[j];
      const double eta = cfg.step * (cfg.peak_factor + (1.0 - cfg.peak_factor) * (*hi - E[j]) / span);
      const double t = std::exp(s);
      Vec G = energy_gradient(u, aux_weights(prm.mu, prm.p, N, t), prm.p);
      const double lam = G.dot(u.u) / mass(u);
      Vec d = preconditioned_direction(u, G, prm.mu, std::abs(lam) + 1e-3);
      next.points[j] = step_on_sphere(u, d, eta, prm.c);
      const auto b = breakdown(u, prm.p);
      const double q = dilation_profile(b, prm.mu, prm.p, N, t).Q;
      const double scale = b.grad2 + b.quasi + prm.mu * b.grad4;
      next.aux_s[j] = s - std::clamp(eta * q / scale, -cfg.s_step, cfg.s_step);
      if (std::abs(next.aux_s[j]) > 1e-3) {
        // Fold the dilation into u unless the box truncates it.
        RadialField folded = dilate(next.points[j], std::exp(next.aux_s[j]));
        if (J_mu(breakdown(folded, prm.p), prm.mu, prm.p) <=
            J_mu(breakdown(next.points[j], prm.p), prm.mu, prm.p))
          next.points[j] = std::move(folded);
        next.aux_s[j] = 0.0;
      }
    }
    try {
      respace(next, prm.mu, prm.p, prm.c);
    } catch (const Error&) {
      if (++retries > cfg.retries) throw Error(ErrorKind::Geometry, "path broke during deformation");
      path = init_path(u0, u1, static_cast<int>(P));
      continue;
    }
    next.points.front() = u0;
    next.points.back() = u1;
    path = std::move(next);
    const auto En = path.energies(prm.mu, prm.p);
    const double mx = *std::max_element(En.begin(), En.end());
    rep.max_history.push_back(mx);
    gamma = std::min(gamma, mx);
    rep.gamma_history.push_back(gamma);
    rep.sweeps = sweep + 1;
    if (prev_max - mx < cfg.tol * std::abs(mx))
      ++quiet;
    else
      quiet = 0;
    prev_max = mx;
    if (quiet >= cfg.patience) break;
  }
  rep.gamma = gamma;
  rep.path_values = path.energies(prm.mu, prm.p);
  const size_t k = std::max_element(rep.path_values.begin(), rep.path_values.end()) -
                   rep.path_values.begin();
  auto point = [&](size_t j) {
    return path.aux_s[j] != 0.0 ? dilate(path.points[j], std::exp(path.aux_s[j])) : path.points[j];
  };
  // The saddle usually sits between two path nodes; start from the maximum of
  // the chords next to the top node, then fall back to the nodes themselves.
  std::vector<RadialField> starts;
  {
    RadialField best = point(k);
    double bestJ = rep.path_values[k];
    for (size_t j : {k - 1, k + 1}) {
      if (j >= P) continue;  // also catches k - 1 wrapping at k = 0
      const RadialField a = point(k), b = point(j);
      for (int i = 1; i < 16; ++i) {
        const double w = i / 16.0;
        RadialField v(a.grid, (1.0 - w) * a.u + w * b.u);
        v = normalize_mass(v, prm.c);
        const double Jv = J_mu(breakdown(v, prm.p), prm.mu, prm.p);
        if (Jv > bestJ) {
          bestJ = Jv;
          best = std::move(v);
        }
      }
    }
    starts.push_back(std::move(best));
    starts.push_back(point(k));
    if (k > 0) starts.push_back(point(k - 1));
    if (k + 1 < P) starts.push_back(point(k + 1));
  }
  const double floor_J = std::max(rep.J_u0, rep.J_u1);
  std::optional<SolveReport> first;
  std::optional<Error> err;
  for (const auto& s : starts) {
    try {
      SolveReport r = refine_peak(s, prm, cfg, floor_J);
      if (r.classification == Classification::MountainPass) {
        first = std::move(r);
        break;
      }
      if (!first) first = std::move(r);
    } catch (const Error& e) {
      if (!err) err = e;
    }
  }
  if (!first) throw *err;
  rep.peak = std::move(*first);
  const bool interior = k > 0 && k + 1 < P;
  rep.saddle_check = interior && rep.peak.classification == Classification::MountainPass;
  rep.path = std::move(path);
  return rep;
}

MPReport mountain_pass(const Params& prm, double k0, const RadialField& u1, double ring_floor,
                       const MPassConfig& cfg) {
  Endpoints ep = endpoints(prm, k0, u1, ring_floor);
  Path path = init_path(ep.u0, ep.u1, cfg.points);
  return deform(std::move(path), prm, cfg);
}

}  // namespace qlnorm
