#include "qlnorm/flow.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <sstream>

#include "qlnorm/diagnostics.hpp"
#include "qlnorm/error.hpp"
#include "qlnorm/linalg.hpp"

namespace qlnorm {

namespace {

constexpr double kDivergence = -1e12;

struct Eval {
  EnergyBreakdown b;
  double J = 0.0;
  double lambda = 0.0;
  Vec G;  // dJ/du
  Vec F;  // G - lambda * w .* u
  double res = 0.0;
};

Eval evaluate(const RadialField& u, const Params& prm) {
  Eval e;
  e.b = breakdown(u, prm.p);
  e.J = J_mu(e.b, prm.mu, prm.p);
  e.lambda = multiplier(e.b, prm.mu);
  e.G = energy_gradient(u, EnergyWeights::J(prm.mu, prm.p), prm.p);
  const auto& w = u.grid->w;
  e.F = e.G - e.lambda * (w.array() * u.u.array()).matrix();
  e.F[u.grid->n] = 0.0;
  e.res = std::sqrt((e.F.array().square() / w.array()).sum() / e.b.mass);
  return e;
}

// Convex part of the Hessian plus a mass shift; symmetric positive definite.
Tridiag preconditioner(const RadialField& f, double mu, double sigma) {
  const auto& g = *f.grid;
  const int m = g.n;
  Tridiag P{Vec::Zero(m - 1), Vec::Zero(m), Vec::Zero(m - 1)};
  const double h2 = g.h * g.h;
  for (int k = 0; k < g.n; ++k) {
    const double d = (f.u[k + 1] - f.u[k]) / g.h;
    const double s = 0.5 * (f.u[k] * f.u[k] + f.u[k + 1] * f.u[k + 1]);
    const double coef = g.face_w[k] * (1.0 + 2.0 * s + 3.0 * mu * d * d) / h2;
    P.diag[k] += coef;
    if (k + 1 < m) {
      P.diag[k + 1] += coef;
      P.lower[k] -= coef;
      P.upper[k] -= coef;
    }
  }
  for (int i = 0; i < m; ++i) P.diag[i] += sigma * g.w[i];
  return P;
}

Vec head(const Vec& v, int m) { return v.head(m); }

RadialField add_step(const RadialField& u, const Vec& d, double tau, double c) {
  return step_on_sphere(u, d, tau, c);
}

// Bordered Newton direction for (u, lambda) on the mass sphere.
std::optional<Vec> newton_direction(const RadialField& u, const Eval& e, const Params& prm) {
  const int m = u.grid->n;
  auto weights = EnergyWeights::J(prm.mu, prm.p);
  weights.am = -0.5 * e.lambda;
  Tridiag A = energy_hessian(u, weights, prm.p);
  const Vec Mu = (u.grid->w.array() * u.u.array()).matrix().head(m);
  Eigen::MatrixXd B(m, 2);
  B.col(0) = -head(e.F, m);
  B.col(1) = Mu;
  if (!solve_tridiagonal(A, B)) return std::nullopt;
  const double denom = Mu.dot(B.col(1));
  if (!std::isfinite(denom) || denom == 0.0) return std::nullopt;
  const double dl = (0.5 * (prm.c - e.b.mass) - Mu.dot(B.col(0))) / denom;
  Vec d = B.col(0) + dl * B.col(1);
  if (!d.allFinite()) return std::nullopt;
  return d;
}

// Preconditioned tangent descent direction and the slope <G, d>.
std::pair<Vec, double> descent_direction(const RadialField& u, const Eval& e, const Params& prm) {
  Vec d = preconditioned_direction(u, e.G, prm.mu, std::abs(e.lambda) + 1e-3);
  const double slope = e.G.head(d.size()).dot(d);
  return {std::move(d), slope};
}

struct DescentOptions {
  std::optional<double> barrier_k0;
};

SolveReport descend_impl(const RadialField& u0, const Params& prm, const FlowConfig& cfg,
                         const DescentOptions& opt) {
  cfg.validate();
  prm.validate();
  RadialField u = normalize_mass(u0, prm.c);
  Eval e = evaluate(u, prm);
  double tau = cfg.tau;
  double newton_switch = cfg.newton_switch;
  int newton_cooldown = 0;
  int traps = 0;
  int it = 0;
  bool converged = false;
  std::string note;
  auto blocked = [&](const RadialField& v) {
    return opt.barrier_k0 && barrier_value(v) <= *opt.barrier_k0;
  };
  for (; it < cfg.max_iters; ++it) {
    if (e.res < cfg.grad_tol) {
      converged = true;
      break;
    }
    if (cfg.stop_below && e.J < *cfg.stop_below) {
      note = "stopped below threshold";
      break;
    }
    if (e.J < kDivergence || !std::isfinite(e.J))
      throw Error(ErrorKind::Divergence, "energy unbounded below along the flow");

    if (cfg.use_newton && newton_cooldown == 0 && e.res < newton_switch) {
      if (auto d = newton_direction(u, e, prm)) {
        RadialField v = add_step(u, *d, 1.0, prm.c);
        if (!blocked(v)) {
          Eval ev = evaluate(v, prm);
          const double slack = 1e-12 * (std::abs(e.J) + e.b.grad2 + e.b.quasi);
          if (ev.J <= e.J + slack && ev.res < e.res) {
            u = std::move(v);
            e = std::move(ev);
            continue;
          }
        }
      }
      newton_cooldown = 50;
      newton_switch *= 0.1;
    }
    if (newton_cooldown > 0) --newton_cooldown;

    auto [d, slope] = descent_direction(u, e, prm);
    bool accepted = false;
    bool hit_barrier = false;
    double t = tau;
    for (int bt = 0; bt < 60; ++bt, t *= cfg.backtrack) {
      RadialField v = add_step(u, d, t, prm.c);
      if (blocked(v)) {
        hit_barrier = true;
        continue;
      }
      Eval ev = evaluate(v, prm);
      if (std::isfinite(ev.J) && ev.J <= e.J + 1e-4 * t * slope) {
        u = std::move(v);
        e = std::move(ev);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (hit_barrier && ++traps > cfg.restarts)
        throw Error(ErrorKind::BoundaryTrap, "descent pinned to the barrier boundary");
      // Line search exhausted at rounding level: let Newton have a final try.
      if (cfg.use_newton && newton_cooldown > 0) {
        newton_cooldown = 0;
        newton_switch = std::max(newton_switch, 10.0 * e.res);
        continue;
      }
      note = "line search stalled";
      break;
    }
    tau = std::min(4.0 * cfg.tau, t * 2.0);
  }
  SolveReport rep = make_report(u, prm, it, converged, Classification::Failed, cfg.grad_tol);
  rep.note = note;
  return rep;
}

double closed_form_barrier(const EnergyBreakdown& b, int N, double t) {
  return t * t * b.grad2 + std::pow(t, N + 2.0) * b.quasi;
}

// t with closed-form barrier equal to k (barrier is increasing in t).
double dilation_for_barrier(const EnergyBreakdown& b, int N, double k) {
  auto f = [&](double s) { return std::log(closed_form_barrier(b, N, std::exp(s))) - std::log(k); };
  double lo = -1.0, hi = 1.0;
  while (f(lo) > 0.0) lo *= 2.0;
  while (f(hi) < 0.0) hi *= 2.0;
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50),
                                             iters);
  return std::exp(0.5 * (r.first + r.second));
}

EnergyBreakdown scaled(const EnergyBreakdown& b, double p, int N, double t) {
  EnergyBreakdown o = b;
  o.grad2 = t * t * b.grad2;
  o.grad4 = std::pow(t, N + 4.0) * b.grad4;
  o.quasi = std::pow(t, N + 2.0) * b.quasi;
  o.pot = std::pow(t, N * (p - 1.0) / 2.0) * b.pot;
  return o;
}

}  // namespace

void FlowConfig::validate() const {
  if (!(tau > 0.0) || !(grad_tol > 0.0) || !(q_tol > 0.0) || max_iters < 0 ||
      !(backtrack > 0.0 && backtrack < 1.0))
    throw Error(ErrorKind::InvalidConfig, "flow configuration out of range");
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::GlobalMin: return "global-min";
    case Classification::LocalMin: return "local-min";
    case Classification::MountainPass: return "mountain-pass";
    case Classification::Failed: return "failed";
  }
  return "failed";
}

Classification classification_from_string(const std::string& s) {
  if (s == "global-min") return Classification::GlobalMin;
  if (s == "local-min") return Classification::LocalMin;
  if (s == "mountain-pass") return Classification::MountainPass;
  if (s == "failed") return Classification::Failed;
  throw Error(ErrorKind::InvalidConfig, "unknown solution kind: " + s);
}

SolveReport make_report(const RadialField& u, const Params& prm, int iters, bool converged,
                        Classification cls, double grad_tol) {
  (void)grad_tol;
  SolveReport r;
  r.field = u;
  const auto b = breakdown(u, prm.p);
  r.lambda = multiplier(b, prm.mu);
  r.J_value = J_mu(b, prm.mu, prm.p);
  r.Q_value = Q_mu(b, prm.mu, prm.p, u.N());
  r.pohozaev_residual =
      perturbed_pohozaev_residual(b, r.lambda, prm.mu, prm.p, u.N()).rel_residual;
  r.grad_residual = gradient_residual(u, prm.mu, prm.p);
  r.iters = iters;
  r.converged = converged;
  r.classification = cls;
  r.mu = prm.mu;
  r.c = prm.c;
  return r;
}

RadialField project_gradient(const RadialField& u, double mu, double p) {
  return euler_lagrange(u, multiplier(u, mu, p), mu, p);
}

Vec preconditioned_direction(const RadialField& u, const Vec& G, double mu, double sigma) {
  const int m = u.grid->n;
  Tridiag P = preconditioner(u, mu, sigma);
  const Vec Mu = (u.grid->w.array() * u.u.array()).matrix().head(m);
  Eigen::MatrixXd B(m, 2);
  B.col(0) = G.head(m);
  B.col(1) = Mu;
  if (!solve_tridiagonal(P, B)) throw Error(ErrorKind::Divergence, "preconditioner is singular");
  const double alpha = B.col(0).dot(Mu) / B.col(1).dot(Mu);
  return -B.col(0) + alpha * B.col(1);
}

RadialField step_on_sphere(const RadialField& u, const Vec& d, double tau, double c) {
  Vec v = u.u;
  v.head(d.size()) += tau * d;
  v[u.grid->n] = 0.0;
  return normalize_mass(RadialField(u.grid, std::move(v)), c);
}

double gradient_residual(const RadialField& u, double mu, double p) {
  return l2_norm(project_gradient(u, mu, p)) / l2_norm(u);
}

SolveReport descend(const RadialField& u0, const Params& prm, const FlowConfig& cfg) {
  return descend_impl(u0, prm, cfg, {});
}

SolveReport newton_refine(const RadialField& u0, const Params& prm, const NewtonOptions& opt) {
  prm.validate();
  RadialField u = normalize_mass(u0, prm.c);
  Eval e = evaluate(u, prm);
  int it = 0;
  bool converged = e.res < opt.tol;
  for (; it < opt.max_iters && !converged; ++it) {
    auto d = newton_direction(u, e, prm);
    if (!d) break;
    bool accepted = false;
    for (double a = 1.0; a > 1e-4; a *= 0.5) {
      RadialField v = add_step(u, *d, a, prm.c);
      if (opt.barrier_k0 && barrier_value(v) <= *opt.barrier_k0) continue;
      Eval ev = evaluate(v, prm);
      if (!std::isfinite(ev.res)) continue;
      if (opt.require_descent && ev.J > e.J + 1e-12 * (std::abs(e.J) + e.b.grad2)) continue;
      if (ev.res < (1.0 - 1e-4 * a) * e.res) {
        u = std::move(v);
        e = std::move(ev);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    converged = e.res < opt.tol;
  }
  return make_report(u, prm, it, converged, Classification::Failed, opt.tol);
}

double zero_Q_factor(const EnergyBreakdown& b, double mu, double p, int N) {
  const double scale = b.grad2 + b.quasi + mu * b.grad4;
  if (!(scale > 0.0)) throw Error(ErrorKind::NoRoot, "zero-energy field has no Q root");
  const double q1 = dilation_profile(b, mu, p, N, 1.0).Q;
  if (std::abs(q1) <= 1e-15 * scale) return 1.0;
  auto Q = [&](double s) { return dilation_profile(b, mu, p, N, std::exp(s)).Q; };
  const double dir = q1 < 0.0 ? 1.0 : -1.0;
  const double ds = std::log(1.02);
  const double s_end = std::log(1e6);
  double prev = 0.0;
  for (double s = ds; s <= s_end + 1e-12; s += ds) {
    const double q = Q(dir * s);
    if ((q > 0.0) == (q1 < 0.0)) {
      double a = dir * prev, c = dir * s;
      if (a > c) std::swap(a, c);
      std::uintmax_t iters = 200;
      auto r = boost::math::tools::toms748_solve(Q, a, c, boost::math::tools::eps_tolerance<double>(52),
                                                 iters);
      return std::exp(0.5 * (r.first + r.second));
    }
    prev = s;
  }
  throw Error(ErrorKind::NoRoot, "Q has no sign change on the dilation range");
}

RadialField scale_to_zero_Q(const RadialField& u, double mu, double p) {
  RadialField v = u;
  for (int k = 0; k < 8; ++k) {
    const double t = zero_Q_factor(breakdown(v, p), mu, p, v.N());
    if (std::abs(t - 1.0) < 1e-13) break;
    v = dilate(v, t);
  }
  return v;
}

double best_dilation(const EnergyBreakdown& b, double mu, double p, int N) {
  const int K = 601;
  std::vector<double> ts(K), js(K);
  for (int k = 0; k < K; ++k) {
    ts[k] = std::pow(10.0, -3.0 + 6.0 * k / (K - 1));
    js[k] = dilation_profile(b, mu, p, N, ts[k]).J;
  }
  double best_t = 1.0, best_j = std::numeric_limits<double>::infinity();
  for (int k = 1; k + 1 < K; ++k) {
    if (js[k] <= js[k - 1] && js[k] <= js[k + 1] && js[k] < best_j) {
      best_j = js[k];
      best_t = ts[k];
    }
  }
  if (!std::isfinite(best_j)) return 1.0;
  // Polish on the Q root bracketing the discrete minimum.
  try {
    auto Q = [&](double s) { return dilation_profile(b, mu, p, N, std::exp(s)).Q; };
    const double s0 = std::log(best_t), ds = std::log(ts[1] / ts[0]);
    if (Q(s0 - ds) < 0.0 && Q(s0 + ds) > 0.0) {
      std::uintmax_t iters = 200;
      auto r = boost::math::tools::toms748_solve(Q, s0 - ds, s0 + ds,
                                                 boost::math::tools::eps_tolerance<double>(52), iters);
      return std::exp(0.5 * (r.first + r.second));
    }
  } catch (const std::exception&) {
  }
  return best_t;
}

std::vector<RadialField> probe_family(GridPtr grid, int count, std::uint64_t seed) {
  std::vector<RadialField> out;
  auto push = [&](auto fn) {
    RadialField f = RadialField::sample(grid, fn);
    if (mass(f) > 0.0) out.push_back(normalize_mass(f, 1.0));
  };
  push([](double r) { return std::exp(-r * r); });
  push([](double r) { return 1.0 / std::cosh(r); });
  push([](double r) { return 1.0 / (std::cosh(r) * std::cosh(r)); });
  push([](double r) { return std::exp(-r * r * r * r); });
  push([](double r) { return 1.0 / ((1.0 + r * r) * (1.0 + r * r)); });
  push([](double r) { return r * r * std::exp(-r * r); });
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  while (static_cast<int>(out.size()) < count) {
    const int bumps = 1 + static_cast<int>(U(rng) * 3.0);
    double amp[3], ctr[3], wid[3];
    for (int k = 0; k < bumps; ++k) {
      amp[k] = 0.2 + 0.8 * U(rng);
      ctr[k] = 2.0 * U(rng);
      wid[k] = 0.3 + 1.7 * U(rng);
    }
    const double mod = 2.0 * U(rng);
    push([&](double r) {
      double s = 0.0;
      for (int k = 0; k < bumps; ++k) {
        const double z = (r - ctr[k]) / wid[k];
        s += amp[k] * std::exp(-z * z);
      }
      return s * (1.0 + mod * r * r / (1.0 + r * r));
    });
  }
  out.resize(count);
  return out;
}

std::vector<RingSample> ring_samples(const std::vector<RadialField>& probes, const Params& prm,
                                     double lo, double hi, int per_probe) {
  std::vector<RingSample> out;
  for (const auto& pr : probes) {
    const int N = pr.N();
    const auto b = breakdown(normalize_mass(pr, prm.c), prm.p);
    for (int j = 0; j < per_probe; ++j) {
      const double k = per_probe == 1 ? lo : lo * std::pow(hi / lo, double(j) / (per_probe - 1));
      const double t = dilation_for_barrier(b, N, k);
      const auto d = dilation_profile(b, prm.mu, prm.p, N, t);
      out.push_back({barrier_value(scaled(b, prm.p, N, t)), d.J, d.Q});
    }
  }
  return out;
}

double calibrate_k0(const Params& prm, GridPtr grid, int probes, std::uint64_t seed) {
  prm.validate();
  const Regime reg = classify(prm.N, prm.p);
  if (!(reg == Regime::Intermediate || reg == Regime::Critical || reg == Regime::Supercritical))
    throw Error(ErrorKind::InvalidConfig, "barrier calibration needs p > 1 + 4/N");
  const auto family = probe_family(grid, probes, seed);
  auto admissible = [&](double k) {
    for (const auto& s : ring_samples(family, prm, 0.9 * k, 1.1 * k, 5))
      if (!(s.J >= k / 4.0) || !(s.Q >= k / 4.0)) return false;
    return true;
  };
  double k = 1e-12;
  if (!admissible(k)) throw Error(ErrorKind::Calibration, "no admissible barrier level");
  const double ratio = std::sqrt(2.0);
  while (k < 1e12 && admissible(k * ratio)) k *= ratio;
  return 0.5 * k;
}

RadialField default_guess(const Params& prm, GridPtr grid) {
  RadialField g = RadialField::sample(grid, [](double r) { return std::exp(-0.5 * r * r); });
  g = normalize_mass(g, prm.c);
  const double t = best_dilation(breakdown(g, prm.p), prm.mu, prm.p, grid->N);
  return dilate(g, t);
}

double negative_threshold(const FlowConfig& cfg) { return -10.0 * cfg.grad_tol; }

SolveReport global_minimize(const Params& prm, GridPtr grid, const FlowConfig& cfg,
                            const std::optional<RadialField>& init) {
  RadialField u0 = init ? normalize_mass(*init, prm.c) : default_guess(prm, grid);
  if (init) {
    const double t = best_dilation(breakdown(u0, prm.p), prm.mu, prm.p, grid->N);
    if (std::abs(std::log(t)) > 1e-3) u0 = dilate(u0, t);
  }
  SolveReport r = descend(u0, prm, cfg);
  if (r.J_value < negative_threshold(cfg))
    r.classification = r.converged ? Classification::GlobalMin : Classification::Failed;
  else if (r.note.empty())
    r.note = "no negative-energy minimizer";
  return r;
}

SolveReport minimize_local(const Params& prm, double k0, const FlowConfig& cfg,
                           const RadialField& init) {
  RadialField u = normalize_mass(init, prm.c);
  try {
    u = scale_to_zero_Q(u, prm.mu, prm.p);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoRoot) throw;
  }
  if (barrier_value(u) <= k0)
    throw Error(ErrorKind::Geometry, "local-minimum start lies inside the barrier");
  SolveReport r = descend_impl(u, prm, cfg, DescentOptions{k0});
  if (r.converged && barrier_value(r.field) > k0) r.classification = Classification::LocalMin;
  return r;
}

CpnEstimate estimate_cpn(double p, int N, double c_lo, double c_hi, GridPtr grid,
                         const FlowConfig& cfg, double rel_width) {
  if (classify(N, p) != Regime::Intermediate)
    throw Error(ErrorKind::InvalidConfig, "threshold mass is defined for 1+4/N < p < 3+4/N");
  if (!(0.0 < c_lo && c_lo < c_hi)) throw Error(ErrorKind::InvalidConfig, "bad mass bracket");
  FlowConfig probe = cfg;
  probe.stop_below = negative_threshold(cfg);
  CpnEstimate est;
  auto negative = [&](double c, const std::optional<RadialField>& init) {
    ++est.evaluations;
    SolveReport r = global_minimize(Params{N, p, c, 0.0}, grid, probe, init);
    return std::make_pair(r.J_value < negative_threshold(cfg), r.field);
  };
  auto hi = negative(c_hi, std::nullopt);
  if (!hi.first) throw Error(ErrorKind::Bracket, "m(c) is not negative at the upper mass");
  std::optional<RadialField> warm = hi.second;
  if (negative(c_lo, warm).first) throw Error(ErrorKind::Bracket, "m(c) is negative at the lower mass");
  double lo = c_lo, up = c_hi;
  while ((up - lo) / (0.5 * (up + lo)) > rel_width) {
    const double mid = std::sqrt(lo * up);
    auto r = negative(mid, warm);
    if (r.first) {
      up = mid;
      warm = r.second;
    } else {
      lo = mid;
    }
  }
  est.lo = lo;
  est.hi = up;
  est.c = 0.5 * (lo + up);
  // Converged minimizer at the upper end, usable as the c(p,N) profile.
  SolveReport top = global_minimize(Params{N, p, up, 0.0}, grid, cfg, warm);
  est.minimizer = top.field;
  return est;
}

double estimate_cN(int N, GridPtr grid, double c_lo, double c_hi, int probes) {
  const double p = upper_exponent(N);
  const auto family = probe_family(grid, probes, 7);
  // At p = 3 + 4/N, quasi and pot share the dilation exponent N + 2, so the
  // fiber is unbounded below exactly when quasi < pot/(p+1).
  auto reaches = [&](double c) {
    for (const auto& f : family) {
      const auto b = breakdown(normalize_mass(f, c), p);
      if (b.quasi - b.pot / (p + 1.0) <= 0.0) return true;
    }
    return false;
  };
  if (reaches(c_lo) || !reaches(c_hi)) throw Error(ErrorKind::Bracket, "c_N is not bracketed");
  double lo = c_lo, hi = c_hi;
  while ((hi - lo) / hi > 1e-3) {
    const double mid = std::sqrt(lo * hi);
    (reaches(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::Converged: return "converged";
    case RowStatus::NotConverged: return "not-converged";
    case RowStatus::Unbounded: return "unbounded";
    case RowStatus::Failed: return "failed";
  }
  return "failed";
}

std::string MassScan::csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "c,m,lambda,status\n";
  for (const auto& r : rows) os << r.c << ',' << r.m << ',' << r.lambda << ',' << to_string(r.status) << '\n';
  return os.str();
}

bool dilation_ladder_unbounded(const RadialField& u, double mu, double p, double floor) {
  const auto b = breakdown(u, p);
  for (int k = 0; k <= 60; ++k)
    if (dilation_profile(b, mu, p, u.N(), std::ldexp(1.0, k)).J < floor) return true;
  return false;
}

MassScan mass_scan(double p, int N, const std::vector<double>& c_list, GridPtr grid,
                   const FlowConfig& cfg, int jobs) {
  for (size_t i = 1; i < c_list.size(); ++i)
    if (!(c_list[i] > c_list[i - 1])) throw Error(ErrorKind::InvalidConfig, "mass list must increase");
  MassScan scan;
  scan.N = N;
  scan.p = p;
  const bool super = classify(N, p) == Regime::Supercritical;
  auto row = [&](double c) -> MassScanRow {
    const Params prm{N, p, c, 0.0};
    try {
      if (super) {
        RadialField g = normalize_mass(
            RadialField::sample(grid, [](double r) { return std::exp(-0.5 * r * r); }), c);
        if (dilation_ladder_unbounded(g, 0.0, p))
          return {c, -std::numeric_limits<double>::infinity(), std::nan(""), RowStatus::Unbounded};
        return {c, std::nan(""), std::nan(""), RowStatus::Failed};
      }
      SolveReport r = global_minimize(prm, grid, cfg);
      const bool neg = r.J_value < negative_threshold(cfg);
      return {c, neg ? r.J_value : 0.0, r.lambda,
              r.converged ? RowStatus::Converged : RowStatus::NotConverged};
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Divergence)
        return {c, -std::numeric_limits<double>::infinity(), std::nan(""), RowStatus::Unbounded};
      return {c, std::nan(""), std::nan(""), RowStatus::Failed};
    }
  };
  jobs = std::max(1, jobs);
  scan.rows.resize(c_list.size());
  for (size_t start = 0; start < c_list.size(); start += jobs) {
    std::vector<std::future<MassScanRow>> fut;
    for (size_t i = start; i < std::min(c_list.size(), start + jobs); ++i)
      fut.push_back(std::async(std::launch::async, row, c_list[i]));
    for (size_t i = 0; i < fut.size(); ++i) scan.rows[start + i] = fut[i].get();
  }
  return scan;
}

}  // namespace qlnorm
