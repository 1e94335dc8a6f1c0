#include "qlnorm/shoot.hpp"

#include <array>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "qlnorm/error.hpp"

namespace qlnorm {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 2>;

constexpr double kBlowUp = 1e100;

// Whether a finished shot belongs to the "crossing" side of the dichotomy.
// Shots that reach the end are continued analytically through the linear
// far field: for lambda = 0 the constant mode decides, for lambda < 0 the
// growing exponential does.
bool crosses(const ShotResult& s, double lambda, int N) {
  switch (s.outcome) {
    case ShotOutcome::Crossed: return true;
    case ShotOutcome::Turned: return false;
    case ShotOutcome::Diverged: return true;
    case ShotOutcome::Reached: break;
  }
  int last = 0;
  for (int i = 0; i <= s.grid->n; ++i)
    if (s.grid->r[i] <= s.r_stop) last = i;
  const double r = s.grid->r[last];
  const double v = s.v[last];
  const double dv = s.dv[last];
  if (lambda < 0.0) return dv + std::sqrt(-lambda) * v < 0.0;
  if (N >= 3) return v + r * dv / (N - 2.0) < 0.0;
  return false;
}

}  // namespace

void ShootConfig::validate() const {
  if (!(v0_lo > 0.0) || !(v0_lo < v0_hi))
    throw Error(ErrorKind::InvalidConfig, "shooting bracket needs 0 < low < high");
  if (!(step > 0.0) || !(r_max > step))
    throw Error(ErrorKind::InvalidConfig, "shooting needs step > 0 and r_max > step");
  if (!(zero_tolerance > 0.0) || !(rtol > 0.0))
    throw Error(ErrorKind::InvalidConfig, "shooting tolerances must be positive");
}

const char* to_string(ShotOutcome o) {
  switch (o) {
    case ShotOutcome::Crossed: return "crossed";
    case ShotOutcome::Turned: return "turned";
    case ShotOutcome::Reached: return "reached";
    case ShotOutcome::Diverged: return "diverged";
  }
  return "unknown";
}

RadialField ShotResult::field() const {
  Vec u = v;
  u[grid->n] = 0.0;
  return RadialField(grid, std::move(u));
}

double rhs_primitive(const DualTransform& t, double v, double lambda, double p) {
  const double fv = std::abs(t.f(v));
  return std::pow(fv, p + 1.0) / (p + 1.0) + 0.5 * lambda * fv * fv;
}

ShotResult integrate_radial(const ShootConfig& cfg, double v0, const DualTransform& t, double p,
                            int N) {
  cfg.validate();
  if (!(v0 > 0.0)) throw Error(ErrorKind::InvalidConfig, "initial amplitude must be positive");
  const int n = static_cast<int>(std::lround(cfg.r_max / cfg.step));
  ShotResult res;
  res.v0 = v0;
  res.grid = build_grid(N, cfg.r_max, std::max(n, 16));
  const auto& g = *res.grid;
  res.v = Vec::Zero(g.size());
  res.dv = Vec::Zero(g.size());

  const double lambda = cfg.lambda;
  auto sys = [&](const State& y, State& dy, double r) {
    dy[0] = y[1];
    dy[1] = -(N - 1.0) / r * y[1] - semilinear_rhs(t, y[0], lambda, p);
  };

  // Regular expansion at the origin.
  const double rhs0 = semilinear_rhs(t, v0, lambda, p);
  const double r0 = std::min(1e-6, 0.5 * g.h);
  State y{v0 - rhs0 * r0 * r0 / (2.0 * N), -rhs0 * r0 / N};
  res.v[0] = v0;
  res.dv[0] = 0.0;

  // Classification shots for lambda < 0 are continued until the dichotomy shows.
  const double r_end = cfg.r_max;
  auto stepper = odeint::make_dense_output(cfg.rtol * 1e-4 * v0, cfg.rtol,
                                           odeint::runge_kutta_dopri5<State>());
  stepper.initialize(y, r0, std::min(1e-3, g.h));
  int next = 1;
  res.outcome = ShotOutcome::Reached;
  res.r_stop = r_end;
  State s;
  while (true) {
    const double r_prev = stepper.current_time();
    if (r_prev >= r_end) break;
    stepper.do_step(sys);
    const double r_now = stepper.current_time();
    while (next <= g.n && g.r[next] <= r_now) {
      stepper.calc_state(g.r[next], s);
      res.v[next] = s[0];
      res.dv[next] = s[1];
      ++next;
    }
    const State& cur = stepper.current_state();
    if (!std::isfinite(cur[0]) || std::abs(cur[0]) > kBlowUp * v0) {
      res.outcome = ShotOutcome::Diverged;
      res.r_stop = r_now;
      break;
    }
    if (cur[0] < 0.0) {
      res.outcome = ShotOutcome::Crossed;
      res.r_stop = r_now;
      break;
    }
    if (cur[1] > 0.0) {
      res.outcome = ShotOutcome::Turned;
      res.r_stop = r_now;
      break;
    }
  }
  // Discard samples past the event.
  for (int i = next; i <= g.n; ++i) {
    res.v[i] = 0.0;
    res.dv[i] = 0.0;
  }
  return res;
}

ShotResult find_ground(const ShootConfig& cfg, const DualTransform& t, double p, int N) {
  cfg.validate();
  if (cfg.lambda > 0.0)
    throw Error(ErrorKind::InvalidConfig, "ground-state shooting needs lambda <= 0");
  ShootConfig probe = cfg;
  if (cfg.lambda < 0.0) {
    // Long enough that every non-separatrix shot shows its side of the dichotomy.
    probe.r_max = std::max(cfg.r_max, 60.0 / std::sqrt(-cfg.lambda));
  }
  ShotResult lo = integrate_radial(probe, cfg.v0_lo, t, p, N);
  ShotResult hi = integrate_radial(probe, cfg.v0_hi, t, p, N);
  const bool lo_cross = crosses(lo, cfg.lambda, N);
  const bool hi_cross = crosses(hi, cfg.lambda, N);
  if (lo_cross == hi_cross)
    throw Error(ErrorKind::Bracket, "shooting bracket shows no dichotomy");

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo.v0 + hi.v0);
    if (hi.v0 - lo.v0 < 1e-14 * mid || mid <= lo.v0 || mid >= hi.v0) break;
    ShotResult m = integrate_radial(probe, mid, t, p, N);
    if (crosses(m, cfg.lambda, N) == lo_cross)
      lo = std::move(m);
    else
      hi = std::move(m);
  }
  const ShotResult& pos = lo_cross ? hi : lo;
  const ShotResult& neg = lo_cross ? lo : hi;

  // Resample onto the requested output grid.
  ShootConfig out_cfg = cfg;
  ShotResult res = integrate_radial(out_cfg, pos.v0, t, p, N);
  ShotResult other = integrate_radial(out_cfg, neg.v0, t, p, N);
  const auto& g = *res.grid;

  if (cfg.lambda < 0.0) {
    // Splice point: first node where the two bracketing shots separate or the
    // nonlinearity has become negligible against lambda.
    const double kappa = std::sqrt(-cfg.lambda);
    int splice = -1;
    for (int i = 1; i <= g.n; ++i) {
      const double v = res.v[i];
      const double sep = std::abs(res.v[i] - other.v[i]);
      const bool split = !(v > 0.0) || sep > 1e-8 * v || res.dv[i] > 0.0;
      const double fv = t.f(std::max(v, 0.0));
      const bool linear = std::pow(fv, p - 1.0) < 1e-10 * (-cfg.lambda);
      if (split || linear) {
        splice = split ? std::max(i - 1, 1) : i;
        break;
      }
    }
    if (splice > 0 && splice < g.n) {
      const double nu = 0.5 * (N - 2.0);
      auto mode = [&](double r) {
        return std::pow(r, -nu) * boost::math::cyl_bessel_k(nu, kappa * r);
      };
      auto dmode = [&](double r) {
        return -kappa * std::pow(r, -nu) * boost::math::cyl_bessel_k(nu + 1.0, kappa * r);
      };
      const double rs = g.r[splice];
      const double amp = res.v[splice] / mode(rs);
      res.tail_from = rs;
      for (int i = splice + 1; i <= g.n; ++i) {
        const double r = g.r[i];
        if (kappa * r > 700.0) {
          res.v[i] = 0.0;
          res.dv[i] = 0.0;
        } else {
          res.v[i] = amp * mode(r);
          res.dv[i] = amp * dmode(r);
        }
      }
      res.outcome = ShotOutcome::Reached;
      res.r_stop = cfg.r_max;
    }
  }

  for (int i = 0; i <= g.n; ++i) {
    if (!(res.v[i] >= 0.0)) throw Error(ErrorKind::Bracket, "ground profile lost positivity");
    if (i > 0 && res.v[i] > res.v[i - 1] * (1.0 + 1e-12) + 1e-300)
      throw Error(ErrorKind::Bracket, "ground profile is not monotone");
  }
  if (res.outcome != ShotOutcome::Reached)
    throw Error(ErrorKind::Bracket, "ground profile did not reach r_max");
  return res;
}

DecayReport decay_fit(const ShotResult& shot, const DualTransform& t, double p, int N,
                      std::pair<double, double> window) {
  if (N < 3) throw Error(ErrorKind::NotApplicable, "decay analysis needs N >= 3");
  const auto& g = *shot.grid;
  if (window.first <= 0.0 && window.second <= 0.0)
    window = {g.R_max / 10.0, g.R_max / 2.0};
  if (!(window.first > 0.0) || !(window.first < window.second) || window.second > g.R_max)
    throw Error(ErrorKind::Range, "decay window outside the grid");

  DecayReport rep;
  rep.window = window;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, csum = 0;
  int cnt = 0;
  for (int i = 1; i <= g.n; ++i) {
    const double r = g.r[i];
    if (r < window.first || r > window.second) continue;
    if (!(shot.v[i] > 0.0)) throw Error(ErrorKind::Range, "profile vanishes in the decay window");
    const double x = std::log(r), y = std::log(shot.v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    csum += shot.v[i] / kernel_K(r, N);
    ++cnt;
  }
  if (cnt < 2) throw Error(ErrorKind::Range, "decay window holds fewer than two nodes");
  rep.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  rep.C_fit = csum / cnt;

  // int |x|^{N-2} f(v)^{p+1} dx = |S| int r^{2N-3} f^{p+1} dr, by the trapezoid rule.
  double integral = 0.0;
  auto integrand = [&](int i) {
    const double r = g.r[i];
    return std::pow(r, 2.0 * N - 3.0) * std::pow(t.f(std::max(shot.v[i], 0.0)), p + 1.0);
  };
  double prev = integrand(0);
  for (int i = 1; i <= g.n; ++i) {
    const double cur = integrand(i);
    integral += 0.5 * (prev + cur) * (g.r[i] - g.r[i - 1]);
    prev = cur;
  }
  integral *= g.surface;
  rep.C_integral = std::sqrt(g.surface * 4.0 * (N - 1.0) / (p + 1.0) * integral);

  rep.r.resize(g.n);
  rep.a_r.resize(g.n);
  rep.b_r.resize(g.n);
  rep.A_r.resize(g.n);
  for (int i = 1; i <= g.n; ++i) {
    const double r = g.r[i];
    const double fv = std::pow(t.f(std::max(shot.v[i], 0.0)), p + 1.0);
    const double rN = std::pow(r, N);
    rep.r[i - 1] = r;
    rep.b_r[i - 1] = 2.0 * rN * fv / (p + 1.0);
    rep.a_r[i - 1] = rN * shot.dv[i] * shot.dv[i] + rep.b_r[i - 1];
  }
  double run = 0.0;
  for (int k = g.n - 1; k >= 0; --k) {
    run = std::max(run, rep.a_r[k]);
    rep.A_r[k] = run;
  }
  return rep;
}

std::vector<double> l2_increment_ratios(const RadialField& v, int N) {
  const auto& g = *v.grid;
  // Partial integrals of r^{N-1} v^2 at R/16, R/8, R/4, R/2, R (Dirichlet node excluded).
  const double R = g.r[g.n - 1];
  std::vector<double> marks = {R / 16, R / 8, R / 4, R / 2, R};
  std::vector<double> partial(marks.size(), 0.0);
  double acc = 0.0;
  size_t m = 0;
  for (int i = 1; i < g.n && m < marks.size(); ++i) {
    const double r0 = g.r[i - 1], r1 = g.r[i];
    acc += 0.5 * (std::pow(r0, N - 1.0) * v.u[i - 1] * v.u[i - 1] +
                  std::pow(r1, N - 1.0) * v.u[i] * v.u[i]) * (r1 - r0);
    while (m < marks.size() && r1 >= marks[m] - 1e-12) partial[m++] = acc;
  }
  std::vector<double> ratios;
  for (size_t k = 2; k < partial.size(); ++k) {
    const double d0 = partial[k - 1] - partial[k - 2];
    const double d1 = partial[k] - partial[k - 1];
    ratios.push_back(d0 > 0.0 ? d1 / d0 : 0.0);
  }
  return ratios;
}

bool l2_membership(const RadialField& v, int N) {
  for (double q : l2_increment_ratios(v, N))
    if (!(q < 0.75)) return false;
  return true;
}

}  // namespace qlnorm
