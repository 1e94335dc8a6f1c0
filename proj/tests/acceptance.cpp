// Acceptance run: one line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qlnorm/continuation.hpp"
#include "qlnorm/diagnostics.hpp"
#include "qlnorm/dual.hpp"
#include "qlnorm/error.hpp"
#include "qlnorm/flow.hpp"
#include "qlnorm/mpass.hpp"
#include "qlnorm/params.hpp"
#include "qlnorm/shoot.hpp"

using namespace qlnorm;

namespace {

// Tolerances.
constexpr double kGradGap = 1e-6;
constexpr double kProfileAtOne = 1e-12;
constexpr double kProfileSlope = 1e-8;
constexpr double kOrder = 1.8;
constexpr double kIdentity = 1e-3;
constexpr double kFloor = 1e-12;  // residual already at rounding level
constexpr double kCpnStability = 0.05;
constexpr double kQRatio = 1e-3;
constexpr double kSlope = 0.05;
constexpr double kGroundGap = 0.01;

double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

struct Check {
  bool ok = true;
  std::ostringstream msg;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      msg << " FAILED(" << what << ")";
    }
  }
};

// Every converged solution seen by the run, for the multiplier-sign sweep.
struct Seen {
  std::string label;
  SolveReport rep;
  double p;
  int N;
};
std::vector<Seen>& seen() {
  static std::vector<Seen> v;
  return v;
}
void record(const std::string& label, const SolveReport& r, double p, int N) {
  if (r.converged) seen().push_back({label, r, p, N});
}

RadialField smooth_field(GridPtr g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double a[3], c[3], s[3];
  for (int k = 0; k < 3; ++k) {
    a[k] = 0.3 + U(rng);
    c[k] = 0.3 * g->R_max * U(rng);
    s[k] = 0.05 * g->R_max + 0.1 * g->R_max * U(rng);
  }
  return RadialField::sample(g, [&](double r) {
    double v = 0.0;
    for (int k = 0; k < 3; ++k) v += a[k] * std::exp(-0.5 * std::pow((r - c[k]) / s[k], 2));
    return v;
  });
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

// Pass if every step halves at the given order or the residual sits at rounding level.
bool converges(const std::vector<double>& res, double* worst) {
  bool ok = true;
  *worst = INFINITY;
  for (size_t k = 1; k < res.size(); ++k) {
    if (res[k] < kFloor && res[k - 1] < kFloor) continue;
    const double o = order(res[k - 1], res[k]);
    *worst = std::min(*worst, o);
    ok = ok && o >= kOrder;
  }
  return ok;
}

// Shared solves.
GridPtr box() {
  static GridPtr g = build_grid(3, 150.0, 1000);
  return g;
}

double cpn() {
  static const double c = estimate_cpn(3.0, 3, 150.0, 400.0, box(), FlowConfig{}).c;
  return c;
}

struct TwoSolutions {
  double c_local = 0.0, factor = 0.0;
  double k0_below = 0.0, k0_above = 0.0;
  SolveReport local, global;
  MPReport mp_below, mp_above;
};

double ring_floor(const Params& prm, double k0) {
  double f = INFINITY;
  for (const auto& s : ring_samples(probe_family(box(), 100, 99), prm, k0, k0, 1)) f = std::min(f, s.J);
  return f;
}

const TwoSolutions& two() {
  static const TwoSolutions t = [] {
    TwoSolutions s;
    const Params hi{3, 3.0, 1.5 * cpn(), 0.0};
    s.global = global_minimize(hi, box(), FlowConfig{});
    s.k0_above = calibrate_k0(hi, box(), 60, 1);
    s.mp_above = mountain_pass(hi, s.k0_above, s.global.field, ring_floor(hi, s.k0_above), MPassConfig{});
    for (double f : {0.99, 0.97, 0.95, 0.93, 0.91, 0.90}) {
      const Params prm{3, 3.0, f * cpn(), 0.0};
      const double k0 = calibrate_k0(prm, box(), 60, 1);
      auto loc = minimize_local(prm, k0, FlowConfig{}, s.global.field);
      if (!loc.converged || loc.classification != Classification::LocalMin) continue;
      s.factor = f;
      s.c_local = prm.c;
      s.k0_below = k0;
      s.local = loc;
      s.mp_below = mountain_pass(prm, k0, loc.field, ring_floor(prm, k0), MPassConfig{});
      break;
    }
    return s;
  }();
  return t;
}

// Criteria.

void c1_gradient(Check& ck) {
  std::mt19937_64 rng(2024);
  const int Ns[] = {1, 2, 3};
  const double ps[] = {2.0, 3.0, 4.0};
  const double mus[] = {0.0, 0.1};
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int N = Ns[trial % 3];
    const double p = ps[(trial / 3) % 3];
    const double mu = mus[trial % 2];
    auto g = build_grid(N, 8.0, 400);
    const auto u = smooth_field(g, rng);
    const auto phi = smooth_field(g, rng);
    const double lam = -std::uniform_real_distribution<double>(0.1, 2.0)(rng);
    auto F = [&](double e) {
      RadialField v(g, u.u + e * phi.u);
      const auto b = breakdown(v, p);
      return J_mu(b, mu, p) - 0.5 * lam * b.mass;
    };
    const double eps = 1e-5;
    const double fd = (F(eps) - F(-eps)) / (2 * eps);
    const double an = l2_inner(euler_lagrange(u, lam, mu, p), phi);
    worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(fd), 1e-12));
  }
  ck.msg << "20 trials, worst relative gap " << worst;
  ck.require(worst < kGradGap, "gap");
}

void c2_scaling(Check& ck) {
  std::mt19937_64 rng(77);
  double at_one = 0.0, slope_gap = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    const int N = 1 + trial % 3;
    const double p = 2.0 + 0.5 * trial;
    const double mu = trial % 2 ? 0.1 : 0.0;
    const auto b = breakdown(smooth_field(build_grid(N, 8.0, 300), rng), p);
    const auto d = dilation_profile(b, mu, p, N, 1.0);
    at_one = std::max({at_one, rel(d.J, J_mu(b, mu, p)), rel(d.Q, Q_mu(b, mu, p, N))});
    for (double t = 0.1; t <= 10.0 + 1e-12; t *= std::pow(10.0, 0.1)) {
      const double h = 1e-3 * t;
      auto J = [&](double s) { return dilation_profile(b, mu, p, N, s).J; };
      const double dJ = (-J(t + 2 * h) + 8 * J(t + h) - 8 * J(t - h) + J(t - 2 * h)) / (12 * h);
      slope_gap = std::max(slope_gap, rel(dJ, dilation_profile(b, mu, p, N, t).Q / t));
    }
  }
  // Resampled fields against the closed-form scaling of each term.
  double worst_order = INFINITY;
  std::vector<double> errs;
  for (int n : {400, 800, 1600}) {
    auto g = build_grid(3, 12.0, n);
    const auto u = RadialField::sample(g, [](double r) { return std::exp(-0.5 * r * r / 2.25); });
    const auto b = breakdown(u, 3.0);
    double e = 0.0;
    for (double t : {0.6, 1.6}) {
      const auto bt = breakdown(dilate(u, t), 3.0);
      e = std::max({e, rel(bt.grad2, b.grad2 * t * t), rel(bt.grad4, b.grad4 * std::pow(t, 7)),
                    rel(bt.quasi, b.quasi * std::pow(t, 5)), rel(bt.pot, b.pot * std::pow(t, 3))});
    }
    errs.push_back(e);
  }
  const bool conv = converges(errs, &worst_order);
  ck.msg << "t=1 gap " << at_one << ", dJ/dt gap " << slope_gap << ", resampling errors " << errs[0]
         << " -> " << errs.back() << " (order " << worst_order << ")";
  ck.require(at_one < kProfileAtOne, "t=1");
  ck.require(slope_gap < kProfileSlope, "slope");
  ck.require(conv, "order");
}

void c3_identities(Check& ck) {
  const double c = 1.5 * cpn();
  struct Row {
    std::string name;
    std::vector<double> res;
  };
  std::vector<Row> rows;
  auto put = [&](const std::string& name, double v) {
    for (auto& r : rows)
      if (r.name == name) return r.res.push_back(v);
    rows.push_back({name, {v}});
  };
  for (int n : {1000, 2000, 4000}) {
    auto g = build_grid(3, 40.0, n);
    const auto r0 = global_minimize(Params{3, 3.0, c, 0.0}, g, FlowConfig{});
    ck.require(r0.converged, "mu=0 converged n=" + std::to_string(n));
    record("identity mu=0 n=" + std::to_string(n), r0, 3.0, 3);
    for (const auto& id : identity_suite(r0, 3.0, 3))
      if (!id.skipped && id.name.rfind("negative-multiplier", 0) != 0) put(id.name, id.rel_residual);
    const auto r1 = global_minimize(Params{3, 3.0, c, 0.01}, g, FlowConfig{});
    ck.require(r1.converged, "mu>0 converged n=" + std::to_string(n));
    record("identity mu=0.01 n=" + std::to_string(n), r1, 3.0, 3);
    for (const auto& id : identity_suite(r1, 3.0, 3))
      if (!id.skipped && id.name.rfind("negative-multiplier", 0) != 0)
        put(id.name + "[mu=0.01]", id.rel_residual);
  }
  ck.msg << "c=" << c << " R=40 n=1000/2000/4000;";
  for (const auto& r : rows) {
    double o;
    const bool conv = converges(r.res, &o);
    ck.msg << ' ' << r.name << '=' << r.res.back();
    if (std::isfinite(o)) ck.msg << "(order " << o << ")";
    else ck.msg << "(floor)";
    ck.require(r.res.back() < kIdentity, r.name);
    ck.require(conv, r.name + " order");
  }
}

void c4_regimes(Check& ck) {
  // (a) subcritical, one dimension.
  auto g1 = build_grid(1, 200.0, 4000);
  for (double c : {0.5, 1.0, 2.0}) {
    const auto r = global_minimize(Params{1, 2.0, c, 0.0}, g1, FlowConfig{});
    record("N=1 p=2 c=" + std::to_string(c), r, 2.0, 1);
    ck.msg << "(a) c=" << c << " m=" << r.J_value << ' ';
    ck.require(r.converged && r.J_value < 0.0, "(a) c=" + std::to_string(c));
  }
  // (b) threshold by bisection, refined grid.
  std::vector<double> est;
  double width = 0.0;
  for (int n : {400, 800, 1600}) {
    const auto e = estimate_cpn(3.0, 3, 150.0, 400.0, build_grid(3, 40.0, n), FlowConfig{});
    est.push_back(e.c);
    width = std::max(width, (e.hi - e.lo) / e.c);
  }
  const auto scan = mass_scan(3.0, 3, {0.5 * est.back(), 1.5 * est.back()}, build_grid(3, 40.0, 800), FlowConfig{});
  const bool sign_change = scan.rows[0].m >= 0.0 - 1e-9 && scan.rows[1].m < 0.0;
  double spread = 0.0;
  for (double e : est) spread = std::max(spread, rel(e, est.back()));
  ck.msg << "(b) c(p,N)=" << est[0] << '/' << est[1] << '/' << est[2] << " spread " << spread << " bracket " << width << ' ';
  ck.require(sign_change, "(b) sign change");
  ck.require(spread < kCpnStability, "(b) stability");
  // (c) above the upper exponent.
  auto g3 = build_grid(3, 40.0, 800);
  const auto gauss = normalize_mass(RadialField::sample(g3, [](double r) { return std::exp(-0.5 * r * r); }), 10.0);
  const bool ladder = dilation_ladder_unbounded(gauss, 0.0, 5.0, -1e6);
  const auto sc = mass_scan(5.0, 3, {1.0, 10.0, 100.0}, g3, FlowConfig{});
  bool all_unbounded = true;
  for (const auto& r : sc.rows) all_unbounded = all_unbounded && r.status == RowStatus::Unbounded;
  ck.msg << "(c) ladder below -1e6: " << (ladder ? "yes" : "no");
  ck.require(ladder && all_unbounded, "(c)");
}

void c5_two_solutions(Check& ck) {
  const auto& t = two();
  ck.require(t.factor > 0.0, "no local minimizer in 0.90..0.99 c(p,N)");
  if (t.factor == 0.0) return;
  record("local-min", t.local, 3.0, 3);
  record("global-min 1.5c", t.global, 3.0, 3);
  record("mountain-pass below", t.mp_below.peak, 3.0, 3);
  record("mountain-pass above", t.mp_above.peak, 3.0, 3);
  const auto qratio = [](const SolveReport& r) {
    const auto b = breakdown(r.field, 3.0);
    return std::abs(r.Q_value) / barrier_value(b);
  };
  const auto& lo = t.local;
  const auto& mb = t.mp_below.peak;
  ck.msg << "c=" << t.factor << "c(p,N): local J=" << lo.J_value << " beta=" << lo.lambda << ", MP J=" << mb.J_value
         << " lambda=" << mb.lambda << " |Q|/(g2+q)=" << qratio(mb);
  ck.require(lo.J_value > 0.0 && lo.lambda < 0.0, "local");
  ck.require(mb.converged && mb.J_value > lo.J_value && mb.lambda < 0.0, "MP below");
  ck.require(qratio(mb) < kQRatio, "MP below Q");
  const auto& ma = t.mp_above.peak;
  ck.msg << "; 1.5c(p,N): global J=" << t.global.J_value << ", MP J=" << ma.J_value << " |Q|/(g2+q)=" << qratio(ma);
  ck.require(t.global.J_value < 0.0 && ma.converged && ma.J_value > 0.0, "1.5c");
  ck.require(qratio(ma) < kQRatio, "MP above Q");
}

std::vector<ContinuationTrace>& traces() {
  static std::vector<ContinuationTrace> v;
  return v;
}

void c6_continuation(Check& ck) {
  const auto& t = two();
  const auto sched = mu_schedule(0.1, 0.1, 1e-6);
  std::vector<std::pair<Classification, double>> runs = {{Classification::GlobalMin, 1.5 * cpn()},
                                                         {Classification::MountainPass, 1.5 * cpn()}};
  if (t.factor > 0.0) {
    runs.push_back({Classification::LocalMin, t.c_local});
    runs.push_back({Classification::MountainPass, t.c_local});
  }
  for (const auto& [kind, c] : runs) {
    const Params prm{3, 3.0, c, 0.0};
    auto tr = continue_solve(kind, prm, box(), sched, ContinuationConfig{});
    const std::string tag = std::string(to_string(kind)) + "@" + std::to_string(c / cpn()).substr(0, 4);
    ck.msg << tag << ": ";
    if (tr.truncated || tr.rows.size() != sched.size() || !tr.final_field) {
      ck.require(false, tag + " truncated " + tr.note);
      continue;
    }
    const auto& r = tr.rows;
    const double drop = r.front().mu_grad4 / r.back().mu_grad4;
    const size_t n = r.size();
    const double d1 = std::abs(r[n - 3].lambda - r[n - 4].lambda);
    const double d2 = std::abs(r[n - 2].lambda - r[n - 3].lambda);
    const double d3 = std::abs(r[n - 1].lambda - r[n - 2].lambda);
    const auto lim = classify_limit(tr);
    record(tag + " limit", lim, 3.0, 3);
    const double poh = pohozaev_residual(lim.field, lim.lambda, 3.0, 3).rel_residual;
    ck.msg << "drop " << drop << ", dlambda " << d1 << ' ' << d2 << ' ' << d3 << ", poh " << poh << "; ";
    ck.require(drop >= 1e3, tag + " drop");
    ck.require(d2 < d1 && d3 < d2, tag + " lambda");
    ck.require(poh < kIdentity, tag + " pohozaev");
    ck.require(lim.classification == kind, tag + " class " + lim.note);
    for (const auto& row : r) ck.require(row.converged && row.lambda < 0.0, tag + " row");
    traces().push_back(std::move(tr));
  }
}

void c7_signs(Check& ck) {
  int count = 0, rows = 0;
  double worst = 0.0;
  std::string worst_label;
  for (const auto& s : seen()) {
    if (!negative_multiplier_expected(s.N, s.p)) continue;
    ++count;
    ck.require(s.rep.lambda < 0.0, s.label + " sign");
    const auto b = breakdown(s.rep.field, s.p);
    double gap = rel(multiplier(b, s.rep.mu), s.rep.lambda);
    if (s.rep.mu == 0.0) gap = std::max(gap, multiplier_identity(b, s.rep.lambda, s.p, s.N).rel_residual);
    if (gap > worst) {
      worst = gap;
      worst_label = s.label;
    }
    ck.require(gap < kIdentity, s.label + " reconstruction");
  }
  for (const auto& t : traces())
    for (const auto& r : t.rows) {
      ++rows;
      ck.require(r.lambda < 0.0, "continuation row sign");
    }
  ck.msg << count << " solutions and " << rows << " continuation rows, worst reconstruction gap " << worst << " (" << worst_label << ")";
  ck.require(count > 0, "empty matrix");
}

const DualTransform& table() {
  static const DualTransform t = build_transform(1e6, 4000);
  return t;
}

void c8_decay(Check& ck) {
  ShootConfig sc;
  sc.lambda = 0.0;
  sc.r_max = 200.0;
  sc.step = 0.05;
  const auto s5 = find_ground(sc, table(), 4.0, 5);
  const auto rep = decay_fit(s5, table(), 4.0, 5, {20.0, 100.0});
  const double ratio = rep.C_fit / rep.C_integral;
  const bool m5 = l2_membership(s5.field(), 5);
  const auto s3 = find_ground(sc, table(), 6.0, 3);
  const bool m3 = l2_membership(s3.field(), 3);
  ck.msg << "N=5 slope " << rep.slope << " C ratio " << ratio << " member " << m5 << "; N=3 p=6 member " << m3;
  ck.require(std::abs(rep.slope + 3.0) <= kSlope, "slope");
  ck.require(ratio >= 0.97 && ratio <= 1.03, "C ratio");
  ck.require(m5 && !m3, "membership");
}

void c9_dual(Check& ck) {
  const auto& t = table();
  ShootConfig sc;
  sc.lambda = -1.0;
  sc.r_max = 30.0;
  sc.step = 0.01;
  const auto shot = find_ground(sc, t, 3.0, 3);
  const double strong = strong_residual(to_primal(t, shot.field()), -1.0, 0.0, 3.0);
  double cauchy = 0.0;
  for (size_t k = 0; k < t.s_nodes().size(); ++k) {
    const double f = t.f_nodes()[k];
    cauchy = std::max(cauchy, std::abs(t.f_prime(t.s_nodes()[k]) * std::sqrt(1 + 2 * f * f) - 1.0));
  }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-500.0, 500.0);
  bool odd = true;
  double round = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double s = U(rng);
    odd = odd && t.f(-s) == -t.f(s);
    round = std::max(round, std::abs(t.f_inv(t.f(s)) - s) / std::max(1.0, std::abs(s)));
  }
  const double f1 = t.f(1.0);
  const double oracle = f_by_integration(1.0);
  const double growth = t.f(1e12) / std::sqrt(1e12);
  ck.msg << "strong residual " << strong << ", cauchy " << cauchy << ", round trip " << round << ", f(1)=" << f1
         << " (oracle " << oracle << "), f(s)/sqrt(s)=" << growth;
  ck.require(strong < 1e-3, "strong");
  ck.require(cauchy < 1e-10 && odd && round < 1e-9, "table");
  ck.require(std::abs(f1 - 0.834) <= 1e-3 && std::abs(f1 - oracle) <= 1e-3, "f(1)");
  ck.require(std::abs(growth - std::pow(2.0, 0.25)) <= 1e-3, "growth");
}

void c10_asymptotics(Check& ck) {
  const auto tab = multiplier_asymptotics(
      3.0, 2, {20.0, 80.0, 320.0, 1280.0},
      [](double c) { return build_grid(2, 20.0 * std::pow(20.0 / c, 0.25), 2000); }, FlowConfig{});
  for (const auto& r : tab.rows) ck.msg << "c=" << r.c << " beta=" << r.beta << " m/c=" << r.m_over_c << "; ";
  bool conv = tab.rows.size() == 4;
  for (const auto& r : tab.rows) conv = conv && r.converged;
  ck.require(conv, "converged");
  ck.require(tab.beta_decreasing, "beta decreasing");
  ck.require(tab.beta_doubling, "doubling");
  ck.require(tab.m_over_c_decreasing, "m/c decreasing");
}

void c11_groundstate(Check& ck) {
  const auto r = global_minimize(Params{3, 3.0, 1.5 * cpn(), 0.0}, build_grid(3, 40.0, 2000), FlowConfig{});
  record("ground-state minimizer", r, 3.0, 3);
  ShootConfig sc;
  sc.lambda = r.lambda;
  sc.r_max = 40.0;
  sc.step = 0.01;
  const auto shot = find_ground(sc, table(), 3.0, 3);
  const auto cmp = groundstate_compare(r, to_primal(table(), shot.field()), 3.0, 3);
  // Resolution of the t-profile sampling.
  double dt = INFINITY;
  for (size_t k = 1; k < cmp.t.size(); ++k) dt = std::min(dt, std::abs(cmp.t[k] - cmp.t[k - 1]));
  ck.msg << "beta=" << cmp.beta << " I(min)=" << cmp.I_value_minimizer << " I(shot)=" << cmp.I_value_shooting
         << " gap " << cmp.relative_gap << " t_argmax=" << cmp.t_argmax << " (dt " << dt << ")";
  ck.require(r.converged, "minimizer");
  ck.require(cmp.relative_gap < kGroundGap, "gap");
  ck.require(std::abs(cmp.t_argmax - 1.0) <= dt, "argmax");
}

void c12_floor(Check& ck) {
  const auto& t = two();
  auto path_floor = [](const std::vector<double>& h) {
    return h.empty() ? -INFINITY : *std::min_element(h.begin(), h.end());
  };
  struct Run {
    std::string tag;
    double k0;
    const std::vector<double>* hist;
  };
  std::vector<Run> runs = {{"1.5c", t.k0_above, &t.mp_above.max_history}};
  if (t.factor > 0.0) runs.push_back({"below", t.k0_below, &t.mp_below.max_history});
  for (const auto& r : runs) {
    const double f = path_floor(*r.hist);
    ck.msg << r.tag << ": min path max " << f << " vs k0/4 " << r.k0 / 4 << " over " << r.hist->size() << " sweeps; ";
    ck.require(!r.hist->empty() && f >= r.k0 / 4.0, r.tag + " floor");
  }
  for (const auto& tr : traces())
    if (tr.kind == Classification::MountainPass)
      ck.require(!tr.max_history.empty() && path_floor(tr.max_history) >= tr.k0 / 4.0, "continuation floor");
  // Fresh probes on the rings k <= k0.
  const auto fresh = probe_family(box(), 100, 31337);
  int samples = 0;
  for (const auto& [c, k0] : {std::pair{1.5 * cpn(), t.k0_above}, std::pair{t.c_local, t.k0_below}}) {
    if (k0 <= 0.0) continue;
    for (const auto& s : ring_samples(fresh, Params{3, 3.0, c, 0.0}, 0.05 * k0, k0, 4)) {
      ++samples;
      ck.require(s.J >= s.k / 4.0 && s.Q >= s.k / 4.0, "ring sample");
    }
  }
  ck.msg << samples << " fresh ring samples";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    void (*fn)(Check&);
  };
  const Criterion all[] = {
      {1, "gradient-consistency", 5, c1_gradient},   {2, "scaling-algebra", 5, c2_scaling},
      {3, "identity-suite", 120, c3_identities},     {4, "regime-table", 600, c4_regimes},
      {5, "two-solutions", 1800, c5_two_solutions},  {6, "continuation", 1200, c6_continuation},
      {7, "multiplier-signs", 60, c7_signs},         {8, "power-decay", 120, c8_decay},
      {9, "dual-consistency", 60, c9_dual},          {10, "multiplier-divergence", 600, c10_asymptotics},
      {11, "ground-state", 300, c11_groundstate},    {12, "mountain-pass-floor", 120, c12_floor},
  };
  int failed = 0;
  for (const auto& c : all) {
    Check ck;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.fn(ck);
    } catch (const std::exception& e) {
      ck.ok = false;
      ck.msg << " exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ck.require(secs <= c.budget_s, "runtime");
    std::printf("[%s] %d %s: %s [%.1fs]\n", ck.ok ? "PASS" : "FAIL", c.id, c.name, ck.msg.str().c_str(), secs);
    std::fflush(stdout);
    failed += !ck.ok;
  }
  std::printf("%d/12 criteria passed\n", 12 - failed);
  return failed ? 1 : 0;
}
