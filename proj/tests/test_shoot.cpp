#include <gtest/gtest.h>

#include <cmath>

#include "qlnorm/diagnostics.hpp"
#include "qlnorm/dual.hpp"
#include "qlnorm/error.hpp"
#include "qlnorm/shoot.hpp"
#include "support.hpp"

using namespace qlnorm;
using qlnorm::testing::rel;

namespace {

const DualTransform& table() {
  static const DualTransform t = build_transform(1e6, 4000);
  return t;
}

ShotResult ground_m1() {
  static const ShotResult s = [] {
    ShootConfig cfg;
    cfg.lambda = -1.0;
    cfg.r_max = 30.0;
    cfg.step = 0.01;
    return find_ground(cfg, table(), 3.0, 3);
  }();
  return s;
}

ShotResult ground_zero(int N, double p) {
  ShootConfig cfg;
  cfg.lambda = 0.0;
  cfg.r_max = 200.0;
  cfg.step = 0.05;
  return find_ground(cfg, table(), p, N);
}

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = x.size();
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST(Shoot, ConfigValidation) {
  ShootConfig cfg;
  cfg.v0_lo = 2.0;
  cfg.v0_hi = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = ShootConfig{};
  cfg.step = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_THROW(integrate_radial(ShootConfig{}, -1.0, table(), 3.0, 3), Error);
}

TEST(Shoot, NegligibleRhsGivesConstant) {
  ShootConfig cfg;
  cfg.r_max = 10.0;
  cfg.step = 0.1;
  auto s = integrate_radial(cfg, 1e-4, table(), 3.0, 3);
  EXPECT_EQ(s.outcome, ShotOutcome::Reached);
  // Drift bounded by r^2 v0^3 / 6.
  EXPECT_LT((s.v.array() - 1e-4).abs().maxCoeff(), 100.0 / 6.0 * 1e-12 * 1.01);
}

TEST(Shoot, EnergyNonIncreasing) {
  ShootConfig cfg;
  cfg.lambda = -1.0;
  cfg.r_max = 20.0;
  cfg.step = 0.02;
  for (double v0 : {0.5, 2.0, 8.0}) {
    auto s = integrate_radial(cfg, v0, table(), 3.0, 3);
    double prev = INFINITY;
    for (int i = 0; i <= s.grid->n && s.grid->r[i] < s.r_stop; ++i) {
      const double E = 0.5 * s.dv[i] * s.dv[i] + rhs_primitive(table(), s.v[i], -1.0, 3.0);
      EXPECT_LE(E, prev + 1e-9 * std::max(1.0, std::abs(prev))) << "v0=" << v0 << " r=" << s.grid->r[i];
      prev = E;
    }
  }
}

TEST(Shoot, Dichotomy) {
  ShootConfig cfg;
  cfg.lambda = -1.0;
  cfg.r_max = 60.0;
  // Small amplitudes are pulled back by the linear term, large ones overshoot zero.
  auto small = integrate_radial(cfg, 0.05, table(), 3.0, 3);
  auto large = integrate_radial(cfg, 50.0, table(), 3.0, 3);
  EXPECT_EQ(small.outcome, ShotOutcome::Turned);
  EXPECT_EQ(large.outcome, ShotOutcome::Crossed);
  EXPECT_STREQ(to_string(ShotOutcome::Crossed), "crossed");
}

TEST(Shoot, GroundStateExponentialTail) {
  const auto s = ground_m1();
  const auto& g = *s.grid;
  for (int i = 1; i <= g.n; ++i) {
    EXPECT_GE(s.v[i], 0.0);
    EXPECT_LE(s.v[i], s.v[i - 1]);
  }
  std::vector<double> x, y;
  for (int i = 0; i <= g.n; ++i)
    if (g.r[i] >= 10.0 && g.r[i] <= 20.0) {
      x.push_back(g.r[i]);
      y.push_back(std::log(g.r[i] * s.v[i]));  // r^{(N-1)/2} v
    }
  EXPECT_NEAR(slope(x, y), -1.0, 0.02);
  EXPECT_TRUE(l2_membership(s.field(), 3));
}

TEST(Shoot, MappedProfileSolvesPrimalProblem) {
  const auto s = ground_m1();
  auto u = to_primal(table(), s.field());
  EXPECT_LT(strong_residual(u, -1.0, 0.0, 3.0), 1e-3);
}

TEST(Shoot, BracketWithoutDichotomy) {
  ShootConfig cfg;
  cfg.lambda = -1.0;
  cfg.v0_lo = 100.0;
  cfg.v0_hi = 200.0;
  try {
    find_ground(cfg, table(), 3.0, 3);
    FAIL() << "expected a bracket error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Bracket);
  }
  cfg.lambda = 0.5;
  EXPECT_THROW(find_ground(cfg, table(), 3.0, 3), Error);
}

TEST(Shoot, PowerDecayInFiveDimensions) {
  const auto s = ground_zero(5, 4.0);
  const auto rep = decay_fit(s, table(), 4.0, 5);
  EXPECT_NEAR(rep.slope, -3.0, 0.05);
  EXPECT_GE(rep.C_fit / rep.C_integral, 0.97);
  EXPECT_LE(rep.C_fit / rep.C_integral, 1.03);
  EXPECT_TRUE(l2_membership(s.field(), 5));

  // a >= 0, b >= 0, A non-increasing and small at the end.
  for (size_t k = 0; k < rep.r.size(); ++k) {
    EXPECT_GE(rep.a_r[k], 0.0);
    EXPECT_GE(rep.b_r[k], 0.0);
    if (k) EXPECT_LE(rep.A_r[k], rep.A_r[k - 1]);
  }
  EXPECT_LT(rep.A_r[rep.r.size() / 2], 1e-2 * rep.A_r.front());

  // b r^N and |v'| r^{N-1} stay bounded on the tail window.
  double bmax = 0, dmax = 0, dmin = INFINITY;
  for (size_t k = 0; k < rep.r.size(); ++k) {
    const double r = rep.r[k];
    if (r < rep.window.first || r > rep.window.second) continue;
    bmax = std::max(bmax, rep.b_r[k] * std::pow(r, 5));
    const double d = std::abs(s.dv[k + 1]) * std::pow(r, 4);
    dmax = std::max(dmax, d);
    dmin = std::min(dmin, d);
  }
  EXPECT_TRUE(std::isfinite(bmax));
  EXPECT_LT(dmax / dmin, 1.05);
}

TEST(Shoot, RadialIdentityPointwise) {
  ShootConfig cfg;
  cfg.r_max = 20.0;
  cfg.step = 0.001;
  const auto s = find_ground(cfg, table(), 4.0, 5);
  const auto& g = *s.grid;
  const double p = 4.0;
  const int N = 5;
  auto a = [&](int i) {
    const double r = g.r[i];
    const double F = std::pow(table().f(s.v[i]), p + 1.0);
    return std::pow(r, N) * (s.dv[i] * s.dv[i] + 2.0 * F / (p + 1.0));
  };
  const double h = g.h;
  for (int i = 50; i < g.n / 2; i += 97) {
    const double r = g.r[i];
    const double da = (-a(i + 2) + 8 * a(i + 1) - 8 * a(i - 1) + a(i - 2)) / (12 * h);
    const double F = std::pow(table().f(s.v[i]), p + 1.0);
    const double t1 = (N - 2.0) * s.dv[i] * s.dv[i];
    const double t2 = 2.0 * N * F / (p + 1.0);
    const double res = da + std::pow(r, N - 1.0) * (t1 - t2);
    const double scale = std::pow(r, N - 1.0) * (t1 + t2);
    EXPECT_LT(std::abs(res), 1e-6 * scale) << "r=" << r;
  }
}

TEST(Shoot, NoL2MembershipInThreeDimensions) {
  const auto s = ground_zero(3, 6.0);
  const auto rep = decay_fit(s, table(), 6.0, 3);
  EXPECT_NEAR(rep.slope, -1.0, 0.05);
  EXPECT_FALSE(l2_membership(s.field(), 3));
  for (double q : l2_increment_ratios(s.field(), 3)) EXPECT_GT(q, 0.75);
}

TEST(Shoot, DecayWindowErrors) {
  const auto s = ground_zero(5, 4.0);
  EXPECT_THROW(decay_fit(s, table(), 4.0, 5, {10.0, 500.0}), Error);
  EXPECT_THROW(decay_fit(s, table(), 4.0, 5, {50.0, 20.0}), Error);
  EXPECT_THROW(decay_fit(s, table(), 4.0, 2), Error);
}
