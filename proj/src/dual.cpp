#include "qlnorm/dual.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

#include "qlnorm/error.hpp"

namespace qlnorm {

namespace {

constexpr double kMaxArgument = 1e15;

// Positive root of g(u) = s for s > 0. g is convex and increasing on u > 0, so
// Newton started above the root decreases monotonically onto it.
double invert_positive(double s) {
  double u = std::min(s, std::pow(2.0, 0.25) * std::sqrt(s));
  for (int it = 0; it < 100; ++it) {
    const double step = (f_inverse_exact(u) - s) / std::sqrt(1.0 + 2.0 * u * u);
    u -= step;
    if (std::abs(step) <= 1e-16 * std::max(u, 1e-300)) break;
  }
  return u;
}

}  // namespace

double f_inverse_exact(double u) {
  const double a = std::abs(u);
  const double val =
      0.5 * a * std::sqrt(1.0 + 2.0 * a * a) + std::asinh(std::sqrt(2.0) * a) / (2.0 * std::sqrt(2.0));
  return std::copysign(val, u);
}

double f_by_integration(double s) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 1>;
  State x{0.0};
  const double a = std::abs(s);
  if (a == 0.0) return 0.0;
  auto rhs = [](const State& y, State& dy, double) { dy[0] = 1.0 / std::sqrt(1.0 + 2.0 * y[0] * y[0]); };
  odeint::integrate_adaptive(
      odeint::make_controlled(1e-14, 1e-14, odeint::runge_kutta_dopri5<State>()), rhs, x, 0.0, a,
      std::min(1e-3, a / 10));
  return std::copysign(x[0], s);
}

DualTransform::DualTransform(double s_max, int n) : s_max_(s_max) {
  if (!(s_max > 0.0) || n < 100)
    throw Error(ErrorKind::InvalidConfig, "transform table needs s_max > 0 and n >= 100");
  // Graded nodes: uniform on [0, 1], geometric beyond.
  const int n_lin = n / 2;
  s_.reserve(n + 1);
  for (int k = 0; k <= n_lin; ++k) s_.push_back(std::min(1.0, s_max) * k / n_lin);
  if (s_max > 1.0) {
    const int n_geo = n - n_lin;
    const double ratio = std::pow(s_max, 1.0 / n_geo);
    for (int k = 1; k <= n_geo; ++k) s_.push_back(std::pow(ratio, k));
    s_.back() = s_max;
  }
  f_.reserve(s_.size());
  for (double s : s_) f_.push_back(s == 0.0 ? 0.0 : invert_positive(s));
}

double DualTransform::f(double s) const {
  if (!std::isfinite(s) || std::abs(s) > kMaxArgument)
    throw Error(ErrorKind::Range, "transform argument out of range");
  if (s == 0.0) return 0.0;
  return std::copysign(invert_positive(std::abs(s)), s);
}

double DualTransform::f_prime(double s) const {
  const double v = f(s);
  return 1.0 / std::sqrt(1.0 + 2.0 * v * v);
}

double DualTransform::f_inv(double u) const {
  if (!std::isfinite(u)) throw Error(ErrorKind::Range, "transform argument out of range");
  return f_inverse_exact(u);
}

double DualTransform::small_constant() const {
  double c = 1.0;
  for (size_t k = 1; k < s_.size() && s_[k] <= 1.0; ++k) c = std::max(c, f_[k] / s_[k]);
  return c;
}

double DualTransform::large_constant() const {
  double c = 0.0;
  for (size_t k = 1; k < s_.size(); ++k)
    if (s_[k] >= 1.0) c = std::max(c, f_[k] / std::sqrt(s_[k]));
  return c;
}

double DualTransform::growth_constant(double p, int N) const {
  if (N < 3) throw Error(ErrorKind::NotApplicable, "growth bound needs N >= 3");
  const double e = 2.0 * N / (N - 2.0);
  double c = 0.0;
  for (size_t k = 1; k < s_.size(); ++k) c = std::max(c, std::pow(f_[k], p + 1.0) / std::pow(s_[k], e));
  return c;
}

std::string DualTransform::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "s,f,fprime\n";
  for (size_t k = 0; k < s_.size(); ++k)
    os << s_[k] << ',' << f_[k] << ',' << 1.0 / std::sqrt(1.0 + 2.0 * f_[k] * f_[k]) << '\n';
  return os.str();
}

DualTransform build_transform(double s_max, int n) { return DualTransform(s_max, n); }

double semilinear_rhs(const DualTransform& t, double v, double lambda, double p) {
  if (v == 0.0) return 0.0;
  const double fv = t.f(v);
  const double fp = 1.0 / std::sqrt(1.0 + 2.0 * fv * fv);
  return fp * (std::pow(std::abs(fv), p - 1.0) * fv + lambda * fv);
}

RadialField to_primal(const DualTransform& t, const RadialField& v) {
  Vec out(v.u.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = t.f(v.u[i]);
  return RadialField(v.grid, std::move(out));
}

RadialField to_dual(const DualTransform& t, const RadialField& u) {
  Vec out(u.u.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = t.f_inv(u.u[i]);
  return RadialField(u.grid, std::move(out));
}

double kernel_K(double r, int N) {
  if (N < 3) throw Error(ErrorKind::NotApplicable, "kernel needs N >= 3");
  if (!(r > 0.0)) throw Error(ErrorKind::Range, "kernel needs r > 0");
  return 1.0 / ((N - 2.0) * sphere_surface(N) * std::pow(r, N - 2.0));
}

}  // namespace qlnorm
