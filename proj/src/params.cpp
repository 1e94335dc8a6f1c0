#include "qlnorm/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qlnorm/error.hpp"

namespace qlnorm {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::DivisionByZero: return "division-by-zero";
    case ErrorKind::Range: return "range";
    case ErrorKind::Bracket: return "bracket";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::NoRoot: return "no-root";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::BoundaryTrap: return "boundary-trap";
    case ErrorKind::Calibration: return "calibration";
    case ErrorKind::Refinement: return "refinement";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

void Params::validate() const {
  std::ostringstream os;
  if (N < 1) os << "N must be >= 1 (got " << N << "); ";
  if (!(p > 1.0) || !std::isfinite(p)) os << "p must be > 1 (got " << p << "); ";
  if (!(c > 0.0) || !std::isfinite(c)) os << "c must be > 0 (got " << c << "); ";
  if (!(mu >= 0.0) || !std::isfinite(mu)) os << "mu must be >= 0 (got " << mu << "); ";
  auto msg = os.str();
  if (!msg.empty()) throw Error(ErrorKind::InvalidConfig, msg);
}

double lower_exponent(int N) { return 1.0 + 4.0 / N; }
double upper_exponent(int N) { return 3.0 + 4.0 / N; }

double sobolev_exponent(int N) {
  if (N <= 2) return std::numeric_limits<double>::infinity();
  return double(N + 2) / double(N - 2);
}

double quasi_critical_exponent(int N) {
  if (N <= 2) return std::numeric_limits<double>::infinity();
  return double(3 * N + 2) / double(N - 2);
}

Regime classify(int N, double p) {
  constexpr double tol = 1e-12;
  if (N < 1 || !(p > 1.0) || p >= quasi_critical_exponent(N)) return Regime::Inadmissible;
  const double lo = lower_exponent(N);
  const double hi = upper_exponent(N);
  if (std::abs(p - lo) < tol) return Regime::MassCritical;
  if (p < lo) return Regime::Subcritical;
  if (std::abs(p - hi) < tol) return Regime::Critical;
  if (p < hi) return Regime::Intermediate;
  return Regime::Supercritical;
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::MassCritical: return "mass-critical";
    case Regime::Intermediate: return "intermediate";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
    case Regime::Inadmissible: return "inadmissible";
  }
  return "unknown";
}

bool negative_multiplier_expected(int N, double p) {
  if (N <= 4) return true;
  return p <= sobolev_exponent(N) + 1e-12;
}

}  // namespace qlnorm
