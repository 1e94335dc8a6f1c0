#pragma once

#include <string>
#include <vector>

#include "qlnorm/model.hpp"

namespace qlnorm {

// The odd solution of f' = 1/sqrt(1 + 2 f^2), f(0) = 0, which maps solutions v of
// the semilinear problem to solutions u = f(v) of the quasi-linear one.
class DualTransform {
 public:
  DualTransform(double s_max, int n);

  double s_max() const { return s_max_; }
  const std::vector<double>& s_nodes() const { return s_; }
  const std::vector<double>& f_nodes() const { return f_; }

  double f(double s) const;
  double f_prime(double s) const;
  double f_inv(double u) const;

  // sup f(s)/s over (0, 1] and sup f(s)/sqrt(s) over [1, s_max] on the table.
  double small_constant() const;
  double large_constant() const;
  // sup over the table of f(s)^{p+1} / s^{2N/(N-2)}.
  double growth_constant(double p, int N) const;

  std::string csv() const;

 private:
  double s_max_;
  std::vector<double> s_, f_;
};

DualTransform build_transform(double s_max, int n);

// Exact inverse: int_0^u sqrt(1 + 2 x^2) dx.
double f_inverse_exact(double u);

// f computed by adaptive integration of the Cauchy problem; independent of the
// inversion used by DualTransform.
double f_by_integration(double s);

double semilinear_rhs(const DualTransform& t, double v, double lambda, double p);

RadialField to_primal(const DualTransform& t, const RadialField& v);
RadialField to_dual(const DualTransform& t, const RadialField& u);

double kernel_K(double r, int N);

}  // namespace qlnorm
