#pragma once

#include <string>

namespace qlnorm {

enum class Regime {
  Subcritical,    // p < 1 + 4/N
  MassCritical,   // p = 1 + 4/N
  Intermediate,   // 1 + 4/N < p < 3 + 4/N
  Critical,       // p = 3 + 4/N
  Supercritical,  // p > 3 + 4/N, below the upper exponent
  Inadmissible,   // p >= (3N+2)/(N-2) for N >= 3, or p <= 1
};

struct Params {
  int N = 3;
  double p = 3.0;
  double c = 1.0;
  double mu = 0.0;

  // Throws InvalidConfig when the instance is outside N >= 1, p > 1, c > 0, mu >= 0.
  void validate() const;
};

Regime classify(int N, double p);
const char* to_string(Regime r);

double lower_exponent(int N);  // 1 + 4/N
double upper_exponent(int N);  // 3 + 4/N
// (N+2)/(N-2) and (3N+2)/(N-2); +inf for N <= 2.
double sobolev_exponent(int N);
double quasi_critical_exponent(int N);

// Nonexistence of nontrivial solutions with lambda >= 0 is known here.
bool negative_multiplier_expected(int N, double p);

}  // namespace qlnorm
