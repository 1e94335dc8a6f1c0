#pragma once

#include <cmath>
#include <random>

#include "qlnorm/model.hpp"

namespace qlnorm::testing {

// Sum of three Gaussian bumps with random centre, width and amplitude.
inline RadialField random_field(GridPtr g, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double a[3], c[3], s[3];
  for (int k = 0; k < 3; ++k) {
    a[k] = scale * (0.3 + U(rng));
    c[k] = 0.3 * g->R_max * U(rng);
    s[k] = 0.05 * g->R_max + 0.1 * g->R_max * U(rng);
  }
  return RadialField::sample(g, [&](double r) {
    double v = 0.0;
    for (int k = 0; k < 3; ++k) v += a[k] * std::exp(-0.5 * std::pow((r - c[k]) / s[k], 2));
    return v;
  });
}

inline RadialField gaussian(GridPtr g, double width = 1.0, double amp = 1.0) {
  return RadialField::sample(g, [=](double r) { return amp * std::exp(-0.5 * r * r / (width * width)); });
}

inline double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace qlnorm::testing
