#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "sharpspec/core/error.hpp"

namespace sharpspec::spectra {

// Observed order p from the last three levels, assuming λ(h) = λ* + c h^p:
// (λ1 - λ2) / (λ2 - λ3) = (h1^p - h2^p) / (h2^p - h3^p), solved by bisection.
// Returns NaN when the differences do not have a consistent sign.
inline double fitted_order(double h1, double h2, double h3, double l1, double l2, double l3) {
  double d12 = l1 - l2, d23 = l2 - l3;
  if (d23 == 0.0 || d12 * d23 <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  double target = d12 / d23;
  auto g = [&](double p) { return (std::pow(h1, p) - std::pow(h2, p)) / (std::pow(h2, p) - std::pow(h3, p)) - target; };
  double lo = 0.05, hi = 12.0;
  if (g(lo) * g(hi) > 0) return std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if ((g(lo) < 0) == (g(mid) < 0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// λ* estimate from the two finest levels and order p.
inline double richardson(double h2, double h3, double l2, double l3, double p) {
  if (!std::isfinite(p)) return std::numeric_limits<double>::quiet_NaN();
  double r = std::pow(h2 / h3, p);
  return l3 + (l3 - l2) / (r - 1.0);
}

}  // namespace sharpspec::spectra
