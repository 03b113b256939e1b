#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sharpspec/core/error.hpp"

namespace sharpspec::spectra {

inline constexpr std::size_t kWeylMinValues = 30;

struct WeylFit {
  double exponent = 0.0;  // N(λ) ≈ C λ^exponent
  double constant = 0.0;  // C
  double constant_per_volume = 0.0;
  std::size_t used = 0;
};

// Least squares of log N(λ_j) = log C + α log λ_j over the positive values,
// with N(λ_j) = j for the ascending list.
inline WeylFit weyl_fit(std::vector<double> values, double volume) {
  std::vector<double> pos;
  for (double v : values)
    if (v > 0) pos.push_back(v);
  require(pos.size() >= kWeylMinValues, ErrorKind::invalid_argument, "weyl_fit: need at least 30 positive eigenvalues");
  require(volume > 0, ErrorKind::invalid_argument, "weyl_fit: volume must be positive");
  std::sort(pos.begin(), pos.end());
  const double m = static_cast<double>(pos.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < pos.size(); ++j) {
    double x = std::log(pos[j]), y = std::log(static_cast<double>(j + 1));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = m * sxx - sx * sx;
  require(denom > 0, ErrorKind::invalid_argument, "weyl_fit: eigenvalues are all equal");
  WeylFit f;
  f.exponent = (m * sxy - sx * sy) / denom;
  f.constant = std::exp((sy - f.exponent * sx) / m);
  f.constant_per_volume = f.constant / volume;
  f.used = pos.size();
  return f;
}

}  // namespace sharpspec::spectra
