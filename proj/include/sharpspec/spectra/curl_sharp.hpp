#pragma once

#include <algorithm>
#include <cmath>
#include <memory>

#include "sharpspec/cubical/domain.hpp"
#include "sharpspec/spectra/lanczos.hpp"
#include "sharpspec/spectra/resolvent.hpp"

namespace sharpspec::spectra {

struct CurlSharpParams {
  int count = 20;
  double tol = 1e-8;
  double cg_tol = 1e-10;
  std::uint64_t seed = 42;
  int block = 4;
  double cluster_rel = 1e-6;
};

struct CurlSharpResult {
  EigResult eig;                   // λ = 1/μ ascending; residual = |R v - μ v| / max|μ|
  std::vector<double> mu;          // aligned with eig.eigenvalues
  std::vector<double> curl_residual;  // |Π S v - λ v| / |v|, diagnostic
  TorusGrid grid;
  std::shared_ptr<cubical::CubicalComplex> complex;
};

inline CurlSharpResult curl_sharp_eigs(const cubical::VoxelDomain& v, const CurlSharpParams& p) {
  require(v.dim() == 3, ErrorKind::invalid_argument, "curl_sharp_eigs: domain must be 3D");
  CurlSharpResult out;
  out.complex = std::make_shared<cubical::CubicalComplex>(cubical::build_complex(v));
  out.grid = grid_for(v);
  ProjectorOptions popt;
  popt.cg_tol = p.cg_tol;
  popt.seed = p.seed;
  SharpResolvent r(*out.complex, out.grid, popt);

  LanczosOptions lo;
  lo.count = p.count;
  lo.tol = p.tol;
  lo.seed = p.seed;
  lo.block = p.block;
  lo.which = Which::largest_magnitude;
  std::function<MatrixXd(const MatrixXd&)> op = [&](const MatrixXd& x) {
    MatrixXd y(x.rows(), x.cols());
    for (Index j = 0; j < x.cols(); ++j) y.col(j) = r.apply_on_range(VectorXd(x.col(j)));
    return y;
  };
  std::function<MatrixXd(const MatrixXd&)> prep = [&](const MatrixXd& x) { return r.projector().apply(x); };
  LanczosOutput<double> lz = block_lanczos<double>(op, r.dim(), lo, prep);

  EigResult& e = out.eig;
  e.meta = lz.result.meta;
  e.meta.solver = "resolvent-block-lanczos";
  e.meta.cluster_tol = 0;
  e.unverified = lz.result.unverified;
  double max_abs_lambda = 0.0;
  for (std::size_t i = 0; i < lz.result.eigenvalues.size(); ++i) {
    double mu = lz.result.eigenvalues[i];
    if (std::abs(mu) < 1e-300) continue;
    e.eigenvalues.push_back(1.0 / mu);
    e.residuals.push_back(lz.result.residuals[i]);
    max_abs_lambda = std::max(max_abs_lambda, std::abs(1.0 / mu));
  }
  e.vectors = lz.vectors;
  sort_and_cluster(e, p.cluster_rel * std::max(max_abs_lambda, 1e-300));
  out.mu.clear();
  out.curl_residual.clear();
  for (std::size_t i = 0; i < e.eigenvalues.size(); ++i) {
    out.mu.push_back(1.0 / e.eigenvalues[i]);
    VectorXd x = e.vectors.col(static_cast<Index>(i));
    out.curl_residual.push_back((r.curl_compressed(x) - e.eigenvalues[i] * x).norm() / x.norm());
  }
  e.meta.operator_applications = static_cast<int>(r.applications());
  return out;
}

// Pairs the positive values with the negated negative ones, both by
// increasing magnitude, and returns the worst mismatch over the common count
// (-1 when one side is empty).
inline double parity_defect(const std::vector<double>& values) {
  std::vector<double> pos, neg;
  for (double l : values) (l > 0 ? pos : neg).push_back(std::abs(l));
  if (pos.empty() || neg.empty()) return -1.0;
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(pos.size(), neg.size()); ++i) worst = std::max(worst, std::abs(pos[i] - neg[i]));
  return worst;
}

// Smallest positive root of tan x = x, by bisection on (pi, 3 pi / 2).
inline double tan_root() {
  double lo = M_PI + 1e-9, hi = 1.5 * M_PI - 1e-9;
  auto f = [](double x) { return std::sin(x) - x * std::cos(x); };
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if ((f(lo) < 0) == (f(mid) < 0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sharpspec::spectra
