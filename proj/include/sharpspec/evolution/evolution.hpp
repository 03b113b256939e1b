#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <vector>

#include "sharpspec/spectra/laplace_sharp.hpp"

namespace sharpspec::evolution {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Eigen-expansion of div# grad# in Hodge-weighted coordinates: eigenvalues
// -sigma_j^2 with orthonormal modes, plus an orthonormal kernel block.
struct EigenBasis {
  VectorXd sigma;  // ascending, > 0
  MatrixXd modes;
  MatrixXd kernel;
  VectorXd sqrt_weights;  // nodal value = coordinate / sqrt_weight
  double max_residual = 0.0;

  Index dim() const { return modes.rows(); }
  Index size() const { return modes.cols(); }
};

struct EvolutionResult {
  std::vector<double> times;
  MatrixXd snapshots;           // column k is u(t_k) in Hodge coordinates
  MatrixXd kernel_coefficients;  // column k is the kernel part of u(t_k)
  std::vector<double> energy;   // heat: |u|; wave: |u_t|^2 + |grad# u|^2 - 2 <f, u>
  double truncation_residual = 0.0;  // |u0 - expanded part of u0|
};

// zero_tol separates kernel from nonzero eigenvalues; max_modes < 0 keeps all.
inline EigenBasis make_basis(const EigResult& e, const VectorXd& sqrt_weights, double zero_tol,
                             Index max_modes = -1) {
  require(e.vectors.cols() == static_cast<Index>(e.size()), ErrorKind::precondition,
          "make_basis: eigenvectors required");
  EigenBasis b;
  b.sqrt_weights = sqrt_weights;
  std::vector<Index> ker, pos;
  for (std::size_t i = 0; i < e.size(); ++i) {
    double l = e.eigenvalues[i];
    require(l <= zero_tol, ErrorKind::precondition, "make_basis: positive eigenvalue in div# grad#");
    (std::abs(l) <= zero_tol ? ker : pos).push_back(static_cast<Index>(i));
    b.max_residual = std::max(b.max_residual, e.residuals.empty() ? 0.0 : e.residuals[i]);
  }
  // ascending sigma = descending eigenvalue
  std::reverse(pos.begin(), pos.end());
  if (max_modes >= 0 && static_cast<Index>(pos.size()) > max_modes) pos.resize(static_cast<std::size_t>(max_modes));
  b.kernel.resize(e.vectors.rows(), static_cast<Index>(ker.size()));
  for (std::size_t j = 0; j < ker.size(); ++j) b.kernel.col(static_cast<Index>(j)) = e.vectors.col(ker[j]).normalized();
  if (b.kernel.cols() > 1) b.kernel = Eigen::HouseholderQR<MatrixXd>(b.kernel).householderQ() *
                                      MatrixXd::Identity(b.kernel.rows(), b.kernel.cols());
  b.modes.resize(e.vectors.rows(), static_cast<Index>(pos.size()));
  b.sigma.resize(static_cast<Index>(pos.size()));
  for (std::size_t j = 0; j < pos.size(); ++j) {
    b.modes.col(static_cast<Index>(j)) = e.vectors.col(pos[j]).normalized();
    b.sigma(static_cast<Index>(j)) = std::sqrt(-e.eigenvalues[static_cast<std::size_t>(pos[j])]);
  }
  return b;
}

inline EigenBasis laplace_basis(const cubical::VoxelDomain& v, double tol = 1e-9, Index max_modes = -1) {
  spectra::DenseSharp d = spectra::dense_grad_sharp(v, tol * 1e-1);
  EigResult e = spectra::laplace_sharp_eigs(d, tol);
  double scale = e.size() ? std::max(std::abs(e.eigenvalues.front()), 1.0) : 1.0;
  return make_basis(e, d.sqrt_weights, 1e-8 * scale, max_modes);
}

// max |Φ^T Φ - I| over modes and kernel together.
inline double orthonormality_defect(const EigenBasis& b) {
  MatrixXd all(b.dim(), b.kernel.cols() + b.modes.cols());
  all << b.kernel, b.modes;
  return (all.transpose() * all - MatrixXd::Identity(all.cols(), all.cols())).cwiseAbs().maxCoeff();
}

inline VectorXd to_nodal(const EigenBasis& b, const VectorXd& x) { return x.cwiseQuotient(b.sqrt_weights); }
inline VectorXd from_nodal(const EigenBasis& b, const VectorXd& u) { return u.cwiseProduct(b.sqrt_weights); }

namespace detail {

inline void check_inputs(const EigenBasis& b, const std::vector<double>& times, std::initializer_list<const VectorXd*> data) {
  for (const VectorXd* d : data)
    require(d->size() == 0 || d->size() == b.dim(), ErrorKind::dimension_mismatch,
            "evolve: data does not match the basis dimension");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(std::isfinite(times[i]) && times[i] >= 0.0, ErrorKind::invalid_argument, "evolve: times must be >= 0");
    require(i == 0 || times[i] > times[i - 1], ErrorKind::invalid_argument, "evolve: times must be increasing");
  }
}

inline VectorXd coefficients(const MatrixXd& basis, const VectorXd& x) {
  return x.size() ? VectorXd(basis.transpose() * x) : VectorXd::Zero(basis.cols());
}

}  // namespace detail

// u_t = div# grad# u + f with f constant in time (empty f means zero).
inline EvolutionResult evolve_heat(const EigenBasis& b, const VectorXd& u0, const std::vector<double>& times,
                                   const VectorXd& f = VectorXd()) {
  require(u0.size() == b.dim(), ErrorKind::dimension_mismatch, "evolve_heat: u0 does not match the basis");
  detail::check_inputs(b, times, {&f});
  const VectorXd a = detail::coefficients(b.modes, u0), k = detail::coefficients(b.kernel, u0);
  const VectorXd fa = detail::coefficients(b.modes, f), fk = detail::coefficients(b.kernel, f);
  const VectorXd steady = fa.cwiseQuotient(b.sigma.cwiseAbs2());

  EvolutionResult r;
  r.times = times;
  r.truncation_residual = (u0 - b.modes * a - b.kernel * k).norm();
  r.snapshots.resize(b.dim(), static_cast<Index>(times.size()));
  r.kernel_coefficients.resize(b.kernel.cols(), static_cast<Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    VectorXd c(a.size());
    for (Index j = 0; j < a.size(); ++j)
      c(j) = std::exp(-b.sigma(j) * b.sigma(j) * t) * (a(j) - steady(j)) + steady(j);
    VectorXd kc = k + t * fk;
    const auto col = static_cast<Index>(i);
    r.kernel_coefficients.col(col) = kc;
    r.snapshots.col(col) = b.modes * c + b.kernel * kc;
    r.energy.push_back(std::sqrt(c.squaredNorm() + kc.squaredNorm()));
  }
  return r;
}

// u_tt = div# grad# u + f with f constant in time (empty f means zero).
inline EvolutionResult evolve_wave(const EigenBasis& b, const VectorXd& u0, const VectorXd& v0,
                                   const std::vector<double>& times, const VectorXd& f = VectorXd()) {
  require(u0.size() == b.dim() && v0.size() == b.dim(), ErrorKind::dimension_mismatch,
          "evolve_wave: initial data do not match the basis");
  detail::check_inputs(b, times, {&f});
  const VectorXd a = detail::coefficients(b.modes, u0), k = detail::coefficients(b.kernel, u0);
  const VectorXd va = detail::coefficients(b.modes, v0), vk = detail::coefficients(b.kernel, v0);
  const VectorXd fa = detail::coefficients(b.modes, f), fk = detail::coefficients(b.kernel, f);
  const VectorXd steady = fa.cwiseQuotient(b.sigma.cwiseAbs2());

  EvolutionResult r;
  r.times = times;
  r.truncation_residual = std::hypot((u0 - b.modes * a - b.kernel * k).norm(), (v0 - b.modes * va - b.kernel * vk).norm());
  r.snapshots.resize(b.dim(), static_cast<Index>(times.size()));
  r.kernel_coefficients.resize(b.kernel.cols(), static_cast<Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    VectorXd c(a.size()), dc(a.size());
    for (Index j = 0; j < a.size(); ++j) {
      const double s = b.sigma(j), cs = std::cos(s * t), sn = std::sin(s * t);
      c(j) = (a(j) - steady(j)) * cs + va(j) / s * sn + steady(j);
      dc(j) = -(a(j) - steady(j)) * s * sn + va(j) * cs;
    }
    VectorXd kc = k + t * vk + 0.5 * t * t * fk;
    VectorXd dkc = vk + t * fk;
    const auto col = static_cast<Index>(i);
    r.kernel_coefficients.col(col) = kc;
    r.snapshots.col(col) = b.modes * c + b.kernel * kc;
    double kinetic = dc.squaredNorm() + dkc.squaredNorm();
    double potential = c.cwiseProduct(b.sigma).squaredNorm();
    double work = fa.dot(c) + fk.dot(kc);
    r.energy.push_back(kinetic + potential - 2.0 * work);
  }
  return r;
}

// max |k(t) - k(0)| over the snapshots.
inline double mass_defect(const EvolutionResult& r) {
  double worst = 0.0;
  for (Index i = 1; i < r.kernel_coefficients.cols(); ++i)
    worst = std::max(worst, (r.kernel_coefficients.col(i) - r.kernel_coefficients.col(0)).norm());
  return worst;
}

// max |E(t) - E(0)| / max(|E(0)|, tiny).
inline double energy_drift(const EvolutionResult& r) {
  if (r.energy.empty()) return 0.0;
  double worst = 0.0;
  for (double e : r.energy) worst = std::max(worst, std::abs(e - r.energy.front()));
  return worst / std::max(std::abs(r.energy.front()), 1e-300);
}

inline bool energy_nonincreasing(const EvolutionResult& r, double slack = 0.0) {
  for (std::size_t i = 1; i < r.energy.size(); ++i)
    if (r.energy[i] > r.energy[i - 1] * (1.0 + slack)) return false;
  return true;
}

}  // namespace sharpspec::evolution
