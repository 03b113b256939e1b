#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sharpspec/core/error.hpp"
#include "sharpspec/core/svd.hpp"

namespace sharpspec::linrel {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-10;

// A subspace of R^n stored as an orthonormal basis (columns).
class Subspace {
 public:
  Subspace() = default;

  static Subspace zero(Index ambient_dim, double tol = kDefaultTol) {
    return Subspace(MatrixXd(ambient_dim, 0), tol);
  }

  static Subspace full(Index ambient_dim, double tol = kDefaultTol) {
    return Subspace(MatrixXd::Identity(ambient_dim, ambient_dim), tol);
  }

  // Trusts the caller that the columns are orthonormal.
  static Subspace from_orthonormal(MatrixXd basis, double tol = kDefaultTol) {
    return Subspace(std::move(basis), tol);
  }

  static Subspace coordinate(Index ambient_dim, const std::vector<Index>& axes,
                             double tol = kDefaultTol) {
    MatrixXd b = MatrixXd::Zero(ambient_dim, static_cast<Index>(axes.size()));
    for (std::size_t j = 0; j < axes.size(); ++j) b(axes[j], static_cast<Index>(j)) = 1.0;
    return Subspace(std::move(b), tol);
  }

  Index ambient_dim() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }
  double tol() const { return tol_; }
  const MatrixXd& basis() const { return basis_; }

  MatrixXd project(const MatrixXd& x) const { return basis_ * (basis_.transpose() * x); }
  VectorXd project(const VectorXd& x) const { return basis_ * (basis_.transpose() * x); }
  MatrixXd projector() const { return basis_ * basis_.transpose(); }

  // Spectral norm of (I - P) x, i.e. how far the columns of x stick out.
  double excess(const MatrixXd& x) const;

  bool contains(const MatrixXd& x, double tol) const { return excess(x) <= tol; }

 private:
  Subspace(MatrixXd basis, double tol) : basis_(std::move(basis)), tol_(tol) {}

  MatrixXd basis_;
  double tol_ = kDefaultTol;
};

namespace detail {

// Largest singular value of m, computed through the small Gram matrix so
// that tiny norms keep their relative accuracy.
inline double spectral_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  MatrixXd g = m.rows() >= m.cols() ? MatrixXd(m.transpose() * m) : MatrixXd(m * m.transpose());
  if (g.rows() == 1) return std::sqrt(std::max(0.0, g(0, 0)));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// Left singular vectors of cols with singular value above the threshold.
inline MatrixXd range_basis(const MatrixXd& cols, double rel_tol, double abs_floor) {
  const Index n = cols.rows();
  if (cols.cols() == 0 || n == 0) return MatrixXd(n, 0);
  Svd f = svd(cols, SvdVectors::thin, SvdVectors::none);
  double thresh = std::max(rel_tol * (f.s.size() ? f.s(0) : 0.0), abs_floor);
  Index r = 0;
  while (r < f.s.size() && f.s(r) > thresh) ++r;
  return f.u.leftCols(r);
}

// Orthonormal basis of the orthogonal complement of an orthonormal basis.
inline MatrixXd complement_basis(const MatrixXd& q) {
  const Index n = q.rows(), k = q.cols();
  if (k == 0) return MatrixXd::Identity(n, n);
  if (k >= n) return MatrixXd(n, 0);
  Eigen::HouseholderQR<MatrixXd> qr(q);
  MatrixXd tail = MatrixXd::Zero(n, n - k);
  tail.bottomRows(n - k).setIdentity();
  return qr.householderQ() * tail;
}

}  // namespace detail

inline double Subspace::excess(const MatrixXd& x) const {
  require(x.rows() == ambient_dim(), ErrorKind::dimension_mismatch, "excess: ambient dimension mismatch");
  return detail::spectral_norm(x - project(x));
}

// Orthonormal basis of span(columns); rank by singular values above
// tol * (largest singular value), optionally also above abs_floor.
inline Subspace orthonormalize(const MatrixXd& columns, double tol = kDefaultTol, double abs_floor = 0.0) {
  require(columns.rows() > 0, ErrorKind::invalid_argument, "orthonormalize: empty ambient dimension");
  require(tol > 0.0, ErrorKind::invalid_argument, "orthonormalize: tol must be positive");
  return Subspace::from_orthonormal(detail::range_basis(columns, tol, abs_floor), tol);
}

inline Subspace orthonormalize(const std::vector<VectorXd>& vectors, Index ambient_dim,
                               double tol = kDefaultTol) {
  require(ambient_dim > 0, ErrorKind::invalid_argument, "orthonormalize: empty ambient dimension");
  MatrixXd m(ambient_dim, static_cast<Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    require(vectors[j].size() == ambient_dim, ErrorKind::dimension_mismatch,
            "orthonormalize: vectors have different lengths");
    m.col(static_cast<Index>(j)) = vectors[j];
  }
  return orthonormalize(m, tol);
}

inline Subspace complement(const Subspace& s) {
  return Subspace::from_orthonormal(detail::complement_basis(s.basis()), s.tol());
}

// Orthogonal complement of s inside w (s need not lie in w).
inline Subspace complement_within(const Subspace& s, const Subspace& w) {
  require(s.ambient_dim() == w.ambient_dim(), ErrorKind::dimension_mismatch, "complement_within: ambient mismatch");
  if (w.dim() == w.ambient_dim()) return complement(s);
  // coordinates c with W c orthogonal to s
  MatrixXd g = s.basis().transpose() * w.basis();
  MatrixXd rows = detail::range_basis(g.transpose(), s.tol(), s.tol());
  MatrixXd null = detail::complement_basis(rows);
  return Subspace::from_orthonormal(w.basis() * null, s.tol());
}

// Null space of m as a subspace of R^{m.cols()}; singular values at or below
// the absolute threshold count as zero.
inline Subspace null_space(const MatrixXd& m, double threshold) {
  require(m.cols() > 0, ErrorKind::invalid_argument, "null_space: empty domain");
  if (m.rows() == 0) return Subspace::full(m.cols(), threshold);
  MatrixXd rows = detail::range_basis(m.transpose(), 0.0, threshold);
  return Subspace::from_orthonormal(detail::complement_basis(rows), threshold);
}

inline Subspace sum(const Subspace& a, const Subspace& b) {
  require(a.ambient_dim() == b.ambient_dim(), ErrorKind::dimension_mismatch, "sum: ambient mismatch");
  MatrixXd m(a.ambient_dim(), a.dim() + b.dim());
  m << a.basis(), b.basis();
  return Subspace::from_orthonormal(detail::range_basis(m, a.tol(), a.tol()), a.tol());
}

inline Subspace intersection(const Subspace& a, const Subspace& b) {
  require(a.ambient_dim() == b.ambient_dim(), ErrorKind::dimension_mismatch, "intersection: ambient mismatch");
  if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(a.ambient_dim(), a.tol());
  // x = A c lies in B iff (I - P_B) A c = 0
  MatrixXd r = a.basis() - b.project(a.basis());
  Svd f = svd(r, SvdVectors::none, SvdVectors::full);
  Index keep = 0;
  while (keep < f.s.size() && f.s(keep) > a.tol()) ++keep;
  MatrixXd c = f.v.rightCols(a.dim() - keep);
  // A orthonormal, so A c is orthonormal too; re-orthonormalize to scrub noise.
  MatrixXd x = a.basis() * c;
  if (x.cols() == 0) return Subspace::zero(a.ambient_dim(), a.tol());
  Eigen::HouseholderQR<MatrixXd> qr(x);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(x.rows(), x.cols());
  return Subspace::from_orthonormal(std::move(q), a.tol());
}

// Sine of the largest principal angle; 1 when dimensions differ.
inline double distance(const Subspace& a, const Subspace& b) {
  require(a.ambient_dim() == b.ambient_dim(), ErrorKind::dimension_mismatch, "distance: ambient mismatch");
  if (a.dim() != b.dim()) return 1.0;
  if (a.dim() == 0) return 0.0;
  double d1 = detail::spectral_norm(a.basis() - b.project(a.basis()));
  double d2 = detail::spectral_norm(b.basis() - a.project(b.basis()));
  return std::min(1.0, std::max(d1, d2));
}

// Image of a subspace under a matrix.
inline Subspace image(const MatrixXd& m, const Subspace& s, double tol = kDefaultTol) {
  require(m.cols() == s.ambient_dim(), ErrorKind::dimension_mismatch, "image: dimension mismatch");
  if (s.dim() == 0) return Subspace::zero(m.rows(), tol);
  return orthonormalize(m * s.basis(), tol);
}

// Block-diagonal embedding of x (in R^n0) and y (in R^n1) into R^{n0+n1}.
inline Subspace direct_sum(const Subspace& x, const Subspace& y) {
  MatrixXd b = MatrixXd::Zero(x.ambient_dim() + y.ambient_dim(), x.dim() + y.dim());
  b.topLeftCorner(x.ambient_dim(), x.dim()) = x.basis();
  b.bottomRightCorner(y.ambient_dim(), y.dim()) = y.basis();
  return Subspace::from_orthonormal(std::move(b), x.tol());
}

}  // namespace sharpspec::linrel
