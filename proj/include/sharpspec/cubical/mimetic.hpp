#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "sharpspec/cubical/complex.hpp"
#include "sharpspec/linrel/sharp.hpp"

namespace sharpspec::cubical {

using Eigen::Index;
using Eigen::VectorXd;
using SparseMatrixD = Eigen::SparseMatrix<double>;

// The operator pair for d_k: `full` acts on all k-cochains, the minimal
// operator on cochains that vanish on the boundary subcomplex, extended by
// zero. Values are point values, so full = d_k / h.
struct MimeticPair {
  int k = 0;
  int dim = 0;
  double h = 0.0;
  SparseMatrixD full;
  std::vector<Index> source_rel;  // interior k-cells
  std::vector<Index> target_rel;  // interior (k+1)-cells
  VectorXd w_source;              // lumped Hodge weights on k-cells
  VectorXd w_target;              // lumped Hodge weights on (k+1)-cells
};

// h^d times the fraction of the cell's 2^(d-k) neighbouring voxels inside Ω.
inline VectorXd hodge_weights(const CubicalComplex& c, int k) {
  const auto& adj = c.adjacent_voxels(k);
  VectorXd w(static_cast<Index>(adj.size()));
  double vol = std::pow(c.h(), c.dim());
  double denom = static_cast<double>(1 << (c.dim() - k));
  for (std::size_t i = 0; i < adj.size(); ++i) w(static_cast<Index>(i)) = vol * adj[i] / denom;
  return w;
}

inline MimeticPair mimetic_pair(const CubicalComplex& c, int k) {
  require(k >= 0 && k < c.dim(), ErrorKind::invalid_argument, "mimetic_pair: degree must satisfy 0 <= k < d");
  MimeticPair m;
  m.k = k;
  m.dim = c.dim();
  m.h = c.h();
  m.full = c.d(k).cast<double>() / c.h();
  m.source_rel = c.interior(k);
  m.target_rel = c.interior(k + 1);
  m.w_source = hodge_weights(c, k);
  m.w_target = hodge_weights(c, k + 1);
  return m;
}

// Extension by zero from relative DOFs to all DOFs.
inline SparseMatrixD extension(Index n_full, const std::vector<Index>& rel) {
  SparseMatrixD e(n_full, static_cast<Index>(rel.size()));
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(rel.size());
  for (std::size_t j = 0; j < rel.size(); ++j) t.emplace_back(rel[j], static_cast<Index>(j), 1.0);
  e.setFromTriplets(t.begin(), t.end());
  return e;
}

// d_k on relative cochains, in relative coordinates on both sides.
inline SparseMatrixD relative_matrix(const MimeticPair& m) {
  SparseMatrixD et = extension(m.full.rows(), m.target_rel).transpose();
  return SparseMatrixD(et * m.full * extension(m.full.cols(), m.source_rel));
}

// max |ι d_rel x - d_full ι x| over the columns of d_rel, i.e. entrywise.
inline double intertwining_defect(const MimeticPair& m) {
  SparseMatrixD lhs = extension(m.full.rows(), m.target_rel) * relative_matrix(m);
  SparseMatrixD rhs = m.full * extension(m.full.cols(), m.source_rel);
  SparseMatrixD diff = lhs - rhs;
  double worst = 0.0;
  for (Index j = 0; j < diff.outerSize(); ++j)
    for (SparseMatrixD::InnerIterator it(diff, j); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

// |<d_rel x, y>_w + <x, δ y>_w| / (|x|_w |y|_w) for δ = -W_k^{-1} d_full^T W_{k+1}.
inline double duality_residual(const MimeticPair& m, const VectorXd& x_rel, const VectorXd& y_full) {
  SparseMatrixD ex = extension(m.full.cols(), m.source_rel);
  VectorXd x = ex * x_rel;
  VectorXd dx = m.full * x;
  VectorXd wy = m.w_target.cwiseProduct(y_full);
  VectorXd delta_y = -(VectorXd(m.full.transpose() * wy)).cwiseQuotient(m.w_source);
  double lhs = dx.dot(wy);
  double rhs = x.dot(m.w_source.cwiseProduct(delta_y));
  double nx = std::sqrt(x.dot(m.w_source.cwiseProduct(x)));
  double ny = std::sqrt(y_full.dot(wy));
  double scale = std::max(1e-300, nx * ny / m.h);
  return std::abs(lhs + rhs) / scale;
}

enum class Weighting { euclidean, hodge };

inline constexpr Index kDenseDofLimit = 4000;

// Dense relation pair in R^{n_k} x R^{n_{k+1}}. With Hodge weighting the
// coordinates are W^{1/2} x so that the Euclidean inner product is the
// weighted one; the matrix becomes W_{k+1}^{1/2} M W_k^{-1/2}.
inline linrel::OperatorPair to_dense_pair(const MimeticPair& m, Weighting weighting = Weighting::euclidean,
                                          double tol = linrel::kDefaultTol) {
  const Index n0 = m.full.cols(), n1 = m.full.rows();
  require(n0 + n1 <= kDenseDofLimit, ErrorKind::size_limit, "to_dense_pair: more than 4000 DOFs");
  Eigen::MatrixXd a = Eigen::MatrixXd(m.full);
  if (weighting == Weighting::hodge) {
    VectorXd s0 = m.w_source.cwiseSqrt().cwiseInverse();
    VectorXd s1 = m.w_target.cwiseSqrt();
    a = s1.asDiagonal() * a * s0.asDiagonal();
  }
  linrel::Subspace rel = linrel::Subspace::coordinate(n0, m.source_rel, tol);
  return linrel::OperatorPair{linrel::LinearRelation::restricted(a, rel, tol), linrel::LinearRelation::from_matrix(a, tol)};
}

}  // namespace sharpspec::cubical
