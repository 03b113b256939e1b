#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "sharpspec/core/eig_result.hpp"
#include "sharpspec/core/report.hpp"
#include "sharpspec/linrel/relation.hpp"

namespace sharpspec::linrel {

// A restricted to dom(A) ∩ ker(A)^⊥, viewed as a relation from ker(A)^⊥ to
// ran(A).
inline LinearRelation reduced(const LinearRelation& a) {
  RelationParts p = parts(a);
  require(p.mul.dim() == 0, ErrorKind::precondition, "reduced: relation is multivalued");
  Subspace source = complement_within(p.kernel, a.source());
  LinearRelation g = restrict_graph(a, source, Subspace::full(a.dim_h1(), a.tol()));
  return LinearRelation(g.graph(), std::move(source), std::move(p.range));
}

// Square matrix of a functional relation in the orthonormal coordinates of
// its source and target spaces.
inline MatrixXd coordinate_matrix(const LinearRelation& a) {
  MatrixXd m = operator_matrix(a);
  return a.target().basis().transpose() * m * a.source().basis();
}

// Eigenpairs of Q^T A Q that are verified as eigenpairs of A itself:
// ||A(Qv) - λ Qv|| <= tol ||Qv||. Failing candidates go to `unverified`.
// With `selfadjoint` the compression is symmetrized before the solve; the
// residual check still uses A itself.
inline EigResult point_spectrum(const LinearRelation& a, const Subspace& dom, double tol, bool selfadjoint = false) {
  require(a.dim_h0() == a.dim_h1(), ErrorKind::dimension_mismatch, "point_spectrum: relation is not square");
  require(dom.ambient_dim() == a.dim_h0(), ErrorKind::dimension_mismatch, "point_spectrum: domain ambient mismatch");
  EigResult out;
  out.meta.solver = "dense-compression";
  out.meta.tol = tol;
  if (dom.dim() == 0) return out;
  RelationParts p = parts(a);
  require(p.mul.dim() == 0, ErrorKind::precondition, "point_spectrum: relation is multivalued");
  require(p.domain.excess(dom.basis()) <= std::sqrt(a.tol()), ErrorKind::precondition,
          "point_spectrum: restriction leaves the domain");
  MatrixXd m = operator_matrix(a);
  const MatrixXd& q = dom.basis();
  MatrixXd mq = m * q;
  MatrixXd c = q.transpose() * mq;
  double scale = std::max(1.0, c.norm());
  std::vector<double> vals;
  MatrixXd vecs;
  if (selfadjoint || (c - c.transpose()).norm() <= 1e-12 * scale) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (c + c.transpose()));
    vals.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    vecs = es.eigenvectors();
  } else {
    Eigen::EigenSolver<MatrixXd> es(c);
    vecs.resize(c.rows(), 0);
    for (Index i = 0; i < c.rows(); ++i) {
      std::complex<double> ev = es.eigenvalues()(i);
      if (std::abs(ev.imag()) > tol * scale) {
        out.unverified.push_back(ev.real());
        continue;
      }
      VectorXd v = es.eigenvectors().col(i).real();
      if (v.norm() == 0.0) v = es.eigenvectors().col(i).imag();
      vals.push_back(ev.real());
      vecs.conservativeResize(Eigen::NoChange, vecs.cols() + 1);
      vecs.col(vecs.cols() - 1) = v.normalized();
    }
  }
  std::vector<double> keep_vals, keep_res;
  std::vector<Index> keep_cols;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    VectorXd x = q * vecs.col(static_cast<Index>(i));
    double res = (m * x - vals[i] * x).norm() / x.norm();
    if (res <= tol) {
      keep_vals.push_back(vals[i]);
      keep_res.push_back(res);
      keep_cols.push_back(static_cast<Index>(i));
    } else {
      out.unverified.push_back(vals[i]);
    }
  }
  out.eigenvalues = keep_vals;
  out.residuals = keep_res;
  out.vectors.resize(a.dim_h0(), static_cast<Index>(keep_cols.size()));
  for (std::size_t j = 0; j < keep_cols.size(); ++j) out.vectors.col(static_cast<Index>(j)) = q * vecs.col(keep_cols[j]);
  out.meta.converged = out.unverified.empty();
  sort_and_cluster(out, 1e-8 * scale);
  return out;
}

namespace detail {

// Nonzero entries of a clustered spectrum, as (value, multiplicity).
inline std::vector<std::pair<double, int>> nonzero_clusters(const EigResult& r, double zero_tol) {
  std::vector<std::pair<double, int>> out;
  for (const auto& c : cluster_summary(r))
    if (std::abs(c.first) > zero_tol) out.push_back(c);
  return out;
}

}  // namespace detail

inline Report verify_reduction_identities(const LinearRelation& a, double tol) {
  Report rep;
  rep.suite = "linrel";
  RelationParts p = parts(a);
  require(p.mul.dim() == 0, ErrorKind::precondition, "verify_reduction_identities: relation is multivalued");
  require(p.domain.dim() == a.dim_h0(), ErrorKind::precondition,
          "verify_reduction_identities: operator must have full domain");

  LinearRelation adj = adjoint(a);
  LinearRelation red = reduced(a);
  rep.add("P2.2", "adjoint of reduced equals reduced of adjoint (subspace distance)",
          graph_distance(adjoint(red), reduced(adj)), tol);

  MatrixXd m = operator_matrix(a);
  VectorXd s = singular_values(m);
  double smax = s.size() ? s(0) : 0.0;
  double scale = std::max(1.0, smax);
  double gap = 0.0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * scale) gap = s(i);

  MatrixXd mr = coordinate_matrix(red);
  double red_min = 0.0;
  if (mr.size() > 0) {
    VectorXd rs = singular_values(mr);
    red_min = rs(rs.size() - 1);
  }
  bool square = mr.rows() == mr.cols();
  rep.add("P2.1", "reduced operator is invertible with inverse norm 1/gap",
          square ? std::abs(red_min - gap) : 1.0, tol * scale);
  rep.add("C2.3", "rank(A) = rank(A*)",
          std::abs(static_cast<double>(p.range.dim() - parts(adj).range.dim())), 0.0);

  if (a.dim_h0() == a.dim_h1() && (m - m.transpose()).norm() <= tol * scale) {
    double spec_tol = std::max(tol, 1e-9) * scale;
    EigResult full = point_spectrum(a, Subspace::full(a.dim_h0(), a.tol()), spec_tol);
    LinearRelation sq = with_spaces(red.graph().dim() ? red : a, Subspace::full(a.dim_h0()), Subspace::full(a.dim_h0()));
    EigResult part = point_spectrum(sq, red.source(), spec_tol);
    auto x = detail::nonzero_clusters(full, 1e-8 * scale);
    auto y = detail::nonzero_clusters(part, 1e-8 * scale);
    double worst = 0.0;
    if (x.size() != y.size()) {
      worst = std::numeric_limits<double>::infinity();
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].second != y[i].second) worst = std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::abs(x[i].first - y[i].first));
      }
    }
    rep.add("P2.4", "nonzero spectrum of A equals that of A_red (multisets, 1e-8 clusters)", worst, 1e-8 * scale);
  }
  rep.add_diagnostic("C2.5-gap", "smallest nonzero singular value", gap);
  return rep;
}

}  // namespace sharpspec::linrel
