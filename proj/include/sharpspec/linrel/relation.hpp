#pragma once

#include <algorithm>

#include "sharpspec/linrel/subspace.hpp"

namespace sharpspec::linrel {

// A linear relation G ⊆ H0 ⊕ H1 with H0 = R^{n0}, H1 = R^{n1}. The graph basis
// stacks the H0 part on top of the H1 part. A relation may live inside
// subspaces X ⊆ H0 and Y ⊆ H1 (its source and target Hilbert spaces); the
// adjoint is then taken with respect to X and Y.
class LinearRelation {
 public:
  LinearRelation() = default;

  LinearRelation(Subspace graph, Index dim_h0, Index dim_h1)
      : graph_(std::move(graph)),
        source_(Subspace::full(dim_h0, graph_.tol())),
        target_(Subspace::full(dim_h1, graph_.tol())) {
    require(graph_.ambient_dim() == dim_h0 + dim_h1, ErrorKind::dimension_mismatch,
            "LinearRelation: graph ambient dimension must be dim_h0 + dim_h1");
  }

  LinearRelation(Subspace graph, Subspace source, Subspace target)
      : graph_(std::move(graph)), source_(std::move(source)), target_(std::move(target)) {
    require(graph_.ambient_dim() == source_.ambient_dim() + target_.ambient_dim(), ErrorKind::dimension_mismatch,
            "LinearRelation: graph ambient dimension must be dim_h0 + dim_h1");
  }

  // Graph of a matrix m : R^{cols} -> R^{rows} on its full domain.
  static LinearRelation from_matrix(const MatrixXd& m, double tol = kDefaultTol) {
    return restricted(m, Subspace::full(m.cols(), tol), tol);
  }

  // Graph of m restricted to the subspace d.
  static LinearRelation restricted(const MatrixXd& m, const Subspace& d, double tol = kDefaultTol) {
    require(d.ambient_dim() == m.cols(), ErrorKind::dimension_mismatch, "restricted: domain dimension mismatch");
    MatrixXd g(m.cols() + m.rows(), d.dim());
    g << d.basis(), m * d.basis();
    Index n0 = m.cols(), n1 = m.rows();
    if (d.dim() == 0) return LinearRelation(Subspace::zero(n0 + n1, tol), n0, n1);
    return LinearRelation(orthonormalize(g, tol), n0, n1);
  }

  Index dim_h0() const { return source_.ambient_dim(); }
  Index dim_h1() const { return target_.ambient_dim(); }
  double tol() const { return graph_.tol(); }
  const Subspace& graph() const { return graph_; }
  const Subspace& source() const { return source_; }
  const Subspace& target() const { return target_; }

  auto h0_block() const { return graph_.basis().topRows(dim_h0()); }
  auto h1_block() const { return graph_.basis().bottomRows(dim_h1()); }

 private:
  Subspace graph_;
  Subspace source_;
  Subspace target_;
};

struct RelationParts {
  Subspace kernel;
  Subspace range;
  Subspace domain;
  Subspace mul;
};

inline RelationParts parts(const LinearRelation& r) {
  const double tol = r.tol();
  const Index n0 = r.dim_h0(), n1 = r.dim_h1();
  RelationParts p;
  if (r.graph().dim() == 0) {
    p.kernel = p.domain = Subspace::zero(n0, tol);
    p.range = p.mul = Subspace::zero(n1, tol);
    return p;
  }
  MatrixXd u = r.h0_block(), v = r.h1_block();
  // [U;V] has orthonormal columns, so U c with V c = 0 is already orthonormal.
  Subspace nv = null_space(v, tol);
  Subspace nu = null_space(u, tol);
  p.kernel = Subspace::from_orthonormal(u * nv.basis(), tol);
  p.mul = Subspace::from_orthonormal(v * nu.basis(), tol);
  p.domain = orthonormalize(u, tol, tol);
  p.range = orthonormalize(v, tol, tol);
  return p;
}

inline bool is_functional(const LinearRelation& r) { return parts(r).mul.dim() == 0; }

// The relation {(u, -v)}.
inline LinearRelation negate(const LinearRelation& r) {
  MatrixXd g = r.graph().basis();
  g.bottomRows(r.dim_h1()) *= -1.0;
  return LinearRelation(Subspace::from_orthonormal(std::move(g), r.tol()), r.source(), r.target());
}

// {(y, z) in Y ⊕ X : <v, y> = <u, z> for all (u, v) in G}, computed as the
// complement of J G inside Y ⊕ X with J(u, v) = (-v, u).
inline LinearRelation adjoint(const LinearRelation& r) {
  const Index n0 = r.dim_h0(), n1 = r.dim_h1();
  MatrixXd jg(n1 + n0, r.graph().dim());
  jg << -r.h1_block(), r.h0_block();
  Subspace rotated = Subspace::from_orthonormal(std::move(jg), r.tol());
  Subspace w = direct_sum(r.target(), r.source());
  return LinearRelation(complement_within(rotated, w), r.target(), r.source());
}

// Matrix that agrees with a functional relation on its domain and vanishes on
// the orthogonal complement of the domain.
inline MatrixXd operator_matrix(const LinearRelation& r) {
  require(is_functional(r), ErrorKind::precondition, "operator_matrix: relation is multivalued");
  if (r.graph().dim() == 0) return MatrixXd::Zero(r.dim_h1(), r.dim_h0());
  MatrixXd u = r.h0_block(), v = r.h1_block();
  Svd f = svd(u, SvdVectors::thin, SvdVectors::thin);
  Index k = 0;
  while (k < f.s.size() && f.s(k) > r.tol()) ++k;
  MatrixXd pinv = f.v.leftCols(k) * f.s.head(k).cwiseInverse().asDiagonal() * f.u.leftCols(k).transpose();
  return v * pinv;
}

// S ∘ R = {(x, z) : (x, y) in R, (y, z) in S for some y}.
inline LinearRelation compose(const LinearRelation& s, const LinearRelation& r) {
  require(r.dim_h1() == s.dim_h0(), ErrorKind::dimension_mismatch, "compose: middle dimension mismatch");
  const double tol = r.tol();
  const Index n0 = r.dim_h0(), n2 = s.dim_h1();
  const Index kr = r.graph().dim(), ks = s.graph().dim();
  if (kr == 0 || ks == 0) return LinearRelation(Subspace::zero(n0 + n2, tol), r.source(), s.target());
  MatrixXd link(r.dim_h1(), kr + ks);
  link << r.h1_block(), -s.h0_block();
  Subspace ab = null_space(link, tol);
  if (ab.dim() == 0) return LinearRelation(Subspace::zero(n0 + n2, tol), r.source(), s.target());
  MatrixXd g(n0 + n2, ab.dim());
  g << r.h0_block() * ab.basis().topRows(kr), s.h1_block() * ab.basis().bottomRows(ks);
  return LinearRelation(orthonormalize(g, tol, tol), r.source(), s.target());
}

// Graph restricted to pairs (x, y) with x in a, y in b.
inline LinearRelation restrict_graph(const LinearRelation& r, const Subspace& a, const Subspace& b) {
  Subspace g = intersection(r.graph(), direct_sum(a, b));
  return LinearRelation(std::move(g), r.source(), r.target());
}

// Same graph, but viewed as a relation between the given Hilbert subspaces.
inline LinearRelation with_spaces(const LinearRelation& r, Subspace source, Subspace target) {
  return LinearRelation(r.graph(), std::move(source), std::move(target));
}

// Spectral norm of the part of graph(a) that sticks out of graph(b).
inline double inclusion_excess(const LinearRelation& a, const LinearRelation& b) {
  require(a.graph().ambient_dim() == b.graph().ambient_dim(), ErrorKind::dimension_mismatch,
          "inclusion_excess: ambient mismatch");
  if (a.graph().dim() == 0) return 0.0;
  return b.graph().excess(a.graph().basis());
}

inline double graph_distance(const LinearRelation& a, const LinearRelation& b) {
  return distance(a.graph(), b.graph());
}

}  // namespace sharpspec::linrel
