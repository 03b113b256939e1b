#pragma once

#include <cmath>

#include "sharpspec/linrel/reduction.hpp"

namespace sharpspec::linrel {

struct OperatorPair {
  LinearRelation a0;  // minimal operator
  LinearRelation a;   // maximal operator
};

struct SharpPair {
  OperatorPair pair;
  LinearRelation b_rel;  // -adjoint(a0), multivalued in general
  Subspace ker_b;
  LinearRelation a_sharp;
};

// Pairs (x, y) of r with y orthogonal to `forbidden`.
inline LinearRelation sharp_restriction(const LinearRelation& r, const Subspace& forbidden) {
  return restrict_graph(r, Subspace::full(r.dim_h0(), r.tol()), complement(forbidden));
}

namespace detail {

inline SharpPair sharp_unchecked(const OperatorPair& pair) {
  SharpPair sp;
  sp.pair = pair;
  sp.b_rel = negate(adjoint(pair.a0));
  sp.ker_b = parts(sp.b_rel).kernel;
  sp.a_sharp = sharp_restriction(pair.a, sp.ker_b);
  return sp;
}

}  // namespace detail

inline SharpPair sharp(const OperatorPair& pair) {
  const LinearRelation& a0 = pair.a0;
  const LinearRelation& a = pair.a;
  require(a0.dim_h0() == a.dim_h0() && a0.dim_h1() == a.dim_h1(), ErrorKind::dimension_mismatch,
          "sharp: A0 and A live on different spaces");
  require(is_functional(a0) && is_functional(a), ErrorKind::precondition, "sharp: A0 and A must be functional");
  require(inclusion_excess(a0, a) <= 100 * a.tol(), ErrorKind::precondition,
          "sharp: graph(A0) is not contained in graph(A)");
  return detail::sharp_unchecked(pair);
}

// The dual construction: with B0 := -adjoint(A) and B := -adjoint(A0),
// B# keeps the pairs (y, z) of B with z ⊥ ker(A).
inline LinearRelation dual_sharp(const SharpPair& sp) {
  return sharp_restriction(sp.b_rel, parts(sp.pair.a).kernel);
}

// {x : (x, x) in r} for a square relation.
inline Subspace fixed_points(const LinearRelation& r) {
  const Index n = r.dim_h0();
  if (r.graph().dim() == 0) return Subspace::zero(n, r.tol());
  MatrixXd diff = r.h0_block() - r.h1_block();
  Subspace c = null_space(diff, r.tol());
  if (c.dim() == 0) return Subspace::zero(n, r.tol());
  return orthonormalize(MatrixXd(r.h0_block() * c.basis()), r.tol(), r.tol());
}

inline Report verify_sharp_identities(const SharpPair& sp, double tol) {
  Report rep;
  rep.suite = "linrel";
  const LinearRelation& a = sp.pair.a;
  const LinearRelation& a0 = sp.pair.a0;
  const LinearRelation& as = sp.a_sharp;
  RelationParts pa = parts(a), pa0 = parts(a0), ps = parts(as);

  rep.add("T3.9-fd", "dom(A#) = ker(A) + dom(A0) (subspace distance)",
          distance(ps.domain, sum(pa.kernel, pa0.domain)), tol);
  rep.add("R3.2-incl", "graph(A0) ⊆ graph(A#) ⊆ graph(A)",
          std::max(inclusion_excess(a0, as), inclusion_excess(as, a)), tol);

  // <A# x, y> + <x, B0 y> over graph bases of A# and B0 = -adjoint(A).
  LinearRelation b0 = negate(adjoint(a));
  double pairing = 0.0;
  if (as.graph().dim() > 0 && b0.graph().dim() > 0) {
    MatrixXd m = as.h1_block().transpose() * b0.h0_block() + as.h0_block().transpose() * b0.h1_block();
    pairing = m.cwiseAbs().maxCoeff();
  }
  rep.add("P3.5-pairing", "<A#x, y> = -<x, B0 y> on graph bases", pairing, 1e-12);

  // A restricted to ker(A) + dom(A0) has the same kernel and range as A#,
  // and then its domain must be all of dom(A#).
  LinearRelation tilde = restrict_graph(a, sum(pa.kernel, pa0.domain), Subspace::full(a.dim_h1(), a.tol()));
  RelationParts pt = parts(tilde);
  double t38 = std::max({distance(pt.kernel, ps.kernel), distance(pt.range, ps.range),
                         distance(pt.domain, ps.domain)});
  rep.add("T3.8-fd", "restriction with ker/ran of A# has dom(A#)", t38, tol);

  LinearRelation bs = dual_sharp(sp);
  rep.add("T3.9-adj", "A# = -adjoint(B#) (graph distance)", graph_distance(as, negate(adjoint(bs))), tol);

  rep.add_diagnostic("P3.6-diag", "dim ker(1 - B#A#)", static_cast<double>(fixed_points(compose(bs, as)).dim()));
  return rep;
}

struct KreinResult {
  LinearRelation a_sharp;
  Report report;
};

// S_pair.a0 is a symmetric, strictly positive operator S on a restricted
// domain; S_pair.a is an operator expression of the maximal operator, which
// must be a selection of S*. The maximal operator itself is the relation S*.
inline KreinResult krein_sharp(const OperatorPair& s_pair, double tol) {
  const LinearRelation& s = s_pair.a0;
  require(s.dim_h0() == s.dim_h1(), ErrorKind::dimension_mismatch, "krein_sharp: S must be square");
  require(is_functional(s), ErrorKind::precondition, "krein_sharp: S must be functional");
  LinearRelation s_star = adjoint(s);
  require(inclusion_excess(s, s_star) <= tol, ErrorKind::precondition, "krein_sharp: S is not symmetric");
  require(inclusion_excess(s_pair.a, s_star) <= tol, ErrorKind::precondition,
          "krein_sharp: maximal operator is not a selection of S*");
  RelationParts ps = parts(s);
  if (ps.domain.dim() > 0) {
    MatrixXd m = operator_matrix(s);
    MatrixXd c = ps.domain.basis().transpose() * m * ps.domain.basis();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (c + c.transpose()), Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() > tol * std::max(1.0, c.norm()), ErrorKind::precondition,
            "krein_sharp: S is not strictly positive");
  }

  OperatorPair pair{s, s_star};
  SharpPair sp = detail::sharp_unchecked(pair);
  KreinResult out;
  out.a_sharp = sp.a_sharp;
  Report& rep = out.report;
  rep.suite = "linrel";

  RelationParts pk = parts(sp.a_sharp);
  rep.add("KvN-func", "A# is single valued (dim mul)", static_cast<double>(pk.mul.dim()), 0.0);
  rep.add("KvN-sym", "A# equals its adjoint (graph distance)", graph_distance(sp.a_sharp, adjoint(sp.a_sharp)), tol);
  RelationParts pstar = parts(s_star);
  rep.add("KvN-ker", "dim ker(A#) = dim ker(A)",
          std::abs(static_cast<double>(pk.kernel.dim() - pstar.kernel.dim())), 0.0);
  double min_eig = 0.0;
  if (pk.mul.dim() == 0 && pk.domain.dim() > 0) {
    MatrixXd m = operator_matrix(sp.a_sharp);
    MatrixXd c = pk.domain.basis().transpose() * m * pk.domain.basis();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (c + c.transpose()), Eigen::EigenvaluesOnly);
    min_eig = es.eigenvalues().minCoeff();
    rep.add("KvN-pos", "A# >= 0 (negative part of smallest eigenvalue)", std::max(0.0, -min_eig),
            tol * std::max(1.0, c.norm()));
  } else {
    rep.add_flag("KvN-pos", "A# >= 0", false);
  }
  return out;
}

}  // namespace sharpspec::linrel
