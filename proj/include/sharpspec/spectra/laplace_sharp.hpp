#pragma once

#include <cmath>

#include "sharpspec/cubical/mimetic.hpp"
#include "sharpspec/linrel/sharp.hpp"

namespace sharpspec::spectra {

inline constexpr Eigen::Index kDense1dNodes = 1024;
inline constexpr Eigen::Index kDense2dCells = 24 * 24;

struct DenseSharp {
  cubical::MimeticPair mimetic;
  linrel::SharpPair sharp;
  Eigen::VectorXd sqrt_weights;  // coordinates are x_w = sqrt(w) x
};

inline DenseSharp dense_grad_sharp(const cubical::VoxelDomain& v, double tol) {
  require(v.dim() == 1 || v.dim() == 2, ErrorKind::invalid_argument, "dense sharp route needs a 1D or 2D domain");
  if (v.dim() == 1)
    require(static_cast<Eigen::Index>(v.size()) + 1 <= kDense1dNodes, ErrorKind::size_limit,
            "dense sharp route: more than 1024 nodes");
  else
    require(static_cast<Eigen::Index>(v.size()) <= kDense2dCells, ErrorKind::size_limit,
            "dense sharp route: more than 24^2 cells");
  DenseSharp d;
  cubical::CubicalComplex c = cubical::build_complex(v);
  d.mimetic = cubical::mimetic_pair(c, 0);
  d.sharp = linrel::sharp(cubical::to_dense_pair(d.mimetic, cubical::Weighting::hodge, tol));
  d.sqrt_weights = d.mimetic.w_source.cwiseSqrt();
  return d;
}

// Spectrum of div# grad# = B# A#, compressed to dom(A#), in Hodge-weighted
// coordinates. Includes the kernel.
inline EigResult laplace_sharp_eigs(const DenseSharp& d, double tol) {
  const linrel::LinearRelation& as = d.sharp.a_sharp;
  linrel::LinearRelation bs = linrel::dual_sharp(d.sharp);
  linrel::LinearRelation c = linrel::compose(bs, as);
  linrel::Subspace dom = linrel::parts(as).domain;
  linrel::LinearRelation cd =
      linrel::restrict_graph(c, linrel::Subspace::full(c.dim_h0(), c.tol()), dom);
  Eigen::VectorXd sv = singular_values(linrel::operator_matrix(d.sharp.pair.a));
  double scale = std::max(1.0, sv.size() ? sv(0) : 0.0);
  EigResult r = linrel::point_spectrum(cd, dom, tol * scale * scale, true);
  r.meta.solver = "dense-relation";
  return r;
}

inline EigResult laplace_sharp_eigs(const cubical::VoxelDomain& v, double tol = 1e-9) {
  return laplace_sharp_eigs(dense_grad_sharp(v, tol * 1e-1), tol);
}

// Singular values of grad#_red (ascending): the spectrum of |∂#|.
inline Eigen::VectorXd grad_sharp_singular_values(const DenseSharp& d) {
  linrel::LinearRelation red = linrel::reduced(d.sharp.a_sharp);
  Eigen::MatrixXd m = linrel::coordinate_matrix(red);
  Eigen::VectorXd s = singular_values(m);
  return s.reverse();
}

// ∂# on the interval is skew; its spectrum is reported through ±σ pairs of
// singular values: a cluster of multiplicity m contributes floor(m/2) pairs
// and one +σ when m is odd.
inline EigResult d_sharp_1d(const cubical::VoxelDomain& v, double tol = 1e-9) {
  require(v.dim() == 1, ErrorKind::invalid_argument, "d-sharp-1d needs a 1D domain");
  DenseSharp d = dense_grad_sharp(v, tol * 1e-1);
  Eigen::VectorXd s = grad_sharp_singular_values(d);
  double scale = s.size() ? s.maxCoeff() : 1.0;
  EigResult r;
  r.meta.solver = "dense-relation-svd";
  r.meta.tol = tol;
  std::size_t i = 0;
  const auto n = static_cast<std::size_t>(s.size());
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && s(static_cast<Eigen::Index>(j)) - s(static_cast<Eigen::Index>(j - 1)) <= 1e-8 * scale) ++j;
    std::size_t m = j - i;
    double sigma = s(static_cast<Eigen::Index>(i));
    for (std::size_t k = 0; k < m / 2; ++k) {
      r.eigenvalues.push_back(-sigma);
      r.eigenvalues.push_back(sigma);
    }
    if (m % 2 == 1) r.eigenvalues.push_back(sigma);
    i = j;
  }
  r.residuals.assign(r.eigenvalues.size(), 0.0);
  sort_and_cluster(r, 1e-8 * scale);
  return r;
}

}  // namespace sharpspec::spectra
