#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "sharpspec/core/random.hpp"
#include "sharpspec/cubical/betti.hpp"
#include "sharpspec/cubical/complex.hpp"
#include "sharpspec/spectra/torus.hpp"

namespace sharpspec::spectra {

using SparseMatrixD = Eigen::SparseMatrix<double>;

// Extension by zero of Ω cochains into torus fields. Faces carry an
// orientation sign: the cube spanned by axes {x, z} is bounded so that its
// coboundary is -(curl)_y.
struct Embedding {
  TorusGrid grid;
  std::vector<Index> vertex;  // Ω vertex -> torus scalar index
  std::vector<Index> edge;    // Ω edge -> torus edge index
  std::vector<Index> face;    // Ω face -> torus face index
  std::vector<int> face_sign;

  Index torus_fields() const { return 3 * grid.size(); }

  VectorXd extend_edges(const VectorXd& x) const {
    VectorXd y = VectorXd::Zero(torus_fields());
    for (std::size_t i = 0; i < edge.size(); ++i) y(edge[i]) = x(static_cast<Index>(i));
    return y;
  }
  VectorXd restrict_edges(const VectorXd& y) const {
    VectorXd x(static_cast<Index>(edge.size()));
    for (std::size_t i = 0; i < edge.size(); ++i) x(static_cast<Index>(i)) = y(edge[i]);
    return x;
  }
  VectorXd extend_faces(const VectorXd& x) const {
    VectorXd y = VectorXd::Zero(torus_fields());
    for (std::size_t i = 0; i < face.size(); ++i) y(face[i]) = face_sign[i] * x(static_cast<Index>(i));
    return y;
  }
  VectorXd restrict_faces(const VectorXd& y) const {
    VectorXd x(static_cast<Index>(face.size()));
    for (std::size_t i = 0; i < face.size(); ++i) x(static_cast<Index>(i)) = face_sign[i] * y(face[i]);
    return x;
  }
  SparseMatrixD edge_matrix() const { return selection(edge, nullptr); }
  SparseMatrixD face_matrix() const { return selection(face, &face_sign); }

 private:
  SparseMatrixD selection(const std::vector<Index>& idx, const std::vector<int>* sign) const {
    SparseMatrixD m(torus_fields(), static_cast<Index>(idx.size()));
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t i = 0; i < idx.size(); ++i)
      t.emplace_back(idx[i], static_cast<Index>(i), sign ? (*sign)[i] : 1.0);
    m.setFromTriplets(t.begin(), t.end());
    return m;
  }
};

inline int axis_of(unsigned mask) { return mask == 1u ? 0 : (mask == 2u ? 1 : 2); }

inline Embedding make_embedding(const cubical::CubicalComplex& c, const TorusGrid& g) {
  require(c.dim() == 3, ErrorKind::invalid_argument, "make_embedding: complex must be 3D");
  const auto& v = c.domain();
  for (int a = 0; a < 3; ++a) {
    int first = v.lo()[a] + g.offset[a];
    int last = v.hi()[a] - 1 + g.offset[a];
    require(first >= kTorusPadding && last <= g.n[a] - 1 - kTorusPadding, ErrorKind::precondition,
            "make_embedding: domain does not fit the torus with padding");
  }
  Embedding e;
  e.grid = g;
  const Index n = g.size();
  for (Index i = 0; i < c.count(0); ++i) e.vertex.push_back(g.embed(c.cell(0, i).anchor));
  for (Index i = 0; i < c.count(1); ++i) {
    cubical::CubeCell cell = c.cell(1, i);
    e.edge.push_back(axis_of(cell.axes) * n + g.embed(cell.anchor));
  }
  for (Index i = 0; i < c.count(2); ++i) {
    cubical::CubeCell cell = c.cell(2, i);
    int normal = axis_of(7u & ~cell.axes);
    e.face.push_back(normal * n + g.embed(cell.anchor));
    e.face_sign.push_back(normal == 1 ? -1 : 1);
  }
  return e;
}

struct CgResult {
  VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
};

// Jacobi-preconditioned CG for a symmetric positive semidefinite system with
// a consistent right-hand side; iterates are kept orthogonal to `deflate`
// (orthonormal vectors spanning the null space, possibly empty).
inline CgResult cg_solve(const SparseMatrixD& a, const VectorXd& b, const VectorXd& inv_diag,
                         const std::vector<VectorXd>& deflate, double rel_tol, int max_iter) {
  auto project = [&](VectorXd& v) {
    for (const auto& z : deflate) v -= z.dot(v) * z;
  };
  CgResult out;
  out.x = VectorXd::Zero(b.size());
  VectorXd r = b;
  project(r);
  double bnorm = r.norm();
  if (bnorm == 0.0) return out;
  VectorXd z = inv_diag.cwiseProduct(r);
  project(z);
  VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    VectorXd ap = a * p;
    double alpha = rz / p.dot(ap);
    out.x += alpha * p;
    r -= alpha * ap;
    out.iterations = it;
    out.relative_residual = r.norm() / bnorm;
    if (out.relative_residual <= rel_tol) {
      project(out.x);
      return out;
    }
    z = inv_diag.cwiseProduct(r);
    project(z);
    double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw Error(ErrorKind::not_converged, "cg_solve: no convergence within " + std::to_string(max_iter) +
                                            " iterations (relative residual " +
                                            std::to_string(out.relative_residual) + ")");
}

struct ProjectorOptions {
  double cg_tol = 1e-10;
  int max_iter = 20000;
  std::uint64_t seed = 42;
};

// Orthogonal projector of Ω edge fields (Euclidean inner product) onto
// ker(d1)^⊥: removes gradients by a CG solve with the vertex Laplacian and
// then deflates an orthonormal basis of discrete harmonic fields.
class ProjectorChain {
 public:
  ProjectorChain() = default;

  ProjectorChain(const cubical::CubicalComplex& c, const ProjectorOptions& opt) : opt_(opt) {
    require(c.dim() == 3, ErrorKind::invalid_argument, "omega_projector: complex must be 3D");
    d0_ = c.d(0).cast<double>();
    d1_ = c.d(1).cast<double>();
    lap_ = SparseMatrixD(d0_.transpose() * d0_);
    inv_diag_ = lap_.diagonal().cwiseInverse();
    face_lap_ = SparseMatrixD(d1_ * d1_.transpose());
    face_inv_diag_ = face_lap_.diagonal().cwiseInverse();

    // one normalized constant per connected component
    cubical::detail::UnionFind uf(static_cast<std::size_t>(c.count(0)));
    Eigen::SparseMatrix<int, Eigen::RowMajor> e = c.d(0);
    for (Index i = 0; i < e.rows(); ++i) {
      int first = -1;
      for (Eigen::SparseMatrix<int, Eigen::RowMajor>::InnerIterator it(e, i); it; ++it) {
        if (first < 0)
          first = static_cast<int>(it.col());
        else
          uf.unite(first, static_cast<int>(it.col()));
      }
    }
    std::vector<int> roots;
    for (int i = 0; i < static_cast<int>(c.count(0)); ++i)
      if (uf.find(i) == i) roots.push_back(i);
    for (int r : roots) {
      VectorXd z = VectorXd::Zero(c.count(0));
      for (int i = 0; i < static_cast<int>(c.count(0)); ++i)
        if (uf.find(i) == r) z(i) = 1.0;
      constants_.push_back(z.normalized());
    }

    std::vector<long> b = cubical::betti_euler(c);
    long b1 = b.size() > 1 ? b[1] : 0;
    harmonic_.resize(c.count(1), b1);
    if (b1 > 0) {
      Rng rng(opt.seed);
      for (long h = 0; h < b1; ++h) {
        VectorXd z = rng.gaussian(c.count(1));
        VectorXd rhs = d1_ * z;
        CgResult y = cg_solve(face_lap_, rhs, face_inv_diag_, {}, 0.1 * opt.cg_tol, opt.max_iter);
        z -= d1_.transpose() * y.x;
        z = remove_gradient(remove_gradient(z));
        for (long k = 0; k < h; ++k) z -= harmonic_.col(k).dot(z) * harmonic_.col(k);
        for (long k = 0; k < h; ++k) z -= harmonic_.col(k).dot(z) * harmonic_.col(k);
        harmonic_.col(h) = z.normalized();
      }
    }
  }

  Index dim() const { return d0_.rows(); }
  const Eigen::MatrixXd& harmonic_basis() const { return harmonic_; }
  const SparseMatrixD& d0() const { return d0_; }
  const SparseMatrixD& d1() const { return d1_; }
  long cg_iterations() const { return cg_iterations_; }

  VectorXd apply(const VectorXd& u) const {
    require(u.size() == dim(), ErrorKind::dimension_mismatch, "ProjectorChain: size mismatch");
    VectorXd v = remove_gradient(u);
    if (harmonic_.cols() > 0) v -= harmonic_ * (harmonic_.transpose() * v);
    return v;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& u) const {
    Eigen::MatrixXd out(u.rows(), u.cols());
    for (Index j = 0; j < u.cols(); ++j) out.col(j) = apply(VectorXd(u.col(j)));
    return out;
  }

 private:
  VectorXd remove_gradient(const VectorXd& u) const {
    VectorXd rhs = d0_.transpose() * u;
    CgResult phi = cg_solve(lap_, rhs, inv_diag_, constants_, 0.1 * opt_.cg_tol, opt_.max_iter);
    cg_iterations_ += phi.iterations;
    return u - d0_ * phi.x;
  }

  ProjectorOptions opt_;
  SparseMatrixD d0_, d1_, lap_, face_lap_;
  VectorXd inv_diag_, face_inv_diag_;
  std::vector<VectorXd> constants_;
  Eigen::MatrixXd harmonic_;
  mutable long cg_iterations_ = 0;
};

inline ProjectorChain omega_projector(const cubical::CubicalComplex& c, double cg_tol = 1e-10,
                                      std::uint64_t seed = 42) {
  ProjectorOptions opt;
  opt.cg_tol = cg_tol;
  opt.seed = seed;
  return ProjectorChain(c, opt);
}

}  // namespace sharpspec::spectra
