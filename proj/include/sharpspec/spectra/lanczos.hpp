#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "sharpspec/core/eig_result.hpp"
#include "sharpspec/core/error.hpp"
#include "sharpspec/core/random.hpp"

namespace sharpspec::spectra {

enum class Which { largest_magnitude, largest_algebraic, smallest_algebraic };

struct LanczosOptions {
  int count = 6;
  double tol = 1e-8;  // relative to the largest |Ritz value|
  std::uint64_t seed = 42;
  int block = 4;
  int max_basis = 0;  // 0: 2 * count + 6 * block
  int max_restarts = 300;
  Which which = Which::largest_magnitude;
  double cluster_rel = 1e-6;
};

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct LanczosOutput {
  EigResult result;  // eigenvalues, residuals ||A v - theta v|| / max|theta|, clusters
  Mat<Scalar> vectors;  // aligned with result.eigenvalues
};

namespace detail {

template <class Scalar>
Mat<Scalar> random_block(Rng& rng, Eigen::Index n, Eigen::Index b) {
  if constexpr (std::is_same_v<Scalar, double>)
    return rng.gaussian(n, b);
  else
    return rng.complex_gaussian(n, b);
}

// Ordering of Ritz values by how much they are wanted.
inline std::vector<Eigen::Index> wanted_order(const Eigen::VectorXd& theta, Which which) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(theta.size()));
  std::iota(idx.begin(), idx.end(), 0);
  auto key = [&](Eigen::Index i) {
    switch (which) {
      case Which::largest_magnitude:
        return -std::abs(theta(i));
      case Which::largest_algebraic:
        return -theta(i);
      default:
        return theta(i);
    }
  };
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return key(a) < key(b); });
  return idx;
}

}  // namespace detail

// Block Lanczos with full reorthogonalization (classical Gram-Schmidt twice)
// and thick restart on Ritz vectors. `op` maps an n x b block to its image;
// `prepare` is applied to every random block before use (e.g. a projection
// onto an invariant subspace) and may be empty.
template <class Scalar>
LanczosOutput<Scalar> block_lanczos(const std::function<Mat<Scalar>(const Mat<Scalar>&)>& op, Eigen::Index n,
                                    const LanczosOptions& opt,
                                    const std::function<Mat<Scalar>(const Mat<Scalar>&)>& prepare = {}) {
  using Eigen::Index;
  using Real = double;
  require(opt.count >= 1, ErrorKind::invalid_argument, "lanczos: count must be >= 1");
  require(n >= 1, ErrorKind::invalid_argument, "lanczos: empty operator");
  const Index count = std::min<Index>(opt.count, n);
  const Index b = std::max<Index>(1, std::min<Index>(opt.block, n));
  Index m_max = opt.max_basis > 0 ? opt.max_basis : 2 * count + 6 * b;
  m_max = std::min<Index>(std::max<Index>(m_max, count + 2 * b), n);
  const Index keep_target = std::min<Index>(m_max - b, count + std::max<Index>(b, count / 2));

  Rng rng(opt.seed);
  auto fresh = [&](Index cols) {
    Mat<Scalar> x = detail::random_block<Scalar>(rng, n, cols);
    return prepare ? prepare(x) : x;
  };

  Mat<Scalar> q(n, m_max);
  Mat<Scalar> t = Mat<Scalar>::Zero(m_max, m_max);
  Index j = 0;  // columns in use
  int applications = 0;
  int iterations = 0;
  int restarts = 0;

  // Orthonormalizes block w against q(:, 0:j) and itself. Columns that vanish
  // are replaced by fresh random directions (with zero coupling).
  auto orthonormalize_block = [&](Mat<Scalar>& w, Mat<Scalar>& coupling) -> bool {
    const Index cols = w.cols();
    coupling = Mat<Scalar>::Zero(cols, cols);
    for (Index c = 0; c < cols; ++c) {
      Real before = w.col(c).norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (j > 0) w.col(c) -= q.leftCols(j) * (q.leftCols(j).adjoint() * w.col(c));
        for (Index l = 0; l < c; ++l) {
          Scalar r = w.col(l).dot(w.col(c));
          w.col(c) -= r * w.col(l);
          coupling(l, c) += r;
        }
      }
      Real nrm = w.col(c).norm();
      if (nrm > 1e-12 * std::max<Real>(before, 1e-300) && nrm > 1e-300) {
        coupling(c, c) = nrm;
        w.col(c) /= nrm;
        continue;
      }
      // breakdown: this direction is already in the basis
      if (j + c >= n) {
        if (c == 0) return false;
        w.conservativeResize(Eigen::NoChange, c);
        coupling = Mat<Scalar>(coupling.topRows(c));
        return true;
      }
      for (int attempt = 0; attempt < 5; ++attempt) {
        Mat<Scalar> r = fresh(1);
        for (int pass = 0; pass < 2; ++pass) {
          if (j > 0) r -= q.leftCols(j) * (q.leftCols(j).adjoint() * r);
          for (Index l = 0; l < c; ++l) r.col(0) -= w.col(l).dot(r.col(0)) * w.col(l);
        }
        Real rn = r.norm();
        if (rn > 1e-8) {
          w.col(c) = r.col(0) / rn;
          coupling(c, c) = 0;
          for (Index l = 0; l < c; ++l) coupling(l, c) = 0;
          break;
        }
        if (attempt == 4) return false;
      }
    }
    return true;
  };

  Mat<Scalar> v = fresh(b);
  {
    Mat<Scalar> dummy;
    require(orthonormalize_block(v, dummy), ErrorKind::not_converged, "lanczos: cannot build a starting block");
  }

  Eigen::VectorXd theta;
  Mat<Scalar> s;
  Mat<Scalar> coupling;  // B in A Q = Q T + V_next B E^T
  std::vector<Index> order;
  bool converged = false;
  bool exhausted = false;
  std::vector<Real> estimates;

  while (true) {
    const Index cols = std::min<Index>(v.cols(), m_max - j);
    q.middleCols(j, cols) = v.leftCols(cols);
    Mat<Scalar> w = op(q.middleCols(j, cols));
    applications += static_cast<int>(cols);
    ++iterations;
    const Index jn = j + cols;
    Mat<Scalar> h = q.leftCols(jn).adjoint() * w;
    w -= q.leftCols(jn) * h;
    Mat<Scalar> h2 = q.leftCols(jn).adjoint() * w;
    w -= q.leftCols(jn) * h2;
    h += h2;
    t.block(0, j, jn, cols) = h;
    t.block(j, 0, cols, jn) = h.adjoint();
    j = jn;

    Mat<Scalar> next = w;
    bool room = j < n;
    bool ok = room && orthonormalize_block(next, coupling);
    if (!ok) {
      coupling = Mat<Scalar>::Zero(cols, cols);
      exhausted = true;
    }

    // Ritz values of the current projection.
    Mat<Scalar> tj = t.topLeftCorner(j, j);
    tj = (0.5 * (tj + Mat<Scalar>(tj.adjoint()))).eval();
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(tj);
    theta = es.eigenvalues();
    s = es.eigenvectors();
    order = detail::wanted_order(theta, opt.which);
    Real scale = std::max<Real>(theta.cwiseAbs().maxCoeff(), 1e-300);
    estimates.assign(static_cast<std::size_t>(j), 0.0);
    for (Index i = 0; i < j; ++i)
      estimates[static_cast<std::size_t>(i)] = (coupling * s.block(j - cols, i, cols, 1)).norm();
    converged = j >= count;
    for (Index r = 0; r < std::min<Index>(count, j) && converged; ++r)
      if (estimates[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] > opt.tol * scale) converged = false;
    if (converged || exhausted) break;

    if (j + b > m_max && m_max < n) {
      if (restarts >= opt.max_restarts) break;
      ++restarts;
      const Index keep = std::min<Index>(keep_target, j);
      Mat<Scalar> sk(j, keep);
      Eigen::VectorXd tk(keep);
      for (Index r = 0; r < keep; ++r) {
        sk.col(r) = s.col(order[static_cast<std::size_t>(r)]);
        tk(r) = theta(order[static_cast<std::size_t>(r)]);
      }
      Mat<Scalar> y = q.leftCols(j) * sk;
      // re-orthonormalize against rounding drift
      Eigen::HouseholderQR<Mat<Scalar>> qr(y);
      Mat<Scalar> yq = qr.householderQ() * Mat<Scalar>::Identity(n, keep);
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sign = (yq.adjoint() * y).diagonal();
      for (Index r = 0; r < keep; ++r) {
        Scalar sg = std::abs(sign(r)) > 0 ? sign(r) / Scalar(std::abs(sign(r))) : Scalar(1);
        yq.col(r) *= sg;
      }
      q.leftCols(keep) = yq;
      t.setZero();
      for (Index r = 0; r < keep; ++r) t(r, r) = tk(r);
      j = keep;
      // the residual block is orthogonal to the old basis, hence to Y
      for (int pass = 0; pass < 2; ++pass) next -= q.leftCols(j) * (q.leftCols(j).adjoint() * next);
      Mat<Scalar> tmp;
      if (!orthonormalize_block(next, tmp)) {
        exhausted = true;
        break;
      }
    }
    v = next;
  }

  // Ritz vectors for the wanted values; residuals verified by applying op.
  const Index nwant = std::min<Index>(count, j);
  Mat<Scalar> sk(j, nwant);
  for (Index r = 0; r < nwant; ++r) sk.col(r) = s.col(order[static_cast<std::size_t>(r)]);
  Mat<Scalar> y = q.leftCols(j) * sk;
  Mat<Scalar> ay = op(y);
  applications += static_cast<int>(nwant);

  LanczosOutput<Scalar> out;
  EigResult& res = out.result;
  double scale = 0.0;
  for (Index r = 0; r < nwant; ++r) scale = std::max(scale, std::abs(theta(order[static_cast<std::size_t>(r)])));
  scale = std::max(scale, 1e-300);
  bool all_ok = true;
  std::vector<Index> kept;
  for (Index r = 0; r < nwant; ++r) {
    double th = theta(order[static_cast<std::size_t>(r)]);
    double yn = y.col(r).norm();
    double resid = (ay.col(r) - th * y.col(r)).norm() / (yn * scale);
    if (resid <= std::max(opt.tol, 1e-14) * 10) {
      res.eigenvalues.push_back(th);
      res.residuals.push_back(resid);
      kept.push_back(r);
    } else {
      res.unverified.push_back(th);
      all_ok = false;
    }
  }
  out.vectors.resize(n, static_cast<Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) out.vectors.col(static_cast<Index>(c)) = y.col(kept[c]);
  if constexpr (std::is_same_v<Scalar, double>) res.vectors = out.vectors;

  // align vectors with the ascending order produced by sort_and_cluster
  std::vector<std::size_t> perm(res.eigenvalues.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t c) { return res.eigenvalues[a] < res.eigenvalues[c]; });
  Mat<Scalar> sorted(n, static_cast<Index>(perm.size()));
  for (std::size_t c = 0; c < perm.size(); ++c) sorted.col(static_cast<Index>(c)) = out.vectors.col(static_cast<Index>(perm[c]));
  out.vectors = std::move(sorted);
  sort_and_cluster(res, opt.cluster_rel * scale);

  res.meta.solver = "block-lanczos";
  res.meta.iterations = iterations;
  res.meta.operator_applications = applications;
  res.meta.tol = opt.tol;
  res.meta.seed = opt.seed;
  res.meta.converged = converged && all_ok && static_cast<Index>(res.eigenvalues.size()) == count;
  if (!res.meta.converged)
    res.meta.note = exhausted ? "krylov space exhausted" : "iteration cap reached before convergence";
  res.meta.note += (res.meta.note.empty() ? "" : "; ") + std::string("restarts=") + std::to_string(restarts);
  return out;
}

}  // namespace sharpspec::spectra
