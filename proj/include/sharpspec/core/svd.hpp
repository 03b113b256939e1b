#pragma once

#include <algorithm>
#include <string>

#include <Eigen/Dense>
#include <lapacke.h>

#include "sharpspec/core/error.hpp"

namespace sharpspec {

// Thin wrapper over LAPACK dgesvd. Eigen 3.4.0's divide-and-conquer SVD
// mis-deflates clustered singular values, so all rank decisions go here.
struct Svd {
  Eigen::VectorXd s;  // descending
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;  // right singular vectors as columns
};

enum class SvdVectors { none, thin, full };

inline Svd svd(const Eigen::MatrixXd& a, SvdVectors left, SvdVectors right) {
  const lapack_int m = static_cast<lapack_int>(a.rows()), n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  Svd out;
  out.s.resize(k);
  if (k == 0) {
    out.u = left == SvdVectors::full ? Eigen::MatrixXd::Identity(m, m) : Eigen::MatrixXd(m, 0);
    out.v = right == SvdVectors::full ? Eigen::MatrixXd::Identity(n, n) : Eigen::MatrixXd(n, 0);
    return out;
  }
  auto job = [](SvdVectors w) { return w == SvdVectors::none ? 'N' : (w == SvdVectors::thin ? 'S' : 'A'); };
  Eigen::MatrixXd work = a;  // dgesvd destroys its input
  lapack_int ucols = left == SvdVectors::full ? m : (left == SvdVectors::thin ? k : 1);
  lapack_int vtrows = right == SvdVectors::full ? n : (right == SvdVectors::thin ? k : 1);
  Eigen::MatrixXd u(left == SvdVectors::none ? 1 : m, ucols);
  Eigen::MatrixXd vt(vtrows, n);
  Eigen::VectorXd superb(std::max<lapack_int>(1, k - 1));
  lapack_int info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, job(left), job(right), m, n, work.data(), m, out.s.data(),
                                   u.data(), static_cast<lapack_int>(u.rows()), vt.data(), vtrows, superb.data());
  require(info == 0, ErrorKind::not_converged, "dgesvd failed with info " + std::to_string(info));
  if (left != SvdVectors::none) out.u = std::move(u);
  if (right != SvdVectors::none) out.v = vt.transpose();
  return out;
}

inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& a) {
  return svd(a, SvdVectors::none, SvdVectors::none).s;
}

}  // namespace sharpspec
