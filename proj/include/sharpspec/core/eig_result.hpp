#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sharpspec {

struct SolverMeta {
  std::string solver;
  int iterations = 0;
  int operator_applications = 0;
  double tol = 0.0;
  double cluster_tol = 0.0;
  std::uint64_t seed = 0;
  bool converged = true;
  std::string note;
};

struct EigResult {
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> residuals;
  std::vector<int> cluster_ids;
  Eigen::MatrixXd vectors;  // columns match eigenvalues; may be empty
  std::vector<double> unverified;  // candidates that failed the residual check
  SolverMeta meta;

  std::size_t size() const { return eigenvalues.size(); }
};

// Sorts ascending (keeping vectors and residuals aligned) and groups
// neighbours closer than cluster_tol.
inline void sort_and_cluster(EigResult& r, double cluster_tol) {
  const std::size_t m = r.eigenvalues.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return r.eigenvalues[a] < r.eigenvalues[b]; });
  std::vector<double> ev(m), res(m);
  Eigen::MatrixXd vec(r.vectors.rows(), r.vectors.cols());
  for (std::size_t i = 0; i < m; ++i) {
    ev[i] = r.eigenvalues[order[i]];
    res[i] = r.residuals.empty() ? 0.0 : r.residuals[order[i]];
    if (r.vectors.cols() == static_cast<Eigen::Index>(m))
      vec.col(static_cast<Eigen::Index>(i)) = r.vectors.col(static_cast<Eigen::Index>(order[i]));
  }
  r.eigenvalues = std::move(ev);
  r.residuals = std::move(res);
  if (r.vectors.cols() == static_cast<Eigen::Index>(m)) r.vectors = std::move(vec);
  r.cluster_ids.assign(m, 0);
  int id = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (r.eigenvalues[i] - r.eigenvalues[i - 1] > cluster_tol) ++id;
    r.cluster_ids[i] = id;
  }
  r.meta.cluster_tol = cluster_tol;
}

// One (value, multiplicity) entry per cluster.
inline std::vector<std::pair<double, int>> cluster_summary(const EigResult& r) {
  std::vector<std::pair<double, int>> out;
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    if (i == 0 || r.cluster_ids[i] != r.cluster_ids[i - 1]) out.push_back({r.eigenvalues[i], 0});
    out.back().second += 1;
  }
  return out;
}

}  // namespace sharpspec
