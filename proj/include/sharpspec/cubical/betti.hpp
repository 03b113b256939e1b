#pragma once

#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "sharpspec/cubical/complex.hpp"

namespace sharpspec::cubical {

inline constexpr Eigen::Index kBettiRankCellLimit = 50000;

namespace detail {

inline constexpr std::int64_t kPrime = 2147483647;  // 2^31 - 1

inline std::int64_t mod_pow(std::int64_t b, std::int64_t e) {
  std::int64_t r = 1;
  b %= kPrime;
  while (e > 0) {
    if (e & 1) r = r * b % kPrime;
    b = b * b % kPrime;
    e >>= 1;
  }
  return r;
}

inline std::int64_t mod_inv(std::int64_t a) { return mod_pow((a % kPrime + kPrime) % kPrime, kPrime - 2); }

using SparseRow = std::vector<std::pair<int, std::int64_t>>;  // sorted by column

// row - f * pivot (mod p), dropping zeros.
inline SparseRow axpy(const SparseRow& row, std::int64_t f, const SparseRow& pivot) {
  SparseRow out;
  out.reserve(row.size() + pivot.size());
  std::size_t i = 0, j = 0;
  while (i < row.size() || j < pivot.size()) {
    if (j == pivot.size() || (i < row.size() && row[i].first < pivot[j].first)) {
      out.push_back(row[i++]);
    } else if (i == row.size() || pivot[j].first < row[i].first) {
      std::int64_t v = (kPrime - f * pivot[j].second % kPrime) % kPrime;
      out.emplace_back(pivot[j].first, v);
      ++j;
    } else {
      std::int64_t v = ((row[i].second - f * pivot[j].second) % kPrime + kPrime) % kPrime;
      if (v != 0) out.emplace_back(row[i].first, v);
      ++i;
      ++j;
    }
  }
  return out;
}

// Rank over GF(p) by row reduction keyed on the leading column.
inline Eigen::Index modular_rank(const Eigen::SparseMatrix<int>& m) {
  Eigen::SparseMatrix<int, Eigen::RowMajor> r = m;
  std::unordered_map<int, SparseRow> pivots;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    SparseRow row;
    for (Eigen::SparseMatrix<int, Eigen::RowMajor>::InnerIterator it(r, i); it; ++it)
      if (it.value() != 0) row.emplace_back(static_cast<int>(it.col()), (it.value() % kPrime + kPrime) % kPrime);
    while (!row.empty()) {
      auto p = pivots.find(row.front().first);
      if (p == pivots.end()) {
        std::int64_t inv = mod_inv(row.front().second);
        for (auto& e : row) e.second = e.second * inv % kPrime;
        pivots.emplace(row.front().first, std::move(row));
        ++rank;
        break;
      }
      row = axpy(row, row.front().second, p->second);
    }
  }
  return rank;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace detail

// Betti numbers (b0, ..., b_{d-1}) by rank-nullity of the incidence matrices;
// b_d of a bounded subset of R^d is always 0 and is not reported.
inline std::vector<long> betti(const CubicalComplex& c) {
  require(c.total_cells() <= kBettiRankCellLimit, ErrorKind::size_limit,
          "betti: complex exceeds the rank computation limit; use betti_euler");
  const int d = c.dim();
  std::vector<Eigen::Index> rank(static_cast<std::size_t>(d) + 1, 0);  // rank[k] = rank d_{k-1}
  for (int k = 0; k < d; ++k) rank[static_cast<std::size_t>(k) + 1] = detail::modular_rank(c.d(k));
  std::vector<long> b(static_cast<std::size_t>(d) + 1);
  for (int k = 0; k <= d; ++k) {
    Eigen::Index out_rank = k < d ? rank[static_cast<std::size_t>(k) + 1] : 0;
    b[static_cast<std::size_t>(k)] = static_cast<long>(c.count(k) - out_rank - rank[static_cast<std::size_t>(k)]);
  }
  require(b.back() == 0, ErrorKind::precondition, "betti: nonzero top Betti number");
  b.pop_back();
  return b;
}

// Betti numbers from connectivity and the Euler characteristic: b0 counts
// components of the voxel union, b_{d-1} (d >= 2) counts bounded components of
// the complement (face-adjacent voxels), and the remaining number follows
// from chi. Exact for d <= 3 and scales to large complexes.
inline std::vector<long> betti_euler(const CubicalComplex& c) {
  const int d = c.dim();
  long chi = 0;
  for (int k = 0; k <= d; ++k) chi += (k % 2 == 0 ? 1 : -1) * static_cast<long>(c.count(k));

  detail::UnionFind uf(static_cast<std::size_t>(c.count(0)));
  Eigen::SparseMatrix<int, Eigen::RowMajor> e = c.d(0);
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    int first = -1;
    for (Eigen::SparseMatrix<int, Eigen::RowMajor>::InnerIterator it(e, i); it; ++it) {
      if (first < 0)
        first = static_cast<int>(it.col());
      else
        uf.unite(first, static_cast<int>(it.col()));
    }
  }
  long b0 = 0;
  for (int i = 0; i < static_cast<int>(c.count(0)); ++i)
    if (uf.find(i) == i) ++b0;

  std::vector<long> b(static_cast<std::size_t>(d), 0);
  b[0] = b0;
  if (d == 1) return b;  // chi = b0 for a 1D complex of intervals

  // Complement components inside the bounding box padded by one voxel; the
  // component touching the pad is the unbounded one.
  const VoxelDomain& v = c.domain();
  Cell lo = v.lo(), hi = v.hi();
  for (int a = 0; a < d; ++a) {
    lo[a] -= 1;
    hi[a] += 1;
  }
  Cell ext{hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]};
  auto idx = [&](const Cell& x) {
    return (static_cast<std::size_t>(x[0] - lo[0]) * ext[1] + (x[1] - lo[1])) * ext[2] + (x[2] - lo[2]);
  };
  std::vector<char> seen(static_cast<std::size_t>(ext[0]) * ext[1] * ext[2], 0);
  long components = 0;
  std::vector<Cell> stack;
  for (int i = lo[0]; i < hi[0]; ++i)
    for (int j = lo[1]; j < hi[1]; ++j)
      for (int k = lo[2]; k < hi[2]; ++k) {
        Cell s{i, j, k};
        if (v.contains(s) || seen[idx(s)]) continue;
        ++components;
        seen[idx(s)] = 1;
        stack.push_back(s);
        while (!stack.empty()) {
          Cell x = stack.back();
          stack.pop_back();
          for (int a = 0; a < d; ++a)
            for (int step : {-1, 1}) {
              Cell y = x;
              y[a] += step;
              if (y[a] < lo[a] || y[a] >= hi[a]) continue;
              if (v.contains(y) || seen[idx(y)]) continue;
              seen[idx(y)] = 1;
              stack.push_back(y);
            }
        }
      }
  long holes = components - 1;
  if (d == 2) {
    b[1] = holes;
  } else {
    b[2] = holes;
    b[1] = b0 + b[2] - chi;
  }
  return b;
}

}  // namespace sharpspec::cubical
