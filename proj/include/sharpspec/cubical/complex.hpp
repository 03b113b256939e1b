#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <vector>

#include <Eigen/Sparse>

#include "sharpspec/cubical/domain.hpp"

namespace sharpspec::cubical {

// A cube of the lattice: `axes` is a bitmask of the directions it spans and
// `anchor` its lowest vertex. Dimension = number of set bits.
struct CubeCell {
  unsigned axes = 0;
  Cell anchor{};

  int dim() const { return std::popcount(axes); }
  friend bool operator==(const CubeCell&, const CubeCell&) = default;
};

namespace detail {

inline constexpr int kCoordBits = 20;
inline constexpr int kCoordBias = 1 << (kCoordBits - 1);

inline std::uint64_t pack(const CubeCell& c) {
  std::uint64_t key = c.axes;
  for (int a = 0; a < 3; ++a) {
    int v = c.anchor[a] + kCoordBias;
    require(v >= 0 && v < (1 << kCoordBits), ErrorKind::size_limit, "cubical: lattice index out of range");
    key = (key << kCoordBits) | static_cast<std::uint64_t>(v);
  }
  return key;
}

inline CubeCell unpack(std::uint64_t key) {
  CubeCell c;
  for (int a = 2; a >= 0; --a) {
    c.anchor[a] = static_cast<int>(key & ((1u << kCoordBits) - 1)) - kCoordBias;
    key >>= kCoordBits;
  }
  c.axes = static_cast<unsigned>(key);
  return c;
}

}  // namespace detail

// Closed cubical complex of a voxel union. Cells of each dimension are sorted
// by (axes, anchor). d[k] maps k-cochains to (k+1)-cochains.
class CubicalComplex {
 public:
  int dim() const { return dim_; }
  double h() const { return h_; }
  Eigen::Index count(int k) const { return static_cast<Eigen::Index>(keys_[k].size()); }
  CubeCell cell(int k, Eigen::Index i) const { return detail::unpack(keys_[k][static_cast<std::size_t>(i)]); }
  const std::vector<char>& boundary_mask(int k) const { return boundary_[k]; }
  // Number of voxels of Ω containing the cell, out of 2^(d-k).
  const std::vector<int>& adjacent_voxels(int k) const { return adjacent_[k]; }
  const Eigen::SparseMatrix<int>& d(int k) const { return d_[k]; }

  // Index of a cell, or -1 if it is not in the complex.
  Eigen::Index index_of(const CubeCell& c) const {
    int k = c.dim();
    if (k > dim_) return -1;
    std::uint64_t key = detail::pack(c);
    const auto& v = keys_[k];
    auto it = std::lower_bound(v.begin(), v.end(), key);
    if (it == v.end() || *it != key) return -1;
    return static_cast<Eigen::Index>(it - v.begin());
  }

  std::vector<Eigen::Index> interior(int k) const {
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < boundary_[k].size(); ++i)
      if (!boundary_[k][i]) out.push_back(static_cast<Eigen::Index>(i));
    return out;
  }

  Eigen::Index total_cells() const {
    Eigen::Index n = 0;
    for (int k = 0; k <= dim_; ++k) n += count(k);
    return n;
  }

  const VoxelDomain& domain() const { return domain_; }

  friend CubicalComplex build_complex(const VoxelDomain& v);

 private:
  int dim_ = 0;
  double h_ = 0.0;
  VoxelDomain domain_;
  std::array<std::vector<std::uint64_t>, 4> keys_;
  std::array<std::vector<char>, 4> boundary_;
  std::array<std::vector<int>, 4> adjacent_;
  std::array<Eigen::SparseMatrix<int>, 3> d_;
};

// Coefficients of the boundary of a cube: for the j-th spanned axis (in
// increasing order) the faces at offset 1 and 0 enter with ±(-1)^j.
template <class F>
void for_each_facet(const CubeCell& c, F&& f) {
  int j = 0;
  for (int a = 0; a < 3; ++a) {
    if (!(c.axes & (1u << a))) continue;
    int sign = (j % 2 == 0) ? 1 : -1;
    CubeCell lo{c.axes & ~(1u << a), c.anchor};
    CubeCell hi = lo;
    hi.anchor[a] += 1;
    f(hi, sign);
    f(lo, -sign);
    ++j;
  }
}

inline CubicalComplex build_complex(const VoxelDomain& v) {
  CubicalComplex cx;
  const int d = v.dim();
  cx.dim_ = d;
  cx.h_ = v.h();
  cx.domain_ = v;
  const unsigned full = (1u << d) - 1;

  for (int k = 0; k <= d; ++k) cx.keys_[k].reserve(v.size() * 3);
  for (const Cell& c : v.cells()) {
    for (unsigned s = 0; s <= full; ++s) {
      if ((s & full) != s) continue;
      unsigned free = full & ~s;
      // offsets in the directions the face does not span
      for (unsigned o = free;; o = (o - 1) & free) {
        CubeCell f{s, c};
        for (int a = 0; a < d; ++a)
          if (o & (1u << a)) f.anchor[a] += 1;
        cx.keys_[std::popcount(s)].push_back(detail::pack(f));
        if (o == 0) break;
      }
    }
  }
  for (int k = 0; k <= d; ++k) {
    auto& keys = cx.keys_[k];
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    cx.boundary_[k].assign(keys.size(), 0);
    cx.adjacent_[k].assign(keys.size(), 0);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      CubeCell c = detail::unpack(keys[i]);
      unsigned free = full & ~c.axes;
      int inside = 0, total = 0;
      for (unsigned o = free;; o = (o - 1) & free) {
        Cell vox = c.anchor;
        for (int a = 0; a < d; ++a)
          if (o & (1u << a)) vox[a] -= 1;
        ++total;
        if (v.contains(vox)) ++inside;
        if (o == 0) break;
      }
      cx.adjacent_[k][i] = inside;
      cx.boundary_[k][i] = inside < total ? 1 : 0;
    }
  }
  for (int k = 0; k < d; ++k) {
    std::vector<Eigen::Triplet<int>> trip;
    trip.reserve(cx.keys_[k + 1].size() * 2 * static_cast<std::size_t>(k + 1));
    for (std::size_t r = 0; r < cx.keys_[k + 1].size(); ++r) {
      CubeCell c = detail::unpack(cx.keys_[k + 1][r]);
      for_each_facet(c, [&](const CubeCell& f, int sign) {
        Eigen::Index col = cx.index_of(f);
        require(col >= 0, ErrorKind::precondition, "build_complex: missing face");
        trip.emplace_back(static_cast<int>(r), static_cast<int>(col), sign);
      });
    }
    cx.d_[k].resize(cx.count(k + 1), cx.count(k));
    cx.d_[k].setFromTriplets(trip.begin(), trip.end());
  }
  return cx;
}

}  // namespace sharpspec::cubical
