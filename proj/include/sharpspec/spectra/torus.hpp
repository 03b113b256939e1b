#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <fftw3.h>

#include "sharpspec/core/error.hpp"
#include "sharpspec/cubical/domain.hpp"

namespace sharpspec::spectra {

using Eigen::Index;
using Eigen::Matrix3cd;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

inline constexpr int kTorusPadding = 2;

// Periodic grid of n[0] x n[1] x n[2] cells. Scalars live on vertices, edge
// and face fields have three components laid out component-major:
// comp * N + (i * n1 + j) * n2 + k. Face component a is the face normal to a.
struct TorusGrid {
  std::array<int, 3> n{};
  double h = 1.0;
  std::array<int, 3> offset{};  // torus index = lattice index + offset

  Index size() const { return static_cast<Index>(n[0]) * n[1] * n[2]; }
  Index linear(int i, int j, int k) const {
    auto w = [](int x, int m) { return ((x % m) + m) % m; };
    return (static_cast<Index>(w(i, n[0])) * n[1] + w(j, n[1])) * n[2] + w(k, n[2]);
  }
  Index linear(const cubical::Cell& c) const { return linear(c[0], c[1], c[2]); }
  // Lattice index of Ω mapped into the torus.
  Index embed(const cubical::Cell& c) const {
    return linear(c[0] + offset[0], c[1] + offset[1], c[2] + offset[2]);
  }
  std::array<int, 3> unlinear(Index m) const {
    int k = static_cast<int>(m % n[2]);
    m /= n[2];
    int j = static_cast<int>(m % n[1]);
    int i = static_cast<int>(m / n[1]);
    return {i, j, k};
  }
  // Signed frequency of FFT index i along axis a.
  int signed_freq(int a, int i) const { return 2 * i <= n[a] ? i : i - n[a]; }
  bool odd() const { return n[0] % 2 == 1 && n[1] % 2 == 1 && n[2] % 2 == 1; }
  double period(int a) const { return n[a] * h; }
};

inline bool is_fft_friendly(int m) {
  for (int p : {2, 3, 5, 7, 11})
    while (m % p == 0) m /= p;
  return m == 1;
}

// Smallest odd size >= m with prime factors in {3, 5, 7, 11}.
inline int odd_fft_size(int m) {
  int n = std::max(m, 3);
  if (n % 2 == 0) ++n;
  while (!is_fft_friendly(n)) n += 2;
  return n;
}

// Torus that contains Ω with at least two cells of padding on each side.
inline TorusGrid grid_for(const cubical::VoxelDomain& v) {
  require(v.dim() == 3, ErrorKind::invalid_argument, "grid_for: domain must be 3D");
  TorusGrid g;
  g.h = v.h();
  for (int a = 0; a < 3; ++a) {
    int extent = v.hi()[a] - v.lo()[a];
    g.n[a] = odd_fft_size(extent + 2 * kTorusPadding);
    g.offset[a] = kTorusPadding - v.lo()[a];
  }
  return g;
}

inline TorusGrid uniform_grid(int n, double h) {
  TorusGrid g;
  g.n = {n, n, n};
  g.h = h;
  return g;
}

// Forward/backward 3D DFT of one scalar component. Backward is normalized so
// that backward(forward(x)) = x.
class Fft3 {
 public:
  explicit Fft3(const TorusGrid& g) : n_(g.size()) {
    buf_ = fftw_alloc_complex(static_cast<std::size_t>(n_));
    require(buf_ != nullptr, ErrorKind::size_limit, "Fft3: allocation failed");
    fwd_ = fftw_plan_dft_3d(g.n[0], g.n[1], g.n[2], buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_3d(g.n[0], g.n[1], g.n[2], buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft3() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;

  void forward(cplx* data) { run(fwd_, data, 1.0); }
  void backward(cplx* data) { run(bwd_, data, 1.0 / static_cast<double>(n_)); }

 private:
  void run(fftw_plan p, cplx* data, double scale) {
    auto* b = reinterpret_cast<cplx*>(buf_);
    std::copy(data, data + n_, b);
    fftw_execute(p);
    for (Index i = 0; i < n_; ++i) data[i] = b[i] * scale;
  }

  Index n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

// Translation-invariant operator on 3-component torus fields, given by a 3x3
// block per Fourier mode (indexed like the scalar layout).
class SymbolOperator {
 public:
  SymbolOperator() = default;
  SymbolOperator(TorusGrid g, std::vector<Matrix3cd> blocks)
      : grid_(g), blocks_(std::move(blocks)), fft_(std::make_shared<Fft3>(grid_)) {
    require(static_cast<Index>(blocks_.size()) == grid_.size(), ErrorKind::dimension_mismatch,
            "SymbolOperator: one block per mode required");
  }

  const TorusGrid& grid() const { return grid_; }
  const std::vector<Matrix3cd>& blocks() const { return blocks_; }
  const Matrix3cd& block(Index mode) const { return blocks_[static_cast<std::size_t>(mode)]; }
  Index rows() const { return 3 * grid_.size(); }

  VectorXcd apply(const VectorXcd& x) const {
    const Index n = grid_.size();
    require(x.size() == 3 * n, ErrorKind::dimension_mismatch, "SymbolOperator::apply: size mismatch");
    VectorXcd xf = x;
    for (int a = 0; a < 3; ++a) fft_->forward(xf.data() + a * n);
    VectorXcd yf(3 * n);
    for (Index m = 0; m < n; ++m) {
      Eigen::Vector3cd v(xf(m), xf(n + m), xf(2 * n + m));
      Eigen::Vector3cd w = blocks_[static_cast<std::size_t>(m)] * v;
      yf(m) = w(0);
      yf(n + m) = w(1);
      yf(2 * n + m) = w(2);
    }
    for (int a = 0; a < 3; ++a) fft_->backward(yf.data() + a * n);
    return yf;
  }

  // For operators that map real fields to real fields.
  VectorXd apply_real(const VectorXd& x) const { return apply(x.cast<cplx>()).real(); }

 private:
  TorusGrid grid_;
  std::vector<Matrix3cd> blocks_;
  std::shared_ptr<Fft3> fft_;
};

inline SymbolOperator compose(const SymbolOperator& a, const SymbolOperator& b) {
  require(a.grid().n == b.grid().n, ErrorKind::dimension_mismatch, "compose: grids differ");
  std::vector<Matrix3cd> blocks(a.blocks().size());
  for (std::size_t m = 0; m < blocks.size(); ++m) blocks[m] = a.blocks()[m] * b.blocks()[m];
  return SymbolOperator(a.grid(), std::move(blocks));
}

namespace detail {

template <class F>
std::vector<Matrix3cd> make_blocks(const TorusGrid& g, F&& f) {
  std::vector<Matrix3cd> blocks(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int k = 0; k < g.n[2]; ++k) {
        std::array<int, 3> q{g.signed_freq(0, i), g.signed_freq(1, j), g.signed_freq(2, k)};
        blocks[static_cast<std::size_t>(g.linear(i, j, k))] = f(q);
      }
  return blocks;
}

inline Matrix3cd cross_matrix(const Eigen::Vector3cd& f) {
  Matrix3cd c;
  c << 0.0, -f(2), f(1), f(2), 0.0, -f(0), -f(1), f(0), 0.0;
  return c;
}

}  // namespace detail

// Forward-difference multipliers (e^{i phi_a} - 1)/h with phi_a = 2 pi q_a / n_a.
inline Eigen::Vector3cd difference_symbol(const TorusGrid& g, const std::array<int, 3>& q) {
  Eigen::Vector3cd f;
  for (int a = 0; a < 3; ++a) {
    double phi = 2.0 * M_PI * q[a] / g.n[a];
    f(a) = (std::polar(1.0, phi) - 1.0) / g.h;
  }
  return f;
}

// |kappa_a| = (2/h) sin(pi q_a / n_a).
inline Eigen::Vector3d kappa(const TorusGrid& g, const std::array<int, 3>& q) {
  Eigen::Vector3d k;
  for (int a = 0; a < 3; ++a) k(a) = 2.0 / g.h * std::sin(M_PI * q[a] / g.n[a]);
  return k;
}

// Yee curl from edge fields to face fields.
inline SymbolOperator yee_curl(const TorusGrid& g) {
  return SymbolOperator(g, detail::make_blocks(g, [&](const std::array<int, 3>& q) {
                          return detail::cross_matrix(difference_symbol(g, q));
                        }));
}

// Half-cell shift from face positions to edge positions. Component a of a
// face field sits at the face centre, offset by (e_b + e_c)/2; the edge field
// sits at e_a/2.
inline SymbolOperator half_shift(const TorusGrid& g) {
  return SymbolOperator(g, detail::make_blocks(g, [&](const std::array<int, 3>& q) {
                          double th[3];
                          for (int a = 0; a < 3; ++a) th[a] = M_PI * q[a] / g.n[a];
                          Matrix3cd u = Matrix3cd::Zero();
                          for (int a = 0; a < 3; ++a) {
                            int b = (a + 1) % 3, c = (a + 2) % 3;
                            u(a, a) = std::polar(1.0, -(th[b] + th[c] - th[a]));
                          }
                          return u;
                        }));
}

// The curl endomorphism of edge fields: half_shift o yee_curl.
inline SymbolOperator torus_curl(const TorusGrid& g) { return compose(half_shift(g), yee_curl(g)); }

// Per-mode Moore-Penrose pseudoinverse; singular values below
// rel_tol * (largest singular value over all modes) count as zero.
inline SymbolOperator symbol_pseudoinverse(const SymbolOperator& s, double rel_tol = 1e-10) {
  double smax = 0.0;
  for (const auto& b : s.blocks()) smax = std::max(smax, b.norm());
  double thresh = rel_tol * std::max(smax, 1e-300);
  std::vector<Matrix3cd> out(s.blocks().size());
  for (std::size_t m = 0; m < out.size(); ++m) {
    Eigen::JacobiSVD<Matrix3cd> svd(s.blocks()[m], Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector3d sv = svd.singularValues();
    Eigen::Vector3d inv = (sv.array() > thresh).select(sv.cwiseInverse(), 0.0);
    out[m] = svd.matrixV() * inv.cast<cplx>().asDiagonal() * svd.matrixU().adjoint();
  }
  return SymbolOperator(s.grid(), std::move(out));
}

// Assembled Yee curl stencil (3N faces x 3N edges), entries +-1/h.
inline Eigen::SparseMatrix<double> yee_curl_stencil(const TorusGrid& g) {
  const Index n = g.size();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(12 * n));
  const double s = 1.0 / g.h;
  for (int i = 0; i < g.n[0]; ++i)
    for (int j = 0; j < g.n[1]; ++j)
      for (int k = 0; k < g.n[2]; ++k) {
        std::array<int, 3> p{i, j, k};
        for (int a = 0; a < 3; ++a) {
          int b = (a + 1) % 3, c = (a + 2) % 3;
          Index row = a * n + g.linear(i, j, k);
          // (curl E)_a = D_b E_c - D_c E_b
          auto shifted = [&](int axis) {
            std::array<int, 3> r = p;
            r[axis] += 1;
            return g.linear(r[0], r[1], r[2]);
          };
          t.emplace_back(row, c * n + shifted(b), s);
          t.emplace_back(row, c * n + g.linear(i, j, k), -s);
          t.emplace_back(row, b * n + shifted(c), -s);
          t.emplace_back(row, b * n + g.linear(i, j, k), s);
        }
      }
  Eigen::SparseMatrix<double> m(3 * n, 3 * n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace sharpspec::spectra
