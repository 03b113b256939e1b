#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "oracles/dense_curl.hpp"
#include "sharpspec/core/random.hpp"
#include "sharpspec/spectra/convergence.hpp"
#include "sharpspec/spectra/curl_sharp.hpp"
#include "sharpspec/spectra/laplace_sharp.hpp"
#include "sharpspec/spectra/weyl.hpp"

using namespace sharpspec;
using namespace sharpspec::spectra;
using cubical::DomainSpec;
using cubical::VoxelDomain;

namespace {

VoxelDomain box(std::vector<double> extent, double h) {
  DomainSpec s;
  s.shape = "box";
  s.h = h;
  s.extent = std::move(extent);
  return cubical::voxelize(s);
}

VoxelDomain shape(const std::string& name, std::vector<double> radius, double h) {
  DomainSpec s;
  s.shape = name;
  s.h = h;
  s.radius = std::move(radius);
  return cubical::voxelize(s);
}

VectorXcd random_field(Rng& rng, Index n) { return rng.complex_gaussian(n, 1).col(0); }

}  // namespace

TEST(TorusCurl, ConstantFieldIsInKernel) {
  TorusGrid g = uniform_grid(8, 0.5);
  SymbolOperator s = torus_curl(g);
  VectorXcd x(3 * g.size());
  for (int a = 0; a < 3; ++a) x.segment(a * g.size(), g.size()).setConstant(cplx(1.0 + a, -0.5 * a));
  EXPECT_LE(s.apply(x).norm(), 1e-12);
}

TEST(TorusCurl, SingleModeEigenvalues) {
  TorusGrid g = uniform_grid(16, 1.0);
  SymbolOperator s = torus_curl(g);
  Eigen::SelfAdjointEigenSolver<Matrix3cd> es(s.block(g.linear(1, 0, 0)));
  double k = 2.0 * std::sin(M_PI / 16);
  EXPECT_NEAR(es.eigenvalues()(0), -k, 1e-13);
  EXPECT_NEAR(es.eigenvalues()(1), 0.0, 1e-13);
  EXPECT_NEAR(es.eigenvalues()(2), k, 1e-13);
  // oracle: the same mode as a field, S u = ±|κ| u
  for (int j : {0, 2}) {
    Eigen::Vector3cd v = es.eigenvectors().col(j);
    VectorXcd u(3 * g.size());
    for (Index m = 0; m < g.size(); ++m) {
      auto p = g.unlinear(m);
      cplx phase = std::polar(1.0, 2.0 * M_PI * p[0] / 16.0);
      for (int a = 0; a < 3; ++a) u(a * g.size() + m) = v(a) * phase;
    }
    EXPECT_LE((s.apply(u) - es.eigenvalues()(j) * u).norm() / u.norm(), 1e-12);
  }
}

TEST(TorusCurl, Hermitian) {
  TorusGrid g;
  g.n = {9, 7, 5};
  g.h = 0.3;
  SymbolOperator s = torus_curl(g);
  Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    VectorXcd u = random_field(rng, 3 * g.size()), v = random_field(rng, 3 * g.size());
    cplx lhs = s.apply(u).dot(v), rhs = u.dot(s.apply(v));
    EXPECT_LE(std::abs(lhs - rhs) / (u.norm() * v.norm() / g.h), 1e-12);
  }
  for (const auto& b : s.blocks()) EXPECT_LE((b - b.adjoint()).norm(), 1e-12 / g.h);
}

TEST(TorusCurl, StencilMatchesFft) {
  for (int n : {6, 9}) {
    TorusGrid g = uniform_grid(n, 0.25);
    g.n[2] = n + 2;
    Eigen::SparseMatrix<double> st = yee_curl_stencil(g);
    SymbolOperator c = yee_curl(g);
    Rng rng(7);
    VectorXd x = rng.gaussian(3 * g.size());
    VectorXcd y = c.apply(x.cast<cplx>());
    VectorXd z = st * x;
    EXPECT_LE((y.real() - z).norm() / z.norm(), 1e-12);
    EXPECT_LE(y.imag().norm() / z.norm(), 1e-12);
  }
}

TEST(TorusCurl, OddGridIsReal) {
  TorusGrid g = uniform_grid(9, 0.2);
  SymbolOperator s = torus_curl(g);
  Rng rng(11);
  VectorXd x = rng.gaussian(3 * g.size());
  VectorXcd y = s.apply(x.cast<cplx>());
  EXPECT_LE(y.imag().norm() / y.norm(), 1e-12);
}

TEST(SymbolPseudoinverse, ZeroModeAndInverse) {
  TorusGrid g = uniform_grid(9, 0.5);
  SymbolOperator s = torus_curl(g);
  SymbolOperator sp = symbol_pseudoinverse(s);
  EXPECT_EQ(sp.block(0).norm(), 0.0);

  std::vector<Matrix3cd> blocks(static_cast<std::size_t>(g.size()));
  Rng rng(5);
  for (auto& b : blocks) b = rng.complex_gaussian(3, 3) + 4.0 * Matrix3cd::Identity();
  SymbolOperator gen(g, blocks);
  SymbolOperator inv = symbol_pseudoinverse(gen);
  for (std::size_t m = 0; m < blocks.size(); ++m)
    EXPECT_LE((inv.blocks()[m] * blocks[m] - Matrix3cd::Identity()).norm(), 1e-13);
}

TEST(SymbolPseudoinverse, RangeProjector) {
  TorusGrid g = uniform_grid(9, 0.5);
  SymbolOperator s = torus_curl(g);
  SymbolOperator sp = symbol_pseudoinverse(s);
  // oracle projector: ker S = span{F} per mode, ran S = F^⊥; zero at k = 0
  std::vector<Matrix3cd> proj = detail::make_blocks(g, [&](const std::array<int, 3>& q) {
    if (q[0] == 0 && q[1] == 0 && q[2] == 0) return Matrix3cd(Matrix3cd::Zero());
    Eigen::Vector3cd f = difference_symbol(g, q).normalized();
    return Matrix3cd(Matrix3cd::Identity() - f * f.adjoint());
  });
  SymbolOperator pi(g, proj);
  Rng rng(9);
  VectorXcd f = random_field(rng, 3 * g.size());
  VectorXcd lhs = s.apply(sp.apply(f));
  EXPECT_LE((lhs - pi.apply(f)).norm() / f.norm(), 1e-11);
}

TEST(Embedding, IntertwiningIsExact) {
  VoxelDomain v = shape("ball", {1.0}, 0.25);
  cubical::CubicalComplex c = cubical::build_complex(v);
  TorusGrid g = grid_for(v);
  Embedding e = make_embedding(c, g);
  Eigen::SparseMatrix<double> st = yee_curl_stencil(g) * g.h;  // integer entries
  Eigen::SparseMatrix<double> d1 = c.d(1).cast<double>();
  cubical::MimeticPair m = cubical::mimetic_pair(c, 1);
  Eigen::SparseMatrix<double> ext = cubical::extension(c.count(1), m.source_rel);
  Eigen::SparseMatrix<double> lhs = st * e.edge_matrix() * ext;
  Eigen::SparseMatrix<double> rhs = e.face_matrix() * d1 * ext;
  Eigen::SparseMatrix<double> diff = lhs - rhs;
  diff.prune(0.0);
  EXPECT_EQ(diff.nonZeros(), 0);
}

TEST(Embedding, ExtensionAndRestrictionAreAdjoint) {
  VoxelDomain v = shape("ball", {1.0}, 0.25);
  cubical::CubicalComplex c = cubical::build_complex(v);
  Embedding e = make_embedding(c, grid_for(v));
  Rng rng(2);
  VectorXd x = rng.gaussian(c.count(1)), y = rng.gaussian(e.torus_fields());
  EXPECT_LE(std::abs(e.extend_edges(x).dot(y) - x.dot(e.restrict_edges(y))), 1e-12 * x.norm() * y.norm());
  EXPECT_EQ((e.restrict_edges(e.extend_edges(x)) - x).norm(), 0.0);
  VectorXd xf = rng.gaussian(c.count(2)), yf = rng.gaussian(e.torus_fields());
  EXPECT_LE(std::abs(e.extend_faces(xf).dot(yf) - xf.dot(e.restrict_faces(yf))), 1e-12 * xf.norm() * yf.norm());
}

TEST(Embedding, RequiresPadding) {
  VoxelDomain v = box({1, 1, 1}, 0.25);
  cubical::CubicalComplex c = cubical::build_complex(v);
  TorusGrid g = uniform_grid(7, 0.25);
  g.offset = {1, 1, 1};
  EXPECT_THROW(make_embedding(c, g), Error);
}

TEST(Projector, KillsGradientsAndIsIdempotent) {
  VoxelDomain v = shape("ball", {1.0}, 0.25);
  cubical::CubicalComplex c = cubical::build_complex(v);
  const double cg_tol = 1e-10;
  ProjectorChain p = omega_projector(c, cg_tol);
  Rng rng(4);
  VectorXd phi = rng.gaussian(c.count(0));
  VectorXd u = p.d0() * phi;
  EXPECT_LE(p.apply(u).norm() / u.norm(), 10 * cg_tol);
  VectorXd w = rng.gaussian(c.count(1));
  VectorXd pw = p.apply(w);
  EXPECT_LE((p.apply(pw) - pw).norm() / pw.norm(), 10 * cg_tol);
  VectorXd z = rng.gaussian(c.count(1));
  EXPECT_LE(std::abs(p.apply(z).dot(w) - z.dot(pw)) / (z.norm() * w.norm()), 10 * cg_tol);
  EXPECT_EQ(p.harmonic_basis().cols(), 0);
}

TEST(Projector, SolidTorusHarmonicField) {
  VoxelDomain v = shape("solid-torus", {1.0, 0.5}, 0.25);
  cubical::CubicalComplex c = cubical::build_complex(v);
  std::vector<long> b = cubical::betti_euler(c);
  ProjectorChain p = omega_projector(c);
  ASSERT_EQ(p.harmonic_basis().cols(), b[1]);
  EXPECT_EQ(p.harmonic_basis().cols(), 1);
  VectorXd hfield = p.harmonic_basis().col(0);
  EXPECT_LE(VectorXd(p.d1() * hfield).norm(), 1e-8 * VectorXd(p.d1() * VectorXd::Ones(c.count(1))).norm() + 1e-8);
  EXPECT_LE(VectorXd(p.d0().transpose() * hfield).norm(), 1e-8);
  EXPECT_LE(p.apply(hfield).norm(), 1e-9);
}

TEST(Lanczos, DiagonalTop) {
  VectorXd d = VectorXd::LinSpaced(10, 1, 10);
  LanczosOptions o;
  o.count = 3;
  o.block = 2;
  o.which = Which::largest_algebraic;
  auto r = block_lanczos<double>([&](const MatrixXd& x) { return MatrixXd(d.asDiagonal() * x); }, 10, o);
  ASSERT_EQ(r.result.eigenvalues.size(), 3u);
  EXPECT_NEAR(r.result.eigenvalues[0], 8, 1e-10);
  EXPECT_NEAR(r.result.eigenvalues[1], 9, 1e-10);
  EXPECT_NEAR(r.result.eigenvalues[2], 10, 1e-10);
  EXPECT_TRUE(r.result.meta.converged);
}

TEST(Lanczos, RepeatedEigenvalueCluster) {
  VectorXd d(3);
  d << 2, 2, 1;
  LanczosOptions o;
  o.count = 3;
  o.block = 2;
  auto r = block_lanczos<double>([&](const MatrixXd& x) { return MatrixXd(d.asDiagonal() * x); }, 3, o);
  auto cl = cluster_summary(r.result);
  ASSERT_EQ(cl.size(), 2u);
  EXPECT_NEAR(cl[1].first, 2.0, 1e-10);
  EXPECT_EQ(cl[1].second, 2);
}

TEST(Lanczos, LargeDiagonalWithRestarts) {
  const Index n = 2000;
  VectorXd d(n);
  for (Index i = 0; i < n; ++i) d(i) = std::pow(-1.0, i) / (1.0 + i);
  LanczosOptions o;
  o.count = 8;
  auto r = block_lanczos<double>([&](const MatrixXd& x) { return MatrixXd(d.asDiagonal() * x); }, n, o);
  ASSERT_TRUE(r.result.meta.converged);
  std::vector<double> want;
  for (Index i = 0; i < 8; ++i) want.push_back(d(i));
  std::sort(want.begin(), want.end());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(r.result.eigenvalues[i], want[i], 1e-9);
}

TEST(Lanczos, Deterministic) {
  VectorXd d = VectorXd::LinSpaced(300, 1, 2);
  LanczosOptions o;
  o.count = 4;
  auto f = [&](const MatrixXd& x) { return MatrixXd(d.asDiagonal() * x); };
  auto a = block_lanczos<double>(f, 300, o), b = block_lanczos<double>(f, 300, o);
  EXPECT_EQ(a.result.eigenvalues, b.result.eigenvalues);
  EXPECT_EQ(a.result.residuals, b.result.residuals);
}

TEST(Lanczos, FullTorusMatchesSymbol) {
  TorusGrid g = uniform_grid(8, 0.125);
  SymbolOperator sp = symbol_pseudoinverse(torus_curl(g));
  LanczosOptions o;
  o.count = 12;
  o.block = 8;
  o.tol = 1e-10;
  auto r = block_lanczos<cplx>(
      [&](const MatrixXcd& x) {
        MatrixXcd y(x.rows(), x.cols());
        for (Index j = 0; j < x.cols(); ++j) y.col(j) = sp.apply(VectorXcd(x.col(j)));
        return y;
      },
      3 * g.size(), o);
  // oracle: enumerate per-mode symbol eigenvalues ±1/|κ|
  std::vector<double> mu;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int k = 0; k < 8; ++k) {
        double kk = kappa(g, {g.signed_freq(0, i), g.signed_freq(1, j), g.signed_freq(2, k)}).norm();
        if (kk > 0) {
          mu.push_back(1 / kk);
          mu.push_back(-1 / kk);
        }
      }
  std::sort(mu.begin(), mu.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
  mu.resize(12);
  std::sort(mu.begin(), mu.end());
  ASSERT_EQ(r.result.eigenvalues.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(r.result.eigenvalues[i], mu[i], 1e-9 * std::abs(mu[i]));
}

TEST(Resolvent, SymmetricOnBall) {
  VoxelDomain v = shape("ball", {1.0}, 0.25);
  cubical::CubicalComplex c = cubical::build_complex(v);
  ProjectorOptions opt;
  SharpResolvent r(c, grid_for(v), opt);
  EXPECT_LE(symmetry_residual(r, 20, 42), std::max(1e-10, 10 * opt.cg_tol));
}

TEST(Resolvent, RejectsEvenGrid) {
  VoxelDomain v = box({1, 1, 1}, 0.25);
  cubical::CubicalComplex c = cubical::build_complex(v);
  TorusGrid g = uniform_grid(10, 0.25);
  g.offset = {2, 2, 2};
  EXPECT_THROW(SharpResolvent(c, g, ProjectorOptions{}), Error);
}

// With f = A0 x the resolvent formula recovers the part of x orthogonal to ker A.
TEST(Resolvent, FormulaRecoversPreimage) {
  VoxelDomain v = box({1, 1, 1}, 0.25);
  cubical::CubicalComplex c = cubical::build_complex(v);
  TorusGrid g = grid_for(v);
  Embedding e = make_embedding(c, g);
  ProjectorChain p = omega_projector(c);
  cubical::MimeticPair m = cubical::mimetic_pair(c, 1);
  SymbolOperator cp = symbol_pseudoinverse(yee_curl(g));
  Rng rng(8);
  VectorXd xr = rng.gaussian(static_cast<Index>(m.source_rel.size()));
  VectorXd x = cubical::extension(c.count(1), m.source_rel) * xr;
  VectorXd f = m.full * x;
  VectorXd y = p.apply(e.restrict_edges(cp.apply_real(e.extend_faces(f))));
  VectorXd want = p.apply(x);
  EXPECT_LE((y - want).norm() / want.norm(), 1e-9);

  // dense side: the inverse of the reduced sharp operator applied to f
  linrel::OperatorPair pair = cubical::to_dense_pair(m);
  linrel::SharpPair sp = linrel::sharp(pair);
  MatrixXd a = linrel::operator_matrix(sp.a_sharp);
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(a);
  cod.setThreshold(1e-10);
  VectorXd dense = cod.solve(f);
  EXPECT_LE((dense - want).norm() / want.norm(), 1e-8);
}

TEST(CurlSharp, CubeParity) {
  VoxelDomain v = box({1, 1, 1}, 0.25);
  CurlSharpParams p;
  p.count = 12;
  p.block = 6;
  CurlSharpResult r = curl_sharp_eigs(v, p);
  ASSERT_TRUE(r.eig.meta.converged) << r.eig.meta.note;
  std::vector<double> pos, neg;
  for (double l : r.eig.eigenvalues) (l > 0 ? pos : neg).push_back(std::abs(l));
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  std::size_t m = std::min(pos.size(), neg.size());
  ASSERT_GE(m, 3u);
  double top = std::max(pos.back(), neg.back());
  for (std::size_t i = 0; i < m; ++i) EXPECT_LE(std::abs(pos[i] - neg[i]), p.cluster_rel * top);
  for (std::size_t i = 0; i < r.eig.residuals.size(); ++i) EXPECT_LE(r.eig.residuals[i], 10 * p.tol);
}

TEST(CurlSharp, MatchesDenseOracleSmallCube) {
  VoxelDomain v = box({1, 1, 1}, 0.25);
  CurlSharpParams p;
  p.count = 10;
  p.block = 6;
  p.tol = 1e-10;
  CurlSharpResult r = curl_sharp_eigs(v, p);
  ASSERT_TRUE(r.eig.meta.converged);
  oracle::DenseResolvent d = oracle::dense_resolvent(*r.complex, r.grid.n[0], r.grid.offset);
  std::vector<double> got;
  for (double mu : r.mu) got.push_back(std::abs(mu));
  std::sort(got.begin(), got.end(), std::greater<>());
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(got[i], std::abs(d.mu[i]), 1e-6 * std::abs(d.mu[i]));
}

TEST(CurlSharp, TanRoot) {
  EXPECT_NEAR(tan_root(), 4.493409457909064, 1e-12);
  EXPECT_NEAR(oracle::tan_fixed_point(), tan_root(), 1e-12);
}

TEST(LaplaceSharp, OneDimensionalCirculant) {
  for (int n : {9, 17, 33}) {
    double h = 1.0 / (n - 1);
    EigResult e = laplace_sharp_eigs(box({1.0}, h));
    std::vector<double> want;
    for (int k = 0; k < n - 1; ++k) want.push_back(-4.0 / (h * h) * std::pow(std::sin(M_PI * k / (n - 1)), 2));
    std::sort(want.begin(), want.end());
    ASSERT_EQ(e.eigenvalues.size(), want.size()) << n;
    double scale = 4.0 / (h * h);
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(e.eigenvalues[i], want[i], 1e-10 * scale);
  }
}

TEST(LaplaceSharp, ConstantKernel) {
  EigResult e = laplace_sharp_eigs(box({1.0}, 1.0 / 16));
  int zeros = 0;
  for (double l : e.eigenvalues) zeros += std::abs(l) < 1e-8;
  EXPECT_EQ(zeros, 1);
  EXPECT_NEAR(e.eigenvalues.back(), 0.0, 1e-8);
}

TEST(LaplaceSharp, TwoDimensionalMatchesWeakForm) {
  VoxelDomain v = box({1.0, 1.0}, 0.25);
  EigResult e = laplace_sharp_eigs(v);
  EXPECT_NEAR(e.eigenvalues.back(), 0.0, 1e-8);
  // oracle: dom(grad#) = interior nodes + functions constant on the boundary;
  // div# grad# = -(grad#)* grad#, a generalized eigenproblem with lumped weights
  cubical::CubicalComplex c = cubical::build_complex(v);
  cubical::MimeticPair m = cubical::mimetic_pair(c, 0);
  MatrixXd basis = MatrixXd::Zero(c.count(0), 0);
  VectorXd boundary = VectorXd::Zero(c.count(0));
  for (Index i = 0; i < c.count(0); ++i) boundary(i) = c.boundary_mask(0)[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  for (Index i : m.source_rel) {
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = VectorXd::Unit(c.count(0), i);
  }
  basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
  basis.col(basis.cols() - 1) = boundary;
  MatrixXd d = MatrixXd(m.full) * basis;
  MatrixXd k = d.transpose() * m.w_target.asDiagonal() * d;
  MatrixXd mass = basis.transpose() * m.w_source.asDiagonal() * basis;
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(k, mass);
  ASSERT_EQ(e.eigenvalues.size(), static_cast<std::size_t>(ges.eigenvalues().size()));
  const Index nv = ges.eigenvalues().size();
  for (Index i = 0; i < nv; ++i)
    EXPECT_NEAR(e.eigenvalues[static_cast<std::size_t>(i)], -ges.eigenvalues()(nv - 1 - i), 1e-9 * 128);
}

TEST(LaplaceSharp, SizeLimit) {
  EXPECT_THROW(laplace_sharp_eigs(box({1.0}, 1.0 / 2048)), Error);
  EXPECT_THROW(laplace_sharp_eigs(box({1.0, 1.0}, 1.0 / 32)), Error);
}

TEST(DSharp1d, PairsAndPoincare) {
  EigResult e = d_sharp_1d(box({1.0}, 1.0 / 63));
  double smallest = 1e300;
  for (double l : e.eigenvalues)
    if (l > 1e-8) smallest = std::min(smallest, l);
  EXPECT_GE(smallest, 5.0);
  EXPECT_NEAR(smallest, 2 * 63 * std::sin(M_PI / 63), 1e-9);
  std::map<long, int> balance;
  for (double l : e.eigenvalues)
    if (std::abs(l) > 1e-8) balance[std::lround(std::abs(l) * 1e6)] += l > 0 ? 1 : -1;
  for (auto [key, b] : balance) EXPECT_TRUE(b == 0 || b == 1) << key;
}

TEST(Weyl, SyntheticExponent) {
  std::vector<double> v;
  for (int j = 1; j <= 200; ++j) v.push_back(std::cbrt(static_cast<double>(j)));
  WeylFit f = weyl_fit(v, 1.0);
  EXPECT_NEAR(f.exponent, 3.0, 0.05);
}

TEST(Weyl, TooFewValues) {
  std::vector<double> v(29, 1.0);
  EXPECT_THROW(weyl_fit(v, 1.0), Error);
}

TEST(Weyl, FullTorusWindow) {
  TorusGrid g = uniform_grid(21, 1.0 / 21);
  std::vector<double> lam;
  for (int i = 0; i < 21; ++i)
    for (int j = 0; j < 21; ++j)
      for (int k = 0; k < 21; ++k) {
        double kk = kappa(g, {g.signed_freq(0, i), g.signed_freq(1, j), g.signed_freq(2, k)}).norm();
        if (kk > 0) lam.push_back(kk);
      }
  std::sort(lam.begin(), lam.end());
  lam.resize(400);
  WeylFit f = weyl_fit(lam, 1.0);
  EXPECT_GE(f.exponent, 2.5);
  EXPECT_LE(f.exponent, 3.5);
}

TEST(Convergence, FittedOrderAndRichardson) {
  auto lam = [](double h) { return 1.0 + 2.0 * h * h; };
  double p = fitted_order(0.1, 0.05, 0.025, lam(0.1), lam(0.05), lam(0.025));
  EXPECT_NEAR(p, 2.0, 1e-8);
  EXPECT_NEAR(richardson(0.05, 0.025, lam(0.05), lam(0.025), p), 1.0, 1e-10);
  EXPECT_TRUE(std::isnan(fitted_order(0.1, 0.05, 0.025, 1.0, 2.0, 1.0)));
}
