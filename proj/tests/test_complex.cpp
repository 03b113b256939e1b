#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "sharpspec/core/random.hpp"
#include "sharpspec/cubical/betti.hpp"
#include "sharpspec/cubical/mimetic.hpp"

using namespace sharpspec;
using namespace sharpspec::cubical;

namespace {

VoxelDomain box(std::vector<double> extent, double h) {
  DomainSpec s;
  s.shape = "box";
  s.h = h;
  s.extent = std::move(extent);
  return voxelize(s);
}

VoxelDomain shape(const std::string& name, std::vector<double> radius, double h) {
  DomainSpec s;
  s.shape = name;
  s.h = h;
  s.radius = std::move(radius);
  return voxelize(s);
}

bool product_vanishes(const Eigen::SparseMatrix<int>& a, const Eigen::SparseMatrix<int>& b) {
  Eigen::SparseMatrix<int> p = a * b;
  for (Eigen::Index j = 0; j < p.outerSize(); ++j)
    for (Eigen::SparseMatrix<int>::InnerIterator it(p, j); it; ++it)
      if (it.value() != 0) return false;
  return true;
}

void expect_boundary_closed(const CubicalComplex& c) {
  for (int k = 1; k <= c.dim(); ++k)
    for (Eigen::Index i = 0; i < c.count(k); ++i) {
      if (!c.boundary_mask(k)[i]) continue;
      for_each_facet(c.cell(k, i), [&](const CubeCell& f, int) {
        Eigen::Index j = c.index_of(f);
        ASSERT_GE(j, 0);
        EXPECT_TRUE(c.boundary_mask(k - 1)[j]);
      });
    }
}

std::vector<long> triple(long a, long b, long c) { return {a, b, c}; }

}  // namespace

TEST(Voxelize, BoxCount) {
  EXPECT_EQ(box({1, 1, 1}, 0.25).size(), 64u);
  EXPECT_EQ(box({1, 1, 1}, 0.25).dim(), 3);
  EXPECT_EQ(box({2}, 1.0).size(), 2u);
}

TEST(Voxelize, BallMatchesPredicateEnumeration) {
  VoxelDomain v = shape("ball", {1.0}, 0.5);
  std::set<Cell> oracle;
  for (int i = -4; i < 4; ++i)
    for (int j = -4; j < 4; ++j)
      for (int k = -4; k < 4; ++k) {
        double x = 0.5 * i + 0.25, y = 0.5 * j + 0.25, z = 0.5 * k + 0.25;
        if (x * x + y * y + z * z < 1.0) oracle.insert({i, j, k});
      }
  EXPECT_EQ(oracle.size(), 32u);
  EXPECT_EQ(std::set<Cell>(v.cells().begin(), v.cells().end()), oracle);
}

TEST(Voxelize, VoxelFileRoundTrip) {
  VoxelDomain v = shape("ball", {1.0}, 0.5);
  auto path = std::filesystem::temp_directory_path() / "sharpspec_roundtrip.vox";
  {
    std::ofstream out(path);
    out << "# ball\n";
    for (const Cell& c : v.cells()) out << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  }
  DomainSpec s;
  s.shape = "voxels";
  s.h = 0.5;
  s.voxels_path = path.string();
  VoxelDomain w = voxelize(s);
  EXPECT_EQ(w.cells(), v.cells());
  std::filesystem::remove(path);
}

TEST(Voxelize, Errors) {
  DomainSpec s;
  s.shape = "ball";
  s.h = 0.0;
  s.radius = {1.0};
  EXPECT_THROW(voxelize(s), Error);
  s.h = 4.0;
  s.radius = {0.1};
  EXPECT_THROW(voxelize(s), Error);  // no cell center inside
  s.shape = "pyramid";
  EXPECT_THROW(voxelize(s), Error);
}

TEST(DomainSpecParse, AcceptsKnownFields) {
  DomainSpec s = parse_domain_spec(R"({"shape":"shell","h":0.25,"radius":[0.5,1.0],"seed":7})");
  EXPECT_EQ(s.shape, "shell");
  EXPECT_EQ(s.radius, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(s.seed, 7u);
  DomainSpec b = parse_domain_spec(R"({"shape":"ball","h":0.5,"radius":1})");
  EXPECT_EQ(b.radius, std::vector<double>{1.0});
}

TEST(DomainSpecParse, RejectsBadInput) {
  auto kind = [](const std::string& text) {
    try {
      parse_domain_spec(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io;
  };
  EXPECT_EQ(kind(R"({"shape":"ball","h":0.5,"radius":1,"colour":"red"})"), ErrorKind::parse);
  EXPECT_EQ(kind(R"({"shape":"ball","radius":1})"), ErrorKind::parse);
  EXPECT_EQ(kind(R"({"shape":"ball","h":-1,"radius":1})"), ErrorKind::parse);
  EXPECT_EQ(kind(R"({"shape":"ball","h":0.5,"radius":1)"), ErrorKind::parse);
  EXPECT_EQ(kind(R"({"shape":"blob","h":0.5})"), ErrorKind::parse);
  EXPECT_EQ(kind(R"([1,2])"), ErrorKind::parse);
}

TEST(Complex, SingleCubeCounts) {
  CubicalComplex c = build_complex(box({1, 1, 1}, 1.0));
  EXPECT_EQ(c.count(0), 8);
  EXPECT_EQ(c.count(1), 12);
  EXPECT_EQ(c.count(2), 6);
  EXPECT_EQ(c.count(3), 1);
  for (int k = 0; k < 3; ++k)
    for (char b : c.boundary_mask(k)) EXPECT_TRUE(b);
  EXPECT_FALSE(c.boundary_mask(3)[0]);
}

TEST(Complex, PathBoundaryIsEndVertices) {
  for (int n = 1; n <= 6; ++n) {
    CubicalComplex c = build_complex(box({static_cast<double>(n)}, 1.0));
    ASSERT_EQ(c.count(0), n + 1);
    ASSERT_EQ(c.count(1), n);
    for (Eigen::Index i = 0; i <= n; ++i) EXPECT_EQ(c.boundary_mask(0)[i] != 0, i == 0 || i == n);
    for (char b : c.boundary_mask(1)) EXPECT_FALSE(b);
  }
}

TEST(Complex, IncidenceSquaresToZero) {
  for (const VoxelDomain& v : {box({1, 1, 1}, 0.5), shape("ball", {1.0}, 0.25), shape("solid-torus", {1.0, 0.5}, 0.25),
                               box({1, 1}, 0.25)}) {
    CubicalComplex c = build_complex(v);
    for (int k = 0; k + 1 < c.dim(); ++k) EXPECT_TRUE(product_vanishes(c.d(k + 1), c.d(k)));
    expect_boundary_closed(c);
  }
}

TEST(Complex, EntriesAreSignedUnits) {
  CubicalComplex c = build_complex(shape("ball", {1.0}, 0.25));
  for (int k = 0; k < 3; ++k) {
    const auto& d = c.d(k);
    for (Eigen::Index j = 0; j < d.outerSize(); ++j)
      for (Eigen::SparseMatrix<int>::InnerIterator it(d, j); it; ++it) EXPECT_EQ(std::abs(it.value()), 1);
    // every (k+1)-cell has 2(k+1) faces
    Eigen::VectorXi per_row = Eigen::VectorXi::Zero(d.rows());
    for (Eigen::Index j = 0; j < d.outerSize(); ++j)
      for (Eigen::SparseMatrix<int>::InnerIterator it(d, j); it; ++it) per_row(it.row()) += 1;
    EXPECT_TRUE((per_row.array() == 2 * (k + 1)).all());
  }
}

TEST(Complex, GradientOrientation) {
  CubicalComplex c = build_complex(box({1, 1}, 1.0));
  // edge along x from (0,0): -1 at (0,0), +1 at (1,0)
  Eigen::Index e = c.index_of({1u, {0, 0, 0}});
  Eigen::Index v0 = c.index_of({0u, {0, 0, 0}});
  Eigen::Index v1 = c.index_of({0u, {1, 0, 0}});
  EXPECT_EQ(c.d(0).coeff(e, v0), -1);
  EXPECT_EQ(c.d(0).coeff(e, v1), 1);
  // the square is bounded counterclockwise
  Eigen::Index f = c.index_of({3u, {0, 0, 0}});
  EXPECT_EQ(c.d(1).coeff(f, c.index_of({1u, {0, 0, 0}})), 1);
  EXPECT_EQ(c.d(1).coeff(f, c.index_of({2u, {1, 0, 0}})), 1);
  EXPECT_EQ(c.d(1).coeff(f, c.index_of({1u, {0, 1, 0}})), -1);
  EXPECT_EQ(c.d(1).coeff(f, c.index_of({2u, {0, 0, 0}})), -1);
}

TEST(Mimetic, PathGradientIsDifferenceMatrix) {
  CubicalComplex c = build_complex(box({3}, 1.0));
  MimeticPair m = mimetic_pair(c, 0);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(3, 4);
  for (int i = 0; i < 3; ++i) {
    expect(i, i) = -1;
    expect(i, i + 1) = 1;
  }
  EXPECT_EQ(Eigen::MatrixXd(m.full), expect);
  EXPECT_EQ(m.source_rel, (std::vector<Eigen::Index>{1, 2}));
  EXPECT_EQ(m.target_rel.size(), 3u);
}

TEST(Mimetic, TwoCellPathIsTheThreeNodePair) {
  MimeticPair m = mimetic_pair(build_complex(box({2}, 1.0)), 0);
  linrel::OperatorPair p = to_dense_pair(m);
  Eigen::MatrixXd d(2, 3);
  d << -1, 1, 0, 0, -1, 1;
  linrel::LinearRelation a = linrel::LinearRelation::from_matrix(d);
  linrel::LinearRelation a0 = linrel::LinearRelation::restricted(d, linrel::Subspace::coordinate(3, {1}));
  EXPECT_TRUE(linrel::operator_matrix(p.a).isApprox(d, 1e-15));
  EXPECT_LE(linrel::graph_distance(p.a, a), 1e-15);
  EXPECT_LE(linrel::graph_distance(p.a0, a0), 1e-15);
}

TEST(Mimetic, CurlIntertwinesExactly) {
  CubicalComplex c = build_complex(box({3, 3, 3}, 1.0));
  for (int k = 0; k < 3; ++k) EXPECT_EQ(intertwining_defect(mimetic_pair(c, k)), 0.0);
  EXPECT_EQ(mimetic_pair(c, 1).source_rel.size(), 36u);  // 3 directions x 3 x 2 x 2
}

TEST(Mimetic, DualityOnLShape) {
  std::vector<Cell> cells;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i < 2 || j < 2) cells.push_back({i, j, 0});
  CubicalComplex c = build_complex(VoxelDomain(2, 0.25, cells));
  Rng rng(11);
  for (int k = 0; k < 2; ++k) {
    MimeticPair m = mimetic_pair(c, k);
    EXPECT_EQ(intertwining_defect(m), 0.0);
    for (int t = 0; t < 20; ++t) {
      Eigen::VectorXd x = rng.gaussian(static_cast<Eigen::Index>(m.source_rel.size()));
      Eigen::VectorXd y = rng.gaussian(m.full.rows());
      EXPECT_LE(duality_residual(m, x, y), 1e-13);
    }
  }
}

TEST(Mimetic, DualityOnBall) {
  CubicalComplex c = build_complex(shape("ball", {1.0}, 0.25));
  Rng rng(5);
  for (int k = 0; k < 3; ++k) {
    MimeticPair m = mimetic_pair(c, k);
    EXPECT_EQ(intertwining_defect(m), 0.0);
    Eigen::VectorXd x = rng.gaussian(static_cast<Eigen::Index>(m.source_rel.size()));
    Eigen::VectorXd y = rng.gaussian(m.full.rows());
    EXPECT_LE(duality_residual(m, x, y), 1e-13);
  }
}

TEST(Mimetic, CurlPairInclusionIsExact) {
  MimeticPair m = mimetic_pair(build_complex(box({2, 2, 2}, 1.0)), 1);
  for (Weighting w : {Weighting::euclidean, Weighting::hodge}) {
    linrel::OperatorPair p = to_dense_pair(m, w);
    EXPECT_LE(linrel::inclusion_excess(p.a0, p.a), 1e-14);
  }
}

TEST(Mimetic, GradPairPassesSharpIdentities) {
  MimeticPair m = mimetic_pair(build_complex(box({1, 1}, 0.25)), 0);
  for (Weighting w : {Weighting::euclidean, Weighting::hodge}) {
    linrel::SharpPair sp = linrel::sharp(to_dense_pair(m, w));
    Report rep = linrel::verify_sharp_identities(sp, 1e-9);
    EXPECT_TRUE(rep.all_pass());
  }
}

TEST(Mimetic, SizeLimit) {
  MimeticPair m = mimetic_pair(build_complex(box({1, 1, 1}, 1.0 / 12)), 1);
  EXPECT_THROW(to_dense_pair(m), Error);
  EXPECT_THROW(mimetic_pair(build_complex(box({1, 1}, 0.5)), 2), Error);
}

TEST(Betti, ReferenceShapes) {
  for (double h : {0.25, 0.125}) {
    CubicalComplex ball = build_complex(shape("ball", {1.0}, h));
    CubicalComplex torus = build_complex(shape("solid-torus", {1.0, 0.5}, h));
    CubicalComplex shell = build_complex(shape("shell", {0.5, 1.0}, h));
    EXPECT_EQ(betti(ball), triple(1, 0, 0)) << h;
    EXPECT_EQ(betti(torus), triple(1, 1, 0)) << h;
    EXPECT_EQ(betti(shell), triple(1, 0, 1)) << h;
    EXPECT_EQ(betti_euler(ball), triple(1, 0, 0)) << h;
    EXPECT_EQ(betti_euler(torus), triple(1, 1, 0)) << h;
    EXPECT_EQ(betti_euler(shell), triple(1, 0, 1)) << h;
  }
}

TEST(Betti, FineResolutionByEuler) {
  EXPECT_EQ(betti_euler(build_complex(shape("solid-torus", {1.0, 0.5}, 1.0 / 16))), triple(1, 1, 0));
  EXPECT_EQ(betti_euler(build_complex(shape("shell", {0.5, 1.0}, 1.0 / 16))), triple(1, 0, 1));
  EXPECT_THROW(betti(build_complex(shape("ball", {1.0}, 1.0 / 16))), Error);
}

TEST(Betti, RankAndEulerAgreeOnRandomSets) {
  Rng rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    int d = 2 + trial % 2;
    std::vector<Cell> cells;
    double p = 0.3 + 0.5 * rng.uniform();
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        for (int k = 0; k < (d == 3 ? 5 : 1); ++k)
          if (rng.uniform() < p) cells.push_back({i, j, k});
    if (cells.empty()) continue;
    CubicalComplex c = build_complex(VoxelDomain(d, 1.0, cells));
    EXPECT_EQ(betti(c), betti_euler(c)) << trial;
  }
}

TEST(Betti, SquareAnnulus) {
  std::vector<Cell> cells;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != 1 || j != 1) cells.push_back({i, j, 0});
  CubicalComplex c = build_complex(VoxelDomain(2, 1.0, cells));
  EXPECT_EQ(betti(c), (std::vector<long>{1, 1}));
  EXPECT_EQ(betti_euler(c), (std::vector<long>{1, 1}));
}
