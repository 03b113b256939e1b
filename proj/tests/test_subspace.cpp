#include <gtest/gtest.h>

#include <Eigen/LU>

#include "sharpspec/core/random.hpp"
#include "sharpspec/linrel/subspace.hpp"

using namespace sharpspec;
using namespace sharpspec::linrel;

TEST(Orthonormalize, CollinearVectorsGiveLine) {
  Subspace s = orthonormalize(std::vector<Eigen::VectorXd>{Eigen::Vector2d(1, 0), Eigen::Vector2d(2, 0)}, 2);
  ASSERT_EQ(s.dim(), 1);
  EXPECT_NEAR(std::abs(s.basis()(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(s.basis()(1, 0), 0.0, 1e-15);
}

TEST(Orthonormalize, EmptyListGivesZeroSubspace) {
  Subspace s = orthonormalize(std::vector<Eigen::VectorXd>{}, 4);
  EXPECT_EQ(s.dim(), 0);
  EXPECT_EQ(s.ambient_dim(), 4);
}

TEST(Orthonormalize, RandomVectorsMatchIndependentRank) {
  Rng rng(7);
  Eigen::MatrixXd m = rng.gaussian(10, 20);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  Subspace s = orthonormalize(m, 1e-12);
  EXPECT_EQ(s.dim(), lu.rank());
  EXPECT_EQ(s.dim(), 10);
  EXPECT_LE((s.basis().transpose() * s.basis() - Eigen::MatrixXd::Identity(10, 10)).norm(), 1e-13);
}

TEST(Orthonormalize, RejectsBadInput) {
  EXPECT_THROW(orthonormalize(std::vector<Eigen::VectorXd>{Eigen::Vector2d(1, 0), Eigen::Vector3d(1, 0, 0)}, 2), Error);
  EXPECT_THROW(orthonormalize(std::vector<Eigen::VectorXd>{}, 0), Error);
}

TEST(Subspace, ComplementIntersectionSum) {
  Rng rng(3);
  Subspace a = orthonormalize(rng.gaussian(9, 4));
  Subspace b = orthonormalize(rng.gaussian(9, 7));
  Subspace ac = complement(a);
  EXPECT_EQ(ac.dim(), 5);
  EXPECT_LE((a.basis().transpose() * ac.basis()).norm(), 1e-13);
  // generic 4- and 7-dim subspaces of R^9 meet in 2 dimensions
  Subspace i = intersection(a, b);
  EXPECT_EQ(i.dim(), 2);
  EXPECT_LE(a.excess(i.basis()), 1e-12);
  EXPECT_LE(b.excess(i.basis()), 1e-12);
  EXPECT_EQ(sum(a, b).dim(), 9);
}

TEST(Subspace, DistanceIsSineOfLargestAngle) {
  double t = 0.3;
  Eigen::MatrixXd u(2, 1), v(2, 1);
  u << 1, 0;
  v << std::cos(t), std::sin(t);
  EXPECT_NEAR(distance(Subspace::from_orthonormal(u), Subspace::from_orthonormal(v)), std::sin(t), 1e-15);
  EXPECT_EQ(distance(Subspace::zero(3), Subspace::full(3)), 1.0);
  EXPECT_EQ(distance(Subspace::zero(3), Subspace::zero(3)), 0.0);
}

TEST(Subspace, ComplementWithin) {
  Subspace w = Subspace::coordinate(4, {0, 1, 2});
  Subspace s = orthonormalize(Eigen::Vector4d(1, 1, 0, 5));
  Subspace c = complement_within(s, w);
  EXPECT_EQ(c.dim(), 2);
  EXPECT_LE(w.excess(c.basis()), 1e-14);
  EXPECT_LE((s.basis().transpose() * c.basis()).norm(), 1e-14);
}
