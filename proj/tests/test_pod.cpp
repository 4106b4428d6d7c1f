#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "test_util.hpp"

using namespace smdeim;

namespace {

// Columns with prescribed singular values (3, 1).
DenseMatrix two_mode_matrix() {
  DenseMatrix s(4, 2);
  s(0, 0) = 3.0;
  s(1, 1) = 1.0;
  return s;
}

}  // namespace

TEST(EnergyFraction, HandValues) {
  const std::vector<double> s{3, 1};
  EXPECT_DOUBLE_EQ(energy_fraction(s, 1), 0.9);
  EXPECT_DOUBLE_EQ(energy_fraction(s, 2), 1.0);
  const std::vector<double> flat{1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(energy_fraction(flat, 2), 0.5);
}

TEST(EnergyFraction, Nondecreasing) {
  const std::vector<double> s{5, 4, 2, 1, 0.5, 0};
  double prev = 0.0;
  for (std::size_t m = 1; m <= s.size(); ++m) {
    const double f = energy_fraction(s, m);
    EXPECT_GE(f, prev);
    prev = f;
  }
  EXPECT_DOUBLE_EQ(prev, 1.0);
}

TEST(EnergyFraction, OutOfRange) {
  const std::vector<double> s{1, 1};
  EXPECT_THROW(energy_fraction(s, 0), DimensionError);
  EXPECT_THROW(energy_fraction(s, 3), DimensionError);
}

TEST(PodBasis, GammaPicksFirstMode) {
  const auto b = pod_basis(two_mode_matrix(), 0.9, 10, false);
  EXPECT_EQ(b.k, 1u);
  EXPECT_NEAR(b.singular[0], 3.0, 1e-14);
}

TEST(PodBasis, GammaOneGivesRank) {
  auto s = smdeim::testing::random_matrix(20, 6, 1);
  for (std::size_t i = 0; i < 20; ++i) s(i, 5) = s(i, 0) - s(i, 2);
  EXPECT_EQ(pod_basis(s, 1.0, 100, false).k, 5u);
}

TEST(PodBasis, RepeatedColumn) {
  DenseMatrix s(3, 4);
  for (std::size_t j = 0; j < 4; ++j) {
    s(0, j) = 1.0;
    s(1, j) = 2.0;
    s(2, j) = 2.0;
  }
  const auto b = pod_basis(s, 0.99, 10, false);
  ASSERT_EQ(b.k, 1u);
  EXPECT_NEAR(b.modes(0, 0), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(b.modes(1, 0), 2.0 / 3.0, 1e-14);
}

TEST(PodBasis, KMaxClamps) {
  EXPECT_EQ(pod_basis(smdeim::testing::random_matrix(15, 8, 3), 1.0, 3, false).k, 3u);
}

TEST(PodBasis, ZeroSnapshotsRejected) {
  EXPECT_THROW(pod_basis(DenseMatrix(5, 3), 0.99, 3, false), DegenerateInputError);
}

TEST(PodBasis, UncenteredMeanIsZero) {
  const auto b = pod_basis(smdeim::testing::random_matrix(10, 4, 9), 0.99, 4, false);
  for (double v : b.mean) EXPECT_EQ(v, 0.0);
}

TEST(PodBasis, CenteredSubtractsMean) {
  auto s = smdeim::testing::random_matrix(10, 5, 4);
  const auto b = pod_basis(s, 1.0, 5, true);
  for (std::size_t i = 0; i < 10; ++i) {
    double m = 0.0;
    for (std::size_t j = 0; j < 5; ++j) m += s(i, j);
    EXPECT_NEAR(b.mean[i], m / 5.0, 1e-14);
  }
  // Centered data has rank at most N − 1.
  EXPECT_EQ(b.k, 4u);
}

TEST(PodBasis, Orthonormal) {
  const auto b = pod_basis(smdeim::testing::burgers_snapshots().states, 1.0, 20, false);
  EXPECT_LE(orthonormality_error(b.modes), 1e-12 * static_cast<double>(b.k));
}

TEST(PodBasis, ProjectionErrorBoundedByTail) {
  const auto s = smdeim::testing::burgers_snapshots().states;
  const auto b = pod_basis(s, 1.0, 12, false);
  double tail = 0.0;
  for (std::size_t i = b.k; i < b.singular.size(); ++i) tail += b.singular[i] * b.singular[i];
  for (std::size_t t = 0; t < s.cols(); ++t) {
    const auto c = s.col(t);
    const auto l = b.lift(b.project(c));
    double e = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) e += (c[i] - l[i]) * (c[i] - l[i]);
    EXPECT_LE(e, tail + 1e-8);
  }
}

TEST(PodBasis, EigenRouteSpansSameSubspace) {
  // Method of snapshots: eigenvectors of SᵀS mapped back through S.
  const auto s = smdeim::testing::random_matrix(30, 8, 21);
  const std::size_t k = 4;
  const auto b = pod_basis(s, 1.0, k, false);
  Eigen::Map<const Eigen::MatrixXd> sm(s.data().data(), 30, 8);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sm.transpose() * sm);
  Eigen::MatrixXd ue(30, k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto idx = static_cast<Eigen::Index>(7 - j);
    ue.col(static_cast<Eigen::Index>(j)) = sm * es.eigenvectors().col(idx) / std::sqrt(es.eigenvalues()(idx));
  }
  Eigen::Map<const Eigen::MatrixXd> us(b.modes.data().data(), 30, static_cast<Eigen::Index>(k));
  const Eigen::VectorXd cosines = Eigen::JacobiSVD<Eigen::MatrixXd>(us.transpose() * ue).singularValues();
  for (Eigen::Index i = 0; i < cosines.size(); ++i) EXPECT_LE(std::acos(std::min(1.0, cosines(i))), 1e-6);
}
