#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace smdeim;
using smdeim::testing::random_matrix;

namespace {

double reconstruction_error(const DenseMatrix& a, const SvdResult& s) {
  DenseMatrix us = s.left;
  for (std::size_t j = 0; j < us.cols(); ++j)
    for (double& v : us.col(j)) v *= s.singular[j];
  const DenseMatrix r = multiply(us, s.right.transposed());
  return frobenius_norm(subtract(r, a)) / frobenius_norm(a);
}

}  // namespace

TEST(ThinSvd, DiagonalCase) {
  const auto s = thin_svd(DenseMatrix::from_rows({{3, 0}, {0, 2}, {0, 0}}));
  ASSERT_EQ(s.singular.size(), 2u);
  EXPECT_NEAR(s.singular[0], 3.0, 1e-14);
  EXPECT_NEAR(s.singular[1], 2.0, 1e-14);
}

TEST(ThinSvd, IdentityUpToSign) {
  const auto s = thin_svd(DenseMatrix::identity(3));
  for (double v : s.singular) EXPECT_NEAR(v, 1.0, 1e-14);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(std::abs(s.left(i, j)), i == j ? 1.0 : 0.0, 1e-14);
      EXPECT_NEAR(std::abs(s.right(i, j)), i == j ? 1.0 : 0.0, 1e-14);
    }
}

TEST(ThinSvd, Random8x3Reconstruction) {
  const auto a = random_matrix(8, 3, 11);
  const auto s = thin_svd(a);
  EXPECT_LE(reconstruction_error(a, s), 1e-12);
}

TEST(ThinSvd, FirstNonzeroOfEachLeftVectorIsPositive) {
  const auto s = thin_svd(random_matrix(20, 6, 5));
  for (std::size_t j = 0; j < 6; ++j) {
    const auto c = s.left.col(j);
    const auto it = std::find_if(c.begin(), c.end(), [](double x) { return x != 0.0; });
    ASSERT_NE(it, c.end());
    EXPECT_GT(*it, 0.0);
  }
}

TEST(ThinSvd, RankDeficientHasTrailingZeros) {
  auto a = random_matrix(10, 4, 2);
  for (std::size_t i = 0; i < 10; ++i) a(i, 3) = a(i, 0) + 2.0 * a(i, 1);
  const auto s = thin_svd(a);
  EXPECT_LE(s.singular[3], 1e-12 * s.singular[0]);
  EXPECT_LE(reconstruction_error(a, s), 1e-12);
  EXPECT_LE(orthonormality_error(s.left), 1e-12 * 4);
}

TEST(ThinSvd, ZeroRowsStayExactlyZero) {
  auto a = random_matrix(12, 4, 8);
  for (std::size_t j = 0; j < 4; ++j) a(3, j) = a(7, j) = 0.0;
  const auto s = thin_svd(a);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(s.left(3, j), 0.0);
    EXPECT_EQ(s.left(7, j), 0.0);
  }
}

TEST(ThinSvd, RejectsWideInput) { EXPECT_THROW(thin_svd(DenseMatrix(2, 3)), DimensionError); }

TEST(ThinSvd, InvariantsOnSeededMatrices) {
  const std::size_t shapes[][2] = {{5, 1}, {7, 7}, {30, 10}, {120, 25}, {500, 50}};
  std::uint64_t seed = 100;
  for (std::size_t rep = 0; rep < 20; ++rep) {
    for (const auto& sh : shapes) {
      if (sh[0] == 500 && rep % 5 != 0) continue;
      const auto a = random_matrix(sh[0], sh[1], seed++);
      const auto s = thin_svd(a);
      ASSERT_LE(orthonormality_error(s.left), 1e-12 * static_cast<double>(sh[1]));
      ASSERT_LE(reconstruction_error(a, s), 1e-10);
      ASSERT_TRUE(std::is_sorted(s.singular.rbegin(), s.singular.rend()));
      for (double v : s.singular) ASSERT_GE(v, 0.0);
    }
  }
}

TEST(ThinSvd, SingularValuesInvariantUnderRowPermutation) {
  const auto a = random_matrix(40, 8, 77);
  std::vector<std::size_t> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(3));
  DenseMatrix b(40, 8);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 8; ++j) b(i, j) = a(perm[i], j);
  const auto sa = thin_svd(a).singular, sb = thin_svd(b).singular;
  for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(sa[j], sb[j], 1e-10 * sa[j]);
}

TEST(SolveDense, Identity) {
  const auto x = solve_dense(DenseMatrix::identity(2), std::vector<double>{5, 7});
  EXPECT_DOUBLE_EQ(x[0], 5.0);
  EXPECT_DOUBLE_EQ(x[1], 7.0);
}

TEST(SolveDense, Diagonal) {
  const auto x = solve_dense(DenseMatrix::from_rows({{2, 0}, {0, 4}}), std::vector<double>{2, 8});
  EXPECT_DOUBLE_EQ(x[0], 1.0);
  EXPECT_DOUBLE_EQ(x[1], 2.0);
}

TEST(SolveDense, MultiplyBackResidual) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = random_matrix(6, 6, seed);
    const auto b = smdeim::testing::random_vector(6, seed + 1000);
    const auto x = solve_dense(a, b);
    auto r = multiply(a, x);
    for (std::size_t i = 0; i < 6; ++i) r[i] -= b[i];
    EXPECT_LE(norm2(r), 1e-10 * (frobenius_norm(a) * norm2(x) + norm2(b)));
  }
}

TEST(SolveDense, IllConditionedStillMeetsResidualBound) {
  // cond = 1e8 via prescribed singular values
  const auto q1 = thin_svd(random_matrix(8, 8, 1)).left, q2 = thin_svd(random_matrix(8, 8, 2)).left;
  DenseMatrix d(8, 8);
  for (std::size_t i = 0; i < 8; ++i) d(i, i) = std::pow(10.0, -static_cast<double>(i) * 8.0 / 7.0);
  const auto a = multiply(multiply(q1, d), q2.transposed());
  const auto b = smdeim::testing::random_vector(8, 9);
  const auto x = solve_dense(a, b);
  auto r = multiply(a, x);
  for (std::size_t i = 0; i < 8; ++i) r[i] -= b[i];
  EXPECT_LE(norm2(r), 1e-10 * (frobenius_norm(a) * norm2(x) + norm2(b)));
}

TEST(SolveDense, SingularReportsPivot) {
  const auto a = DenseMatrix::from_rows({{1, 2, 3}, {2, 4, 6}, {0, 0, 1}});
  try {
    solve_dense(a, std::vector<double>{1, 1, 1});
    FAIL() << "expected SingularMatrixError";
  } catch (const SingularMatrixError& e) {
    EXPECT_LT(e.pivot(), 3u);
  }
}

TEST(SolveDense, NonSquareRejected) {
  EXPECT_THROW(solve_dense(DenseMatrix(2, 3), std::vector<double>{1, 1}), DimensionError);
}

TEST(Spmv, Identity) {
  const auto y = spmv(SparseMatrixCSR::identity(3), std::vector<double>{1, 2, 3});
  EXPECT_EQ(y, (std::vector<double>{1, 2, 3}));
}

TEST(Spmv, EmptyPatternGivesZero) {
  const SparseMatrixCSR a(3, {0, 0, 0, 0}, {}, {});
  EXPECT_EQ(spmv(a, std::vector<double>{4, 5, 6}), (std::vector<double>{0, 0, 0}));
}

TEST(Spmv, SecondDifferenceMatchesDense) {
  const std::size_t n = 7;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, -2.0});
    if (i > 0) t.push_back({i, i - 1, 1.0});
    if (i + 1 < n) t.push_back({i, i + 1, 1.0});
  }
  const auto a = SparseMatrixCSR::from_triplets(n, n, t);
  const std::vector<double> x(n, 3.0);
  const auto y = spmv(a, x);
  const auto yd = multiply(a.to_dense(), x);
  for (std::size_t i = 0; i < n; ++i) EXPECT_DOUBLE_EQ(y[i], yd[i]);
  EXPECT_NE(y.front(), 0.0);
  EXPECT_NE(y.back(), 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) EXPECT_EQ(y[i], 0.0);
}

TEST(Spmv, DimensionMismatch) {
  EXPECT_THROW(spmv(SparseMatrixCSR::identity(3), std::vector<double>{1, 2}), DimensionError);
}

TEST(SparseMatrix, RejectsDuplicateEntries) {
  EXPECT_THROW(SparseMatrixCSR::from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}), DimensionError);
}

TEST(SparseMatrix, RejectsUnsortedColumns) {
  EXPECT_THROW(SparseMatrixCSR(2, {0, 2, 2}, {1, 0}, {1.0, 1.0}), DimensionError);
}
