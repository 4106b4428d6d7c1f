#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace smdeim;
using smdeim::testing::burgers_snapshots;

namespace {

double rel_frobenius(const SparseMatrixCSR& a, const SparseMatrixCSR& b) {
  const auto da = a.to_dense(), db = b.to_dense();
  return frobenius_norm(subtract(da, db)) / frobenius_norm(db);
}

std::vector<double> samples_of(const MatrixInterpolant& mi, const SparseMatrixCSR& j) {
  std::vector<double> s;
  for (const auto& c : mi.sample_coords) s.push_back(j.at(c.row, c.col));
  return s;
}

}  // namespace

TEST(BuildSmdeim, RankOneFamilyReproduced) {
  auto snap = burgers_snapshots(21, 6);
  for (std::size_t t = 1; t < snap.columns(); ++t)
    for (std::size_t q = 0; q < snap.pattern.r(); ++q) snap.jacobian_values(q, t) = snap.jacobian_values(q, 0);
  // n_s columns but rank 1: the gathered matrix needs at most n_s ≤ r columns.
  const auto mi = build_smdeim(snap, 1);
  const auto j0 = scatter(snap.jacobian_values.col(0), snap.pattern);
  EXPECT_LE(rel_frobenius(mi.approximate_matrix(samples_of(mi, j0)), j0), 1e-10);
  EXPECT_THROW(build_smdeim(snap, 2), RankError);
}

TEST(BuildSmdeim, FactorsGatheredMatrixOnly) {
  const auto snap = burgers_snapshots(51, 41);
  const auto mi = build_smdeim(snap, 10);
  EXPECT_EQ(mi.interp.d(), snap.pattern.r());
  EXPECT_EQ(mi.singular.size(), snap.columns());
}

TEST(BuildSmdeim, SampleCoordsInsidePattern) {
  const auto snap = burgers_snapshots(51, 41);
  const auto mi = build_smdeim(snap, 20);
  for (std::size_t i = 0; i < mi.m(); ++i) {
    EXPECT_TRUE(snap.pattern.contains(mi.sample_coords[i].row, mi.sample_coords[i].col));
    EXPECT_EQ(snap.pattern[mi.interp.indexes[i]], mi.sample_coords[i]);
  }
}

TEST(ApproximateMatrix, FullOrderReproducesTrainingColumns) {
  // Short run: every column must be numerically independent for m = n_s.
  const auto snap = burgers_snapshots(51, 11);
  const auto mi = build_smdeim(snap, snap.columns());
  for (std::size_t t = 0; t < snap.columns(); ++t) {
    const auto j = scatter(snap.jacobian_values.col(t), snap.pattern);
    const auto g = mi.approximate_gathered(samples_of(mi, j));
    EXPECT_LE(smdeim::testing::rel_diff(g, snap.jacobian_values.col(t)), 1e-8) << t;
  }
}

TEST(ApproximateMatrix, ZeroSamplesGiveZeroMatrix) {
  const auto mi = build_smdeim(burgers_snapshots(21, 11), 5);
  const auto z = mi.approximate_matrix(std::vector<double>(5, 0.0));
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
}

TEST(ApproximateMatrix, LinearInSamples) {
  const auto mi = build_smdeim(burgers_snapshots(21, 11), 6);
  const auto a = smdeim::testing::random_vector(6, 1), b = smdeim::testing::random_vector(6, 2);
  std::vector<double> c(6);
  for (std::size_t i = 0; i < 6; ++i) c[i] = 2.0 * a[i] - 3.0 * b[i];
  const auto ga = mi.approximate_gathered(a), gb = mi.approximate_gathered(b), gc = mi.approximate_gathered(c);
  for (std::size_t q = 0; q < ga.size(); ++q) EXPECT_NEAR(gc[q], 2.0 * ga[q] - 3.0 * gb[q], 1e-12);
}

TEST(ApproximateMatrix, LengthMismatch) {
  const auto mi = build_smdeim(burgers_snapshots(21, 11), 4);
  EXPECT_THROW(mi.approximate_matrix(std::vector<double>(3, 0.0)), DimensionError);
}

TEST(ApproximateMatrix, ErrorBoundDominates) {
  const auto snap = burgers_snapshots(51, 41);
  const auto mi = build_smdeim(snap, 8);
  for (std::size_t t = 0; t < snap.columns(); ++t) {
    const auto f = snap.jacobian_values.col(t);
    const auto fh = mi.interp.approximate(f);
    double e = 0.0;
    for (std::size_t q = 0; q < f.size(); ++q) e += (f[q] - fh[q]) * (f[q] - fh[q]);
    EXPECT_GE(deim_error_bound(mi.interp, f), std::sqrt(e) - 1e-12 * norm2(f));
  }
}

TEST(MdeimReference, MatchesSmdeimIndexesAboveNoiseFloor) {
  const auto snap = burgers_snapshots(51, 41);
  const auto svd = gathered_svd(snap);
  std::size_t m = 0;
  while (m < svd.singular.size() && svd.singular[m] > 1e-8 * svd.singular[0]) ++m;
  ASSERT_GE(m, 10u);
  const auto ref = build_mdeim_reference(snap, m);
  const auto sm = build_smdeim(snap, m);
  EXPECT_EQ(ref.sample_coords, sm.sample_coords);
  for (std::size_t i = 0; i < m; ++i) EXPECT_EQ(ref.interp.indexes[i], snap.pattern.linear_index(sm.interp.indexes[i]));
}

TEST(MdeimReference, ZeroPatternRowsExactlyZero) {
  const auto snap = burgers_snapshots(21, 11);
  const auto svd = thin_svd(padded_snapshots(snap));
  const std::size_t n = snap.n();
  for (std::size_t o = 0; o < n * n; ++o) {
    if (snap.pattern.contains(o % n, o / n)) continue;
    for (std::size_t j = 0; j < svd.left.cols(); ++j) ASSERT_EQ(svd.left(o, j), 0.0);
  }
}

TEST(MdeimReference, PerturbationDensifiesSingularVectors) {
  const auto snap = burgers_snapshots(21, 11);
  auto padded = padded_snapshots(snap);
  const auto noise = smdeim::testing::random_vector(padded.size(), 42);
  for (std::size_t i = 0; i < padded.size(); ++i) padded.data()[i] += 1e-16 * noise[i];
  const auto svd = thin_svd(padded);
  std::size_t nnz = 0;
  for (double v : svd.left.col(0)) nnz += v != 0.0;
  EXPECT_GT(nnz, snap.pattern.r());
}

TEST(MdeimReference, GuardRefusesLargeN) {
  const auto snap = burgers_snapshots(21, 6);
  EXPECT_THROW(build_mdeim_reference(snap, 2, 10), MemoryGuardError);
  EXPECT_THROW(verify_lemma2(snap, 10), MemoryGuardError);
}

TEST(VerifyLemma2, Burgers51) {
  const auto rep = verify_lemma2(burgers_snapshots(51, 101));
  EXPECT_LE(rep.residual, 1e-10);
  EXPECT_LE(rep.orthonormality_error, 1e-12);
}

TEST(VerifyLemma2, SingleSnapshot) {
  const auto rep = verify_lemma2(burgers_snapshots(21, 1));
  EXPECT_LE(rep.residual, 1e-12);
  EXPECT_LE(rep.orthonormality_error, 1e-12);
}

TEST(FunctionDeimJacobian, SampledRowsReproduced) {
  const auto snap = burgers_snapshots(51, 41);
  const auto fb = function_deim_basis(snap, 10);
  const auto model = models::make_burgers(smdeim::testing::small_burgers(51, 41));
  const auto j = model.stage(0).implicit_rhs.jacobian(snap.states.col(7));
  const auto approx = deim_function_jacobian(fb, sample_rows(j, fb.indexes)).to_dense();
  const auto jd = j.to_dense();
  for (std::size_t r : fb.indexes)
    for (std::size_t c = 0; c < jd.cols(); ++c) EXPECT_NEAR(approx(r, c), jd(r, c), 1e-10 * max_abs(jd.data()));
}

TEST(FunctionDeimJacobian, IdentityBasisIsExact) {
  const auto model = models::make_burgers(smdeim::testing::small_burgers(12, 2));
  const auto j = model.stage(0).implicit_rhs.jacobian(model.initial_state());
  const auto fb = deim_interpolant(DenseMatrix::identity(model.n()), model.n());
  const auto approx = deim_function_jacobian(fb, sample_rows(j, fb.indexes)).to_dense();
  EXPECT_LE(smdeim::testing::max_abs_diff(approx, j.to_dense()), 1e-14);
}

TEST(FunctionDeimJacobian, RowCountChecked) {
  const auto fb = deim_interpolant(DenseMatrix::identity(4), 2);
  EXPECT_THROW(deim_function_jacobian(fb, SparseMatrixCSR::identity(4)), DimensionError);
}

TEST(FunctionDeimJacobian, WorseThanSmdeimAtInitialTime) {
  const auto cfg = smdeim::testing::small_burgers(101, 201);
  const auto model = models::make_burgers(cfg);
  const auto snap = collect_snapshots(model, {}).front();
  const auto j0 = model.stage(0).implicit_rhs.jacobian(snap.states.col(0));
  const auto svd = gathered_svd(snap);
  for (std::size_t m : {15u, 20u, 30u}) {
    const auto mi = build_smdeim(snap.pattern, svd, m);
    const double e_sm = rel_frobenius(mi.approximate_matrix(samples_of(mi, j0)), j0);
    const auto fb = function_deim_basis(snap, m);
    const auto jd = deim_function_jacobian(fb, sample_rows(j0, fb.indexes)).to_dense();
    const double e_deim = frobenius_norm(subtract(jd, j0.to_dense())) / frobenius_norm(j0.to_dense());
    EXPECT_GT(e_deim, e_sm) << "m = " << m;
  }
}
