#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace smdeim;

namespace {

struct BurgersRom {
  FullModel model;
  FullSolveResult full;
  PodBasis basis;

  BurgersRom(std::size_t n, std::size_t nt, std::size_t k)
      : model(models::make_burgers(smdeim::testing::small_burgers(n, nt))),
        full(full_solve(model, {})),
        basis(pod_basis(full.snapshots.front().states, 1.0, k, false)) {}

  const SnapshotSet& snap() const { return full.snapshots.front(); }

  ReducedModel reduce(JacobianStrategy s, std::size_t m = 0, double h = 0.01) const {
    std::vector<StageInterpolants> in(1);
    if (s == JacobianStrategy::Smdeim) in[0].matrix = build_smdeim(snap(), m);
    if (s == JacobianStrategy::MdeimReference) in[0].matrix = build_mdeim_reference(snap(), m);
    if (s == JacobianStrategy::Deim) in[0].function = function_deim_basis(snap(), m);
    return reduce_model(model, basis, s, in, h);
  }

  std::vector<double> xt(std::size_t t) const { return basis.project(snap().states.col(t)); }
};

DenseMatrix oracle_reduced_jacobian(const BurgersRom& b, std::span<const double> xt) {
  const auto j = b.model.stage(0).implicit_rhs.jacobian(b.basis.lift(xt));
  return multiply_tn(b.basis.modes, multiply(j, b.basis.modes));
}

// Single-state model F(x) = x₀² in R³, handy for hand-computable tensors.
FullModel square_model() {
  models::QuadraticForm f(3, {}, SparseMatrixCSR(3, {0, 0, 0, 0}, {}, {}), {{0, 0, 0, 1.0}});
  models::Stage st{"implicit", 0.1, f, std::nullopt};
  return FullModel("square", 0, 0.1, 3, {0.5, 0.0, 0.0}, {st}, true);
}

FullModel zero_model() {
  models::QuadraticForm f(3, {}, SparseMatrixCSR(3, {0, 0, 0, 0}, {}, {}), {});
  models::Stage st{"implicit", 0.1, f, std::nullopt};
  return FullModel("zero", 0, 0.1, 5, {1.0, 2.0, 3.0}, {st}, true);
}

PodBasis unit_basis(std::size_t n, std::size_t k) {
  PodBasis b;
  b.modes = DenseMatrix(n, k);
  for (std::size_t j = 0; j < k; ++j) b.modes(j, j) = 1.0;
  b.k = k;
  b.mean.assign(n, 0.0);
  b.singular.assign(k, 1.0);
  return b;
}

}  // namespace

TEST(Strategy, NamesRoundTrip) {
  for (auto s : kAllStrategies) EXPECT_EQ(parse_strategy(strategy_name(s)), s);
  EXPECT_THROW(parse_strategy("qr"), ConfigError);
}

TEST(ReduceModel, UncenteredBasisHasZeroT1) {
  const BurgersRom b(31, 21, 5);
  const auto rm = b.reduce(JacobianStrategy::Tensorial);
  EXPECT_EQ(max_abs(rm.stages[0].implicit_form.t1.data()), 0.0);
}

TEST(ReduceModel, UnitBasisTensorIsScalarOne) {
  const auto rm = reduce_model(square_model(), unit_basis(3, 1), JacobianStrategy::Tensorial);
  const auto& f = rm.stages[0].implicit_form;
  ASSERT_EQ(f.gs.rows(), 1u);
  // g = U(0,0)³ = 1, stored symmetrized as g + g.
  EXPECT_DOUBLE_EQ(f.gs(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(f.evaluate(std::vector<double>{3.0})[0], 9.0);
}

TEST(ReduceModel, MissingPayloadRejected) {
  const BurgersRom b(31, 21, 5);
  EXPECT_THROW(reduce_model(b.model, b.basis, JacobianStrategy::Smdeim), ConfigError);
  std::vector<StageInterpolants> in(1);
  in[0].function = function_deim_basis(b.snap(), 5);
  EXPECT_THROW(reduce_model(b.model, b.basis, JacobianStrategy::Smdeim, in), ConfigError);
  EXPECT_THROW(reduce_model(b.model, b.basis, JacobianStrategy::DirectionalDerivative, {}, 0.0), ConfigError);
}

TEST(ReduceModel, SmdeimPayloadShapeAndOracle) {
  const BurgersRom b(41, 41, 8);
  const std::size_t m = 12;
  const auto rm = b.reduce(JacobianStrategy::Smdeim, m);
  EXPECT_EQ(rm.stages[0].hyper.product.rows(), 64u);
  EXPECT_EQ(rm.stages[0].hyper.product.cols(), m);
  // Uᵀ·(SMDEIM approximation of J)·U computed in full space.
  const auto mi = build_smdeim(b.snap(), m);
  for (std::size_t t : {0u, 13u, 40u}) {
    const auto xt = b.xt(t);
    const auto x = b.basis.lift(xt);
    const auto& f = b.model.stage(0).implicit_rhs;
    const auto approx = mi.approximate_matrix(f.sample_jacobian(x, mi.sample_coords));
    const auto oracle = multiply_tn(b.basis.modes, multiply(approx, b.basis.modes));
    const auto red = reduced_jacobian(rm, xt);
    EXPECT_LE(frobenius_norm(subtract(red, oracle)), 1e-10 * frobenius_norm(oracle));
  }
}

TEST(ReducedResidual, FixedPointOfZeroModel) {
  const auto rm = reduce_model(zero_model(), unit_basis(3, 2), JacobianStrategy::Tensorial);
  const std::vector<double> x{0.3, -0.2};
  for (double v : reduced_residual(rm, x, x, 0.1)) EXPECT_EQ(v, 0.0);
}

TEST(ReducedResidual, ZeroStepIsDifference) {
  const BurgersRom b(31, 21, 6);
  const auto rm = b.reduce(JacobianStrategy::Tensorial);
  const auto a = b.xt(3), p = b.xt(7);
  const auto r = reduced_residual(rm, a, p, 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_DOUBLE_EQ(r[i], a[i] - p[i]);
}

TEST(ReducedResidual, MatchesProjectedFullResidual) {
  const BurgersRom b(51, 41, 10);
  const auto rm = b.reduce(JacobianStrategy::Tensorial);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto xt = smdeim::testing::random_vector(10, seed), xp = smdeim::testing::random_vector(10, seed + 50);
    const auto x = b.basis.lift(xt), p = b.basis.lift(xp);
    const auto full = b.model.stage_residual(0, x, b.model.stage_base(0, p));
    const auto oracle = multiply_t(b.basis.modes, full);
    EXPECT_LE(smdeim::testing::rel_diff(reduced_residual(rm, xt, xp, b.model.stage(0).theta), oracle), 1e-10);
  }
}

TEST(ReducedJacobian, TensorialMatchesDirectProjection) {
  const BurgersRom b(101, 101, 20);
  const auto rt = b.reduce(JacobianStrategy::Tensorial);
  const auto rd = b.reduce(JacobianStrategy::DirectProjection);
  for (std::size_t t : {0u, 30u, 100u}) {
    const auto xt = b.xt(t);
    EXPECT_LE(smdeim::testing::max_abs_diff(reduced_jacobian(rt, xt), reduced_jacobian(rd, xt)), 1e-12);
    EXPECT_LE(smdeim::testing::max_abs_diff(reduced_jacobian(rd, xt), oracle_reduced_jacobian(b, xt)), 1e-12);
  }
}

TEST(ReducedJacobian, SmdeimMatchesMdeimReference) {
  const BurgersRom b(51, 101, 10);
  const auto rs = b.reduce(JacobianStrategy::Smdeim, 10);
  const auto rr = b.reduce(JacobianStrategy::MdeimReference, 10);
  for (std::size_t t = 0; t < b.snap().columns(); t += 10) {
    const auto xt = b.xt(t);
    EXPECT_LE(frobenius_norm(subtract(reduced_jacobian(rs, xt), reduced_jacobian(rr, xt))), 1e-10);
  }
}

TEST(ReducedJacobian, DirectionalDerivativeFirstOrder) {
  const BurgersRom b(101, 101, 10);
  const auto xt = b.xt(20);
  const auto exact = reduced_jacobian(b.reduce(JacobianStrategy::Tensorial), xt);
  const double e2 = frobenius_norm(subtract(reduced_jacobian(b.reduce(JacobianStrategy::DirectionalDerivative, 0, 1e-2), xt), exact));
  const double e3 = frobenius_norm(subtract(reduced_jacobian(b.reduce(JacobianStrategy::DirectionalDerivative, 0, 1e-3), xt), exact));
  EXPECT_NEAR(e2 / e3, 10.0, 3.0);
}

TEST(ReducedJacobian, SmdeimConvergesToExactAtFullOrder) {
  BurgersRom b(51, 11, 8);
  // Full left factor of the states so that lifting a projected training
  // state returns it; the energy rule alone would stop at the numerical rank.
  const auto svd = thin_svd(b.snap().states);
  b.basis.modes = svd.left;
  b.basis.k = svd.left.cols();
  const auto rs = b.reduce(JacobianStrategy::Smdeim, b.snap().columns());
  const auto rt = b.reduce(JacobianStrategy::Tensorial);
  for (std::size_t t = 0; t < b.snap().columns(); ++t) {
    const auto xt = b.xt(t);
    const auto exact = reduced_jacobian(rt, xt);
    EXPECT_LE(frobenius_norm(subtract(reduced_jacobian(rs, xt), exact)), 1e-8 * frobenius_norm(exact));
  }
}

TEST(ReducedJacobian, SmdeimFlopsIndependentOfN) {
  std::uint64_t flops[2] = {0, 0};
  const std::size_t ns[2] = {101, 201};
  for (int i = 0; i < 2; ++i) {
    const BurgersRom b(ns[i], 101, 10);
    const auto rm = b.reduce(JacobianStrategy::Smdeim, 15);
    const auto xt = b.xt(50);
    reset_counters();
    reduced_jacobian(rm, xt);
    flops[i] = counters().reduced_flops;
    EXPECT_EQ(counters().full_flops, 0u);
    EXPECT_EQ(counters().entry_evaluations, 15u);
  }
  EXPECT_EQ(flops[0], flops[1]);
}

TEST(RomSolve, ZeroModelIsConstant) {
  const auto rm = reduce_model(zero_model(), unit_basis(3, 2), JacobianStrategy::Tensorial);
  NewtonOptions opt;
  opt.guess = InitialGuess::Previous;
  const std::vector<double> x0{1.0, 2.0};
  const auto res = rom_solve(rm, x0, 5, opt);
  for (std::size_t t = 0; t < 5; ++t) {
    EXPECT_EQ(res.trajectory(0, t), 1.0);
    EXPECT_EQ(res.trajectory(1, t), 2.0);
  }
  for (auto it : res.stats.iterations) EXPECT_EQ(it, 1u);
}

TEST(RomSolve, NoOnlineFactorizations) {
  const BurgersRom b(51, 51, 10);
  for (auto s : {JacobianStrategy::Smdeim, JacobianStrategy::Deim, JacobianStrategy::Tensorial}) {
    const auto rm = b.reduce(s, 10);
    const auto res = rom_solve(rm, b.xt(0), 51);
    EXPECT_EQ(res.online_svd_calls, 0u);
    EXPECT_EQ(res.online_deim_calls, 0u);
    EXPECT_TRUE(res.stats.failures.empty());
  }
}

TEST(RomSolve, QuadraticNewtonPhase) {
  const BurgersRom b(101, 101, 15);
  const auto rm = b.reduce(JacobianStrategy::DirectProjection);
  auto x = b.xt(0);
  const double theta = rm.stages[0].theta;
  for (int step = 0; step < 20; ++step) {
    std::vector<double> norms;
    auto out = newton_solve(
        std::vector<double>(x.size(), 0.0),
        [&](const std::vector<double>& xt) {
          auto r = reduced_residual(rm, xt, x, theta);
          norms.push_back(norm2(r));
          return r;
        },
        [&](const std::vector<double>& xt, const std::vector<double>& r) {
          auto j = reduced_jacobian(rm, xt);
          for (std::size_t l = 0; l < j.cols(); ++l)
            for (std::size_t i = 0; i < j.rows(); ++i) j(i, l) = (i == l ? 1.0 : 0.0) - theta * j(i, l);
          return solve_dense(j, r);
        },
        NewtonOptions{});
    ASSERT_TRUE(out.converged);
    ASSERT_GE(norms.size(), 3u);
    const std::size_t last = norms.size() - 1;
    // Final two contractions: ‖r_{i+1}‖ ≤ C‖r_i‖².
    for (std::size_t i = last - 2; i < last; ++i)
      if (norms[i] > 1e-7) {
        EXPECT_LE(norms[i + 1], 10.0 * norms[i] * norms[i]) << step;
      }
    x = out.x;
  }
}

TEST(RomSolve, SmdeimTrajectoryMatchesTensorial) {
  const BurgersRom b(101, 201, 20);
  const auto rt = b.reduce(JacobianStrategy::Tensorial);
  const auto rs = b.reduce(JacobianStrategy::Smdeim, 25);
  const double et = trajectory_error(rt, rom_solve(rt, b.xt(0), 201).trajectory, b.full.trajectory);
  const double es = trajectory_error(rs, rom_solve(rs, b.xt(0), 201).trajectory, b.full.trajectory);
  EXPECT_LE(std::abs(es - et), 0.1 * et);
}

TEST(RomSolve, AbortOnFailureRaises) {
  const BurgersRom b(51, 21, 10);
  const auto rm = b.reduce(JacobianStrategy::Tensorial);
  NewtonOptions opt;
  opt.max_iterations = 1;
  EXPECT_THROW(rom_solve(rm, b.xt(0), 21, opt), NewtonError);
  opt.abort_on_failure = false;
  EXPECT_FALSE(rom_solve(rm, b.xt(0), 21, opt).stats.failures.empty());
}
