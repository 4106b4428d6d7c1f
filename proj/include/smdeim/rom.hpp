#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smdeim/deim.hpp"
#include "smdeim/errors.hpp"
#include "smdeim/instrumentation.hpp"
#include "smdeim/jacobian_approx.hpp"
#include "smdeim/linalg.hpp"
#include "smdeim/models/full_model.hpp"
#include "smdeim/pod.hpp"

namespace smdeim {

enum class JacobianStrategy { DirectProjection, Tensorial, DirectionalDerivative, Deim, MdeimReference, Smdeim };

inline constexpr std::array<JacobianStrategy, 6> kAllStrategies{
    JacobianStrategy::DirectProjection, JacobianStrategy::Tensorial, JacobianStrategy::DirectionalDerivative,
    JacobianStrategy::Deim,             JacobianStrategy::MdeimReference, JacobianStrategy::Smdeim};

inline std::string_view strategy_name(JacobianStrategy s) {
  switch (s) {
    case JacobianStrategy::DirectProjection: return "direct_projection";
    case JacobianStrategy::Tensorial: return "tensorial";
    case JacobianStrategy::DirectionalDerivative: return "directional_derivative";
    case JacobianStrategy::Deim: return "deim";
    case JacobianStrategy::MdeimReference: return "mdeim";
    case JacobianStrategy::Smdeim: return "smdeim";
  }
  return "?";
}

inline JacobianStrategy parse_strategy(std::string_view name) {
  for (auto s : kAllStrategies)
    if (strategy_name(s) == name) return s;
  throw ConfigError("unknown strategy '" + std::string(name) +
                    "' (expected direct_projection, tensorial, directional_derivative, deim, mdeim or smdeim)");
}

inline bool needs_matrix_interpolant(JacobianStrategy s) {
  return s == JacobianStrategy::MdeimReference || s == JacobianStrategy::Smdeim;
}

/// UᵀF(x̄ + Ux̃) = a0 + (lin + t1)x̃ + ½·reshape(gs·x̃)·x̃ for a quadratic F.
struct ReducedForm {
  std::vector<double> a0;  // k
  DenseMatrix lin;         // UᵀLU
  DenseMatrix t1;          // UᵀJ_Q(x̄)U, zero when uncentered
  DenseMatrix gs;          // k²×k; row l·k + j, column p holds g^j_lp + g^j_pl

  std::size_t k() const noexcept { return a0.size(); }

  /// Σ_p gs(·,p)·x̃_p reshaped to k×k: the derivative of the quadratic part.
  DenseMatrix quadratic_jacobian(std::span<const double> xt) const {
    const std::size_t kk = k();
    DenseMatrix out(kk, kk);
    auto o = out.data();
    for (std::size_t p = 0; p < kk; ++p) {
      const double xp = xt[p];
      if (xp == 0.0) continue;
      auto g = gs.col(p);
      for (std::size_t i = 0; i < kk * kk; ++i) o[i] += g[i] * xp;
    }
    return out;
  }

  std::vector<double> evaluate(std::span<const double> xt) const {
    const std::size_t kk = k();
    const DenseMatrix q = quadratic_jacobian(xt);
    std::vector<double> f = a0;
    for (std::size_t l = 0; l < kk; ++l) {
      const double xl = xt[l];
      for (std::size_t j = 0; j < kk; ++j) f[j] += (lin(j, l) + t1(j, l) + 0.5 * q(j, l)) * xl;
    }
    return f;
  }
};

/// Row-major copy of the basis rows used by the sampled evaluations.
struct SampledRow {
  std::size_t row = 0;
  std::size_t entry = 0;           // index into plan.cols; plan.cols.size() marks a structural zero
  models::RowPlan plan;
  DenseMatrix ustates;             // k × |plan.states|, column s = U(states[s], :)
  std::vector<double> mean_states;
  DenseMatrix ucols;               // k × |plan.cols| (function DEIM only)

  /// Lifted stencil states x̄ + U·x̃, restricted to the row.
  void lift(std::span<const double> xt, std::vector<double>& local) const {
    const std::size_t k = ustates.rows();
    local.resize(ustates.cols());
    for (std::size_t s = 0; s < local.size(); ++s) {
      auto u = ustates.col(s);
      double v = mean_states[s];
      for (std::size_t j = 0; j < k; ++j) v += u[j] * xt[j];
      local[s] = v;
    }
    counters().reduced_flops += 2 * k * local.size();
  }

  double entry_value(std::span<const double> local) const {
    if (entry == plan.cols.size()) return 0.0;
    double v = plan.linear[entry];
    for (std::size_t c = plan.contrib_start[entry]; c < plan.contrib_start[entry + 1]; ++c)
      v += plan.contrib_coeff[c] * local[plan.contrib_state[c]];
    counters().reduced_flops += 2 * (plan.contrib_start[entry + 1] - plan.contrib_start[entry]);
    return v;
  }
};

/// Offline products for the hyper-reduced strategies.
struct HyperPayload {
  DenseMatrix product;              // k²×m (matrix interpolants) or k×m UᵀV(PᵀV)⁻¹ (function DEIM)
  std::vector<SampledRow> samples;  // one per interpolation index
  std::vector<Coord> sample_coords;
  std::vector<std::size_t> indexes; // interpolation indexes (gathered, linear or row)
};

struct ReducedStage {
  std::string tag;
  double theta = 0.0;
  ReducedForm implicit_form;
  std::optional<ReducedForm> explicit_form;
  HyperPayload hyper;
};

struct ReducedModel {
  std::string model_id;
  std::uint64_t config_hash = 0;
  PodBasis basis;
  JacobianStrategy strategy = JacobianStrategy::Tensorial;
  double h = 0.01;
  double dt = 0.0;
  std::size_t time_points = 1;
  std::vector<ReducedStage> stages;
  double offline_seconds = 0.0;
  /// Full model, needed online only by the projection and directional-derivative strategies.
  std::shared_ptr<const FullModel> full;

  std::size_t k() const noexcept { return basis.k; }
};

/// Interpolants for one stage; which ones are required depends on the strategy.
struct StageInterpolants {
  std::optional<MatrixInterpolant> matrix;
  std::optional<DeimInterpolant> function;
};

namespace detail {

inline DenseMatrix basis_rows(const DenseMatrix& u, std::span<const std::size_t> rows) {
  DenseMatrix out(u.cols(), rows.size());
  for (std::size_t s = 0; s < rows.size(); ++s)
    for (std::size_t j = 0; j < u.cols(); ++j) out(j, s) = u(rows[s], j);
  return out;
}

inline ReducedForm reduce_form(const models::QuadraticForm& f, const PodBasis& b) {
  const DenseMatrix& u = b.modes;
  const std::size_t k = b.k;
  ReducedForm r;
  r.a0 = multiply_t(u, f.evaluate(b.mean));
  r.lin = multiply_tn(u, multiply(f.linear(), u));
  r.t1 = DenseMatrix(k, k);
  if (b.centered) r.t1 = multiply_tn(u, multiply(f.nonlinear_jacobian(b.mean), u));
  // g^j_lp = Σ_terms coeff·U(i,j)·U(a,l)·U(b,p), then symmetrized in (l,p).
  std::vector<double> g(k * k * k, 0.0);  // index (p·k + l)·k + j
  DenseMatrix ur = u.transposed();        // k×n, column i = U(i,:)
  std::vector<double> ab(k * k);
  for (const auto& t : f.terms()) {
    auto ui = ur.col(t.row), ua = ur.col(t.a), ubb = ur.col(t.b);
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t l = 0; l < k; ++l) ab[p * k + l] = t.coeff * ua[l] * ubb[p];
    for (std::size_t q = 0; q < k * k; ++q) {
      const double w = ab[q];
      if (w == 0.0) continue;
      double* gq = g.data() + q * k;
      for (std::size_t j = 0; j < k; ++j) gq[j] += w * ui[j];
    }
  }
  r.gs = DenseMatrix(k * k, k);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t l = 0; l < k; ++l)
      for (std::size_t j = 0; j < k; ++j)
        r.gs(l * k + j, p) = g[(p * k + l) * k + j] + g[(l * k + p) * k + j];
  return r;
}

/// Widest row stencil and widest single entry over all rows of f.
inline std::pair<std::size_t, std::size_t> stencil_widths(const models::QuadraticForm& f) {
  std::size_t states = 0, contribs = 0;
  for (std::size_t r = 0; r < f.n(); ++r) {
    const auto& p = f.row_plan(r);
    states = std::max(states, p.states.size());
    for (std::size_t e = 0; e < p.cols.size(); ++e)
      contribs = std::max(contribs, p.contrib_start[e + 1] - p.contrib_start[e]);
  }
  return {states, contribs};
}

/// widths != {0, 0} pads the lifted states and the sampled entry with zero
/// slots, so every sample costs the same whatever row it sits in.
inline SampledRow make_sampled_row(const models::QuadraticForm& f, const PodBasis& b, std::size_t row,
                                   std::size_t col, bool with_cols,
                                   std::pair<std::size_t, std::size_t> widths = {0, 0}) {
  SampledRow s;
  s.row = row;
  s.plan = f.row_plan(row);
  s.entry = s.plan.entry(col);
  s.ustates = basis_rows(b.modes, s.plan.states);
  for (std::size_t st : s.plan.states) s.mean_states.push_back(b.mean[st]);
  if (with_cols) s.ucols = basis_rows(b.modes, s.plan.cols);
  if (const std::size_t w = std::max(widths.first, s.plan.states.size()); w > s.plan.states.size()) {
    DenseMatrix u(s.ustates.rows(), w);
    for (std::size_t c = 0; c < s.ustates.cols(); ++c) std::ranges::copy(s.ustates.col(c), u.col(c).begin());
    s.ustates = std::move(u);
    s.mean_states.resize(w, 0.0);
  }
  if (s.entry < s.plan.cols.size() && s.ustates.cols() > 0) {
    auto& p = s.plan;
    const std::size_t have = p.contrib_start[s.entry + 1] - p.contrib_start[s.entry];
    if (widths.second > have) {
      const std::size_t extra = widths.second - have;
      const auto at = static_cast<std::ptrdiff_t>(p.contrib_start[s.entry + 1]);
      p.contrib_state.insert(p.contrib_state.begin() + at, extra, 0);
      p.contrib_coeff.insert(p.contrib_coeff.begin() + at, extra, 0.0);
      for (std::size_t e = s.entry + 1; e < p.contrib_start.size(); ++e) p.contrib_start[e] += extra;
    }
  }
  return s;
}

/// Π(:,t) = vec(Σ_q proj(q,t)·U(row_q,:)ᵀU(col_q,:)), row l·k + j.
template <class CoordOf>
DenseMatrix reduced_product(const DenseMatrix& ur, const DenseMatrix& proj, std::size_t k, CoordOf&& coord) {
  const std::size_t m = proj.cols();
  DenseMatrix out(k * k, m);
  for (std::size_t q = 0; q < proj.rows(); ++q) {
    const Coord c = coord(q);
    auto a = ur.col(c.row), bcol = ur.col(c.col);
    for (std::size_t t = 0; t < m; ++t) {
      const double w = proj(q, t);
      double* od = out.col(t).data();
      for (std::size_t l = 0; l < k; ++l) {
        const double bl = bcol[l] * w;
        for (std::size_t j = 0; j < k; ++j) od[l * k + j] += a[j] * bl;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Galerkin projection of every stage plus the strategy's offline payload.
inline ReducedModel reduce_model(const FullModel& model, const PodBasis& basis, JacobianStrategy strategy,
                                 std::span<const StageInterpolants> interps = {}, double h = 0.01) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  if (basis.n() != model.n()) throw DimensionError("reduce_model: basis dimension differs from the model");
  const std::size_t k = basis.k, ns = model.stages().size();
  const bool hyper = strategy == JacobianStrategy::Deim || needs_matrix_interpolant(strategy);
  if (hyper && interps.size() != ns)
    throw ConfigError("reduce_model: strategy " + std::string(strategy_name(strategy)) + " needs " +
                      std::to_string(ns) + " stage interpolant(s), got " + std::to_string(interps.size()));
  if (strategy == JacobianStrategy::DirectionalDerivative && !(h > 0.0))
    throw ConfigError("reduce_model: directional derivative step h must be positive");

  ReducedModel rm;
  rm.model_id = model.id();
  rm.config_hash = model.config_hash();
  rm.basis = basis;
  rm.strategy = strategy;
  rm.h = h;
  rm.dt = model.dt();
  rm.time_points = model.time_points();
  if (strategy == JacobianStrategy::DirectProjection || strategy == JacobianStrategy::DirectionalDerivative)
    rm.full = std::make_shared<const FullModel>(model);

  const DenseMatrix ur = basis.modes.transposed();
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& st = model.stage(s);
    ReducedStage rs;
    rs.tag = st.tag;
    rs.theta = st.theta;
    rs.implicit_form = detail::reduce_form(st.implicit_rhs, basis);
    if (st.explicit_rhs) rs.explicit_form = detail::reduce_form(*st.explicit_rhs, basis);
    if (hyper) {
      const auto& in = interps[s];
      auto& hp = rs.hyper;
      if (strategy == JacobianStrategy::Deim) {
        if (!in.function) throw ConfigError("reduce_model: DEIM strategy needs a function interpolant");
        const auto& fi = *in.function;
        if (fi.d() != model.n()) throw DimensionError("reduce_model: function interpolant dimension mismatch");
        hp.product = multiply_tn(basis.modes, fi.projector);
        hp.indexes = fi.indexes;
        for (std::size_t row : fi.indexes) {
          hp.samples.push_back(detail::make_sampled_row(st.implicit_rhs, basis, row, row, true));
          hp.sample_coords.push_back({row, row});
        }
      } else {
        if (!in.matrix) throw ConfigError("reduce_model: strategy needs a matrix interpolant");
        const auto& mi = *in.matrix;
        const bool ref = strategy == JacobianStrategy::MdeimReference;
        if (ref != (mi.mode == InterpolantMode::MdeimReference))
          throw ConfigError("reduce_model: interpolant mode does not match the strategy");
        if (mi.n() != model.n()) throw DimensionError("reduce_model: interpolant dimension mismatch");
        const std::size_t n = model.n();
        if (ref)
          hp.product = detail::reduced_product(ur, mi.interp.projector, k,
                                               [n](std::size_t o) { return Coord{o % n, o / n}; });
        else
          hp.product = detail::reduced_product(ur, mi.interp.projector, k,
                                               [&mi](std::size_t q) { return mi.pattern[q]; });
        hp.indexes = mi.interp.indexes;
        hp.sample_coords = mi.sample_coords;
        const auto widths = detail::stencil_widths(st.implicit_rhs);
        for (const auto& c : mi.sample_coords)
          hp.samples.push_back(detail::make_sampled_row(st.implicit_rhs, basis, c.row, c.col, false, widths));
      }
    }
    rm.stages.push_back(std::move(rs));
  }
  rm.offline_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  return rm;
}

/// F̃(x̃) = UᵀF(x̄ + Ux̃) for the implicit part of a stage, evaluated tensorially.
inline std::vector<double> reduced_rhs(const ReducedModel& rm, std::span<const double> xt, std::size_t stage = 0) {
  if (xt.size() != rm.k()) throw DimensionError("reduced_rhs: expected a length-k vector");
  return rm.stages.at(stage).implicit_form.evaluate(xt);
}

/// x̃ − (x̃_prev + θ·Ẽ(x̃_prev)) − θ·F̃(x̃) with θ = theta.
inline std::vector<double> reduced_residual(const ReducedModel& rm, std::span<const double> xt,
                                            std::span<const double> xt_prev, double theta, std::size_t stage = 0) {
  const std::size_t k = rm.k();
  if (xt.size() != k || xt_prev.size() != k) throw DimensionError("reduced_residual: expected length-k vectors");
  const auto& st = rm.stages.at(stage);
  std::vector<double> r(k);
  const auto f = st.implicit_form.evaluate(xt);
  std::vector<double> e;
  if (st.explicit_form) e = st.explicit_form->evaluate(xt_prev);
  for (std::size_t i = 0; i < k; ++i) {
    const double base = xt_prev[i] + (e.empty() ? 0.0 : theta * e[i]);
    r[i] = xt[i] - base - theta * f[i];
  }
  return r;
}

/// Reduced Jacobian J̃ of F̃ at x̃ by the model's strategy.
inline DenseMatrix reduced_jacobian(const ReducedModel& rm, std::span<const double> xt, std::size_t stage = 0) {
  const std::size_t k = rm.k();
  if (xt.size() != k) throw DimensionError("reduced_jacobian: expected a length-k vector");
  const auto& st = rm.stages.at(stage);
  auto& cnt = counters();
  switch (rm.strategy) {
    case JacobianStrategy::Tensorial: {
      DenseMatrix j = st.implicit_form.quadratic_jacobian(xt);
      for (std::size_t l = 0; l < k; ++l)
        for (std::size_t i = 0; i < k; ++i) j(i, l) += st.implicit_form.lin(i, l) + st.implicit_form.t1(i, l);
      cnt.reduced_flops += 2 * k * k * k + 2 * k * k;
      return j;
    }
    case JacobianStrategy::DirectProjection: {
      const auto& form = rm.full->stage(stage).implicit_rhs;
      const auto x = rm.basis.lift(xt);
      const auto jf = form.jacobian(x);
      const DenseMatrix ju = multiply(jf, rm.basis.modes);
      cnt.full_flops += 2 * rm.basis.n() * k + 2 * jf.nnz() * k + 2 * rm.basis.n() * k * k;
      return multiply_tn(rm.basis.modes, ju);
    }
    case JacobianStrategy::DirectionalDerivative: {
      const auto& form = rm.full->stage(stage).implicit_rhs;
      const DenseMatrix& u = rm.basis.modes;
      const std::size_t n = rm.basis.n();
      auto x = rm.basis.lift(xt);
      const auto f0 = multiply_t(u, form.evaluate(x));
      DenseMatrix j(k, k);
      std::vector<double> xp(n);
      for (std::size_t c = 0; c < k; ++c) {
        auto uc = u.col(c);
        for (std::size_t i = 0; i < n; ++i) xp[i] = x[i] + rm.h * uc[i];
        const auto fc = multiply_t(u, form.evaluate(xp));
        for (std::size_t i = 0; i < k; ++i) j(i, c) = (fc[i] - f0[i]) / rm.h;
      }
      cnt.full_flops += (k + 1) * (2 * n * k + 2 * form.linear().nnz() + 3 * form.terms().size());
      return j;
    }
    case JacobianStrategy::Deim: {
      const auto& hp = st.hyper;
      const std::size_t m = hp.samples.size();
      DenseMatrix w(m, k);  // row q = Σ_c J_N(ρ_q, c)·U(c,:)
      std::vector<double> local, vals;
      for (std::size_t q = 0; q < m; ++q) {
        const auto& s = hp.samples[q];
        s.lift(xt, local);
        vals.resize(s.plan.cols.size());
        s.plan.evaluate(local, vals, false);
        cnt.entry_evaluations += vals.size();
        cnt.reduced_flops += 2 * s.plan.contrib_state.size();
        for (std::size_t c = 0; c < vals.size(); ++c) {
          auto uc = s.ucols.col(c);
          for (std::size_t j = 0; j < k; ++j) w(q, j) += vals[c] * uc[j];
        }
        cnt.reduced_flops += 2 * k * vals.size();
      }
      DenseMatrix j = multiply(hp.product, w);
      for (std::size_t l = 0; l < k; ++l)
        for (std::size_t i = 0; i < k; ++i) j(i, l) += st.implicit_form.lin(i, l);
      cnt.reduced_flops += 2 * k * k * m + k * k;
      return j;
    }
    case JacobianStrategy::MdeimReference:
    case JacobianStrategy::Smdeim: {
      const auto& hp = st.hyper;
      const std::size_t m = hp.samples.size();
      std::vector<double> samples(m), local;
      for (std::size_t q = 0; q < m; ++q) {
        hp.samples[q].lift(xt, local);
        samples[q] = hp.samples[q].entry_value(local);
      }
      cnt.entry_evaluations += m;
      const auto v = multiply(hp.product, samples);
      cnt.reduced_flops += 2 * k * k * m;
      DenseMatrix j(k, k);
      for (std::size_t i = 0; i < k * k; ++i) j(i % k, i / k) = v[i];
      return j;
    }
  }
  throw Error("reduced_jacobian: unknown strategy");
}

struct RomSolveResult {
  DenseMatrix trajectory;  // k×N_t reduced states at the time levels
  NewtonStats stats;
  double jacobian_seconds = 0.0;
  std::size_t jacobian_calls = 0;
  /// Online SVD / index-selection calls; always zero for a well-formed run.
  std::uint64_t online_svd_calls = 0;
  std::uint64_t online_deim_calls = 0;
};

/// Implicit reduced integration; each stage solved by Newton on
/// x̃ − b̃ − θF̃(x̃) with matrix I − θJ̃.
inline RomSolveResult rom_solve(const ReducedModel& rm, std::span<const double> xt0, std::size_t time_points,
                                const NewtonOptions& opt = {}) {
  using clock = std::chrono::steady_clock;
  const std::size_t k = rm.k();
  if (xt0.size() != k) throw DimensionError("rom_solve: initial reduced state must have length k");
  if (time_points < 1) throw DimensionError("rom_solve: time_points must be at least 1");
  RomSolveResult res;
  res.stats.offline_seconds = rm.offline_seconds;
  res.trajectory = DenseMatrix(k, time_points);
  std::ranges::copy(xt0, res.trajectory.col(0).begin());
  const Counters before = counters();
  const auto t0 = clock::now();
  std::vector<double> x(xt0.begin(), xt0.end());
  for (std::size_t step = 1; step < time_points; ++step) {
    for (std::size_t s = 0; s < rm.stages.size(); ++s) {
      const auto& st = rm.stages[s];
      const double theta = st.theta;
      std::vector<double> base(x);
      if (st.explicit_form) {
        const auto e = st.explicit_form->evaluate(x);
        for (std::size_t i = 0; i < k; ++i) base[i] += theta * e[i];
      }
      std::vector<double> guess = opt.guess == InitialGuess::Previous ? x : std::vector<double>(k, 0.0);
      auto out = newton_solve(
          std::move(guess),
          [&](const std::vector<double>& xt) {
            const auto f = st.implicit_form.evaluate(xt);
            std::vector<double> r(k);
            for (std::size_t i = 0; i < k; ++i) r[i] = xt[i] - base[i] - theta * f[i];
            return r;
          },
          [&](const std::vector<double>& xt, const std::vector<double>& r) {
            const auto tj = clock::now();
            DenseMatrix j = reduced_jacobian(rm, xt, s);
            res.jacobian_seconds += std::chrono::duration<double>(clock::now() - tj).count();
            ++res.jacobian_calls;
            for (std::size_t l = 0; l < k; ++l)
              for (std::size_t i = 0; i < k; ++i) j(i, l) = (i == l ? 1.0 : 0.0) - theta * j(i, l);
            return solve_dense(j, r);
          },
          opt);
      res.stats.iterations.push_back(out.iterates);
      res.stats.residual_norms.push_back(out.residual);
      if (!out.converged) {
        res.stats.failures.push_back({step, s, out.residual});
        if (opt.abort_on_failure)
          throw NewtonError(step, s, out.residual,
                            "rom_solve: reduced Newton did not converge at step " + std::to_string(step) +
                                " stage " + st.tag + " (residual " + std::to_string(out.residual) + ")");
      }
      x = std::move(out.x);
    }
    std::ranges::copy(x, res.trajectory.col(step).begin());
  }
  res.stats.online_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  res.online_svd_calls = counters().svd_calls - before.svd_calls;
  res.online_deim_calls = counters().deim_calls - before.deim_calls;
  return res;
}

/// ‖X̃ − Uᵀ(X − x̄)‖_F / ‖Uᵀ(X − x̄)‖_F over the common time levels.
inline double trajectory_error(const ReducedModel& rm, const DenseMatrix& reduced, const DenseMatrix& full) {
  const std::size_t cols = std::min(reduced.cols(), full.cols());
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < cols; ++t) {
    const auto p = rm.basis.project(full.col(t));
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = reduced(i, t) - p[i];
      num += d * d;
      den += p[i] * p[i];
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace smdeim
