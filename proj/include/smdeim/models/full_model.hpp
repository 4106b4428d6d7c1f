#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smdeim/errors.hpp"
#include "smdeim/linalg.hpp"
#include "smdeim/models/quadratic_form.hpp"
#include "smdeim/snapshots.hpp"

namespace smdeim {

enum class InitialGuess { Zero, Previous };

struct NewtonOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 50;
  InitialGuess guess = InitialGuess::Zero;
  bool abort_on_failure = true;
};

struct StepFailure {
  std::size_t step = 0;
  std::size_t stage = 0;
  double residual = 0.0;
};

struct NewtonStats {
  std::vector<std::size_t> iterations;  // per stage solve, iterates incl. the initial guess
  std::vector<double> residual_norms;   // final residual per stage solve
  std::vector<StepFailure> failures;
  double offline_seconds = 0.0;
  double online_seconds = 0.0;

  double mean_iterations() const {
    if (iterations.empty()) return 0.0;
    double s = 0.0;
    for (auto it : iterations) s += static_cast<double>(it);
    return s / static_cast<double>(iterations.size());
  }
};

struct NewtonOutcome {
  std::vector<double> x;
  std::size_t iterates = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Plain Newton: stops once ‖r‖₂ < tol, at most max_iterations corrections.
template <class Residual, class Correction>
NewtonOutcome newton_solve(std::vector<double> x, Residual&& residual, Correction&& correction,
                           const NewtonOptions& opt) {
  NewtonOutcome out;
  for (std::size_t it = 0;; ++it) {
    const auto r = residual(x);
    out.residual = norm2(r);
    out.iterates = it + 1;
    if (out.residual < opt.tolerance) {
      out.converged = true;
      break;
    }
    if (it == opt.max_iterations || !std::isfinite(out.residual)) break;
    const auto dx = correction(x, r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= dx[i];
  }
  out.x = std::move(x);
  return out;
}

namespace models {

/// One implicit stage: x − (x_prev + θ·E(x_prev)) − θ·F(x) = 0.
struct Stage {
  std::string tag;
  double theta = 0.0;
  QuadraticForm implicit_rhs;
  std::optional<QuadraticForm> explicit_rhs;
};

/// A full-order model given as a sequence of implicit stages per time step.
class FullModel {
 public:
  FullModel() = default;
  FullModel(std::string id, std::uint64_t config_hash, double dt, std::size_t time_points,
            std::vector<double> initial, std::vector<Stage> stages, bool snapshot_includes_initial)
      : id_(std::move(id)),
        hash_(config_hash),
        dt_(dt),
        time_points_(time_points),
        initial_(std::move(initial)),
        stages_(std::move(stages)),
        include_initial_(snapshot_includes_initial) {
    if (stages_.empty()) throw DimensionError("FullModel: no stages");
    for (const auto& s : stages_)
      if (s.implicit_rhs.n() != initial_.size() ||
          (s.explicit_rhs && s.explicit_rhs->n() != initial_.size()))
        throw DimensionError("FullModel: stage dimension differs from the state");
  }

  const std::string& id() const noexcept { return id_; }
  std::uint64_t config_hash() const noexcept { return hash_; }
  std::size_t n() const noexcept { return initial_.size(); }
  double dt() const noexcept { return dt_; }
  std::size_t time_points() const noexcept { return time_points_; }
  std::span<const double> initial_state() const noexcept { return initial_; }
  std::span<const Stage> stages() const noexcept { return stages_; }
  const Stage& stage(std::size_t s) const { return stages_.at(s); }
  bool snapshot_includes_initial() const noexcept { return include_initial_; }
  const SparsityPattern& pattern(std::size_t s) const { return stage(s).implicit_rhs.pattern(); }

  /// b = x_prev + θ·E(x_prev)
  std::vector<double> stage_base(std::size_t s, std::span<const double> x_prev) const {
    const auto& st = stage(s);
    std::vector<double> b(x_prev.begin(), x_prev.end());
    if (st.explicit_rhs) {
      const auto e = st.explicit_rhs->evaluate(x_prev);
      for (std::size_t i = 0; i < b.size(); ++i) b[i] += st.theta * e[i];
    }
    return b;
  }

  std::vector<double> stage_residual(std::size_t s, std::span<const double> x,
                                     std::span<const double> base) const {
    const auto& st = stage(s);
    auto f = st.implicit_rhs.evaluate(x);
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = x[i] - base[i] - st.theta * f[i];
    return r;
  }

  /// I − θ·J_F(x) on the stage pattern.
  SparseMatrixCSR stage_residual_jacobian(std::size_t s, std::span<const double> x) const {
    const auto& st = stage(s);
    SparseMatrixCSR j = st.implicit_rhs.jacobian(x);
    auto v = j.values();
    const auto off = j.row_offsets();
    const auto ci = j.col_indices();
    for (std::size_t r = 0; r < j.rows(); ++r)
      for (std::size_t k = off[r]; k < off[r + 1]; ++k) v[k] = (ci[k] == r ? 1.0 : 0.0) - st.theta * v[k];
    return j;
  }

  /// Newton solve of one stage starting from x_prev.
  NewtonOutcome solve_stage(std::size_t s, std::span<const double> x_prev,
                            const NewtonOptions& opt) const {
    const auto base = stage_base(s, x_prev);
    std::vector<double> x0 = opt.guess == InitialGuess::Previous
                                 ? std::vector<double>(x_prev.begin(), x_prev.end())
                                 : std::vector<double>(n(), 0.0);
    return newton_solve(
        std::move(x0), [&](const std::vector<double>& x) { return stage_residual(s, x, base); },
        [&](const std::vector<double>& x, const std::vector<double>& r) {
          return SparseLuSolver(stage_residual_jacobian(s, x)).solve(r);
        },
        opt);
  }

 private:
  std::string id_;
  std::uint64_t hash_ = 0;
  double dt_ = 0.0;
  std::size_t time_points_ = 1;
  std::vector<double> initial_;
  std::vector<Stage> stages_;
  bool include_initial_ = true;
};

}  // namespace models

using models::FullModel;

struct FullSolveResult {
  DenseMatrix trajectory;  // n × N_t time levels
  NewtonStats stats;
  std::vector<SnapshotSet> snapshots;  // one per stage
};

/// Integrates the model over all time points; optionally collects snapshots
/// (Jacobian and nonlinear term of every stage evaluated at every snapshot state).
inline FullSolveResult full_solve(const FullModel& model, const NewtonOptions& opt,
                                  bool collect = true) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const std::size_t n = model.n(), nt = model.time_points(), ns = model.stages().size();
  FullSolveResult res;
  res.trajectory = DenseMatrix(n, nt);
  std::ranges::copy(model.initial_state(), res.trajectory.col(0).begin());
  std::vector<std::vector<double>> snap_states;
  if (model.snapshot_includes_initial())
    snap_states.emplace_back(model.initial_state().begin(), model.initial_state().end());
  std::vector<double> x(model.initial_state().begin(), model.initial_state().end());
  for (std::size_t step = 1; step < nt; ++step) {
    for (std::size_t s = 0; s < ns; ++s) {
      auto out = model.solve_stage(s, x, opt);
      res.stats.iterations.push_back(out.iterates);
      res.stats.residual_norms.push_back(out.residual);
      if (!out.converged) {
        res.stats.failures.push_back({step, s, out.residual});
        if (opt.abort_on_failure)
          throw NewtonError(step, s, out.residual,
                            "full_solve: Newton did not converge at step " + std::to_string(step) +
                                " stage " + model.stage(s).tag + " (residual " +
                                std::to_string(out.residual) + ")");
      }
      x = std::move(out.x);
      if (ns > 1 || !model.snapshot_includes_initial()) snap_states.push_back(x);
    }
    if (ns == 1 && model.snapshot_includes_initial()) snap_states.push_back(x);
    std::ranges::copy(x, res.trajectory.col(step).begin());
  }
  res.stats.online_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  if (!collect) return res;

  const std::size_t cols = snap_states.size();
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& form = model.stage(s).implicit_rhs;
    SnapshotSet set;
    set.model_id = model.id();
    set.config_hash = model.config_hash();
    set.stage = s;
    set.dt = model.dt();
    set.pattern = form.pattern();
    set.states = DenseMatrix(n, cols);
    set.nonlinear = DenseMatrix(n, cols);
    set.jacobian_values = DenseMatrix(set.pattern.r(), cols);
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& st = snap_states[c];
      std::ranges::copy(st, set.states.col(c).begin());
      std::ranges::copy(form.nonlinear(st), set.nonlinear.col(c).begin());
      std::ranges::copy(form.jacobian_gathered(st), set.jacobian_values.col(c).begin());
    }
    res.snapshots.push_back(std::move(set));
  }
  return res;
}

inline std::vector<SnapshotSet> collect_snapshots(const FullModel& model, const NewtonOptions& opt) {
  return full_solve(model, opt, true).snapshots;
}

}  // namespace smdeim
