#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "smdeim/bench/config.hpp"
#include "smdeim/bench/csv.hpp"
#include "smdeim/bench/hash.hpp"
#include "smdeim/instrumentation.hpp"
#include "smdeim/jacobian_approx.hpp"
#include "smdeim/persistence.hpp"
#include "smdeim/pod.hpp"
#include "smdeim/rom.hpp"

namespace smdeim::bench {

namespace fs = std::filesystem;
using steady = std::chrono::steady_clock;

inline double seconds_since(steady::time_point t0) {
  return std::chrono::duration<double>(steady::now() - t0).count();
}

/// Full-order results for one model size.
struct PointData {
  FullModel model;
  std::vector<SnapshotSet> snapshots;  // one per stage
  DenseMatrix trajectory;              // n×N_t
  double full_mean_iterations = 0.0;
  double full_seconds = 0.0;
  std::size_t full_failures = 0;
};

/// Full-space Jacobian metrics of one interpolant, evaluated offline.
struct JacobianEval {
  std::string strategy;
  std::size_t m = 0;
  std::string status = "ok";
  double offline_seconds = 0.0;
  std::optional<double> full_error, heldout_error, largest_sv;
};

class Experiment {
 public:
  Experiment(ExperimentConfig cfg, std::function<void(const std::string&)> log = {})
      : cfg_(std::move(cfg)), log_(std::move(log)) {
    cfg_.validate();
  }

  const ExperimentConfig& config() const noexcept { return cfg_; }
  fs::path out() const { return cfg_.output_dir; }
  fs::path point_dir(std::size_t i) const { return out() / cfg_.size_label(i); }
  fs::path snapshot_path(std::size_t i, std::size_t stage) const {
    return point_dir(i) / ("snapshots_s" + std::to_string(stage) + ".smdm");
  }
  fs::path artifact_path(std::size_t i) const { return point_dir(i) / "artifact.smdr"; }
  fs::path plot_path(std::size_t i, const std::string& what) const {
    return out() / "plotdata" / (cfg_.size_label(i) + "_" + what + ".tsv");
  }
  fs::path results_path() const { return out() / "results.csv"; }

  std::uint64_t row_hash(std::size_t i, std::optional<std::size_t> k, std::optional<std::size_t> m,
                         const std::string& strategy) const {
    std::string s = cfg_.canonical_point(i) + ";strategy=" + strategy;
    s += ";k=" + (k ? std::to_string(*k) : std::string("NA"));
    s += ";m=" + (m ? std::to_string(*m) : std::string("NA"));
    return fnv1a(s);
  }

  /// (k, m, strategy) rows produced for a size point, in grid order.
  struct RowKey {
    std::size_t k;
    std::optional<std::size_t> m;
    JacobianStrategy strategy;
  };

  std::vector<RowKey> rom_rows() const {
    std::vector<RowKey> out;
    for (std::size_t k : cfg_.k)
      for (auto s : cfg_.strategies) {
        if (s == JacobianStrategy::Deim || needs_matrix_interpolant(s)) {
          for (std::size_t m : cfg_.m) out.push_back({k, m, s});
        } else {
          out.push_back({k, std::nullopt, s});
        }
      }
    return out;
  }

  // ------------------------------------------------------------ simulate

  PointData simulate(std::size_t i, std::vector<ResultRow>& rows) const {
    note("simulate " + cfg_.size_label(i));
    PointData p;
    p.model = cfg_.make_model(i);
    NewtonOptions opt = cfg_.newton;
    opt.abort_on_failure = true;
    const auto t0 = steady::now();
    auto res = full_solve(p.model, opt, true);
    p.full_seconds = seconds_since(t0);
    p.full_mean_iterations = res.stats.mean_iterations();
    p.full_failures = res.stats.failures.size();
    p.snapshots = std::move(res.snapshots);
    p.trajectory = std::move(res.trajectory);
    for (std::size_t s = 0; s < p.snapshots.size(); ++s) {
      std::map<std::string, io::Writer> extra;
      if (s == 0) {
        io::Writer full;
        full.f64(p.full_mean_iterations);
        full.f64(p.full_seconds);
        full.u64(p.full_failures);
        full.matrix(p.trajectory);
        extra.emplace("FULL", std::move(full));
      }
      io::save_snapshots(snapshot_path(i, s), p.snapshots[s], extra);
    }
    write_newton_tsv(plot_path(i, "newton_full"), res.stats.iterations, res.stats.residual_norms);
    ResultRow r = base_row(i);
    r.run_hash = row_hash(i, std::nullopt, std::nullopt, "full");
    r.strategy = "full";
    r.mean_newton_iterations = p.full_mean_iterations;
    r.trajectory_error = 0.0;
    r.online_seconds = p.full_seconds;
    rows.push_back(r);
    return p;
  }

  /// Loads the snapshot files written by simulate; the error names the missing file.
  PointData load_point(std::size_t i) const {
    PointData p;
    p.model = cfg_.make_model(i);
    for (std::size_t s = 0; s < p.model.stages().size(); ++s) {
      const auto path = snapshot_path(i, s);
      if (!fs::exists(path))
        throw IoError("snapshot file '" + path.string() + "' not found; run the simulate command first");
      auto f = io::load_snapshots(path);
      if (f.snapshots.config_hash != p.model.config_hash())
        throw IoError("snapshot file '" + path.string() + "' was produced by a different model configuration");
      if (s == 0) {
        auto it = f.blocks.find("FULL");
        if (it == f.blocks.end()) throw IoError("snapshot file '" + path.string() + "' lacks the FULL block");
        io::Reader r(it->second.data(), it->second.size(), path.string());
        p.full_mean_iterations = r.f64();
        p.full_seconds = r.f64();
        p.full_failures = r.u64();
        p.trajectory = r.matrix();
      }
      p.snapshots.push_back(std::move(f.snapshots));
    }
    return p;
  }

  // ------------------------------------------------------------ offline

  io::Artifact offline(std::size_t i, const PointData& p) const {
    note("offline " + cfg_.size_label(i));
    const auto& model = p.model;
    const std::size_t ns = model.stages().size();
    io::Artifact art;
    art.config_hash = model.config_hash();

    auto t0 = steady::now();
    const PodBasis pod = pod_basis(p.snapshots[0].states, cfg_.gamma, cfg_.k_max(), cfg_.centered);
    const double pod_seconds = seconds_since(t0);
    art.basis = pod;

    const bool want_smdeim = has(JacobianStrategy::Smdeim), want_mdeim = has(JacobianStrategy::MdeimReference),
               want_deim = has(JacobianStrategy::Deim);

    // Shared factorizations per stage.
    std::vector<SvdResult> gsvd(ns), psvd(ns);
    std::vector<PodBasis> fpod(ns);
    double gsvd_seconds = 0.0, psvd_seconds = 0.0, fpod_seconds = 0.0;
    std::string mdeim_status = "ok";
    if (want_smdeim) {
      t0 = steady::now();
      for (std::size_t s = 0; s < ns; ++s) gsvd[s] = gathered_svd(p.snapshots[s]);
      gsvd_seconds = seconds_since(t0);
    }
    if (want_mdeim) {
      try {
        t0 = steady::now();
        for (std::size_t s = 0; s < ns; ++s) psvd[s] = thin_svd(padded_snapshots(p.snapshots[s]));
        psvd_seconds = seconds_since(t0);
      } catch (const MemoryGuardError& e) {
        note(std::string("mdeim skipped: ") + e.what());
        mdeim_status = "skipped_guard";
      }
    }
    if (want_deim) {
      t0 = steady::now();
      for (std::size_t s = 0; s < ns; ++s)
        fpod[s] = pod_basis(p.snapshots[s].nonlinear, 1.0, p.snapshots[s].columns(), false);
      fpod_seconds = seconds_since(t0);
    }

    // Interpolants per m; evaluation metrics on stage 0.
    const Holdout ho = holdout(p.snapshots[0]);
    const SnapshotSet train = p.snapshots[0].select_columns(ho.train);
    std::optional<SvdResult> train_gsvd, train_psvd;
    std::optional<PodBasis> train_fpod;
    // Interpolant refit on the training columns, for the held-out metric.
    auto heldout_fit = [&](JacobianStrategy strat, std::size_t m) -> std::optional<StageInterpolants> {
      if (ho.test.empty()) return std::nullopt;
      StageInterpolants hs;
      try {
        if (strat == JacobianStrategy::Smdeim) {
          if (!train_gsvd) train_gsvd = gathered_svd(train);
          hs.matrix = build_smdeim(train.pattern, *train_gsvd, std::min(m, train_gsvd->left.cols()));
        } else if (strat == JacobianStrategy::MdeimReference) {
          if (!train_psvd) train_psvd = thin_svd(padded_snapshots(train));
          hs.matrix = mdeim_from_svd(train, *train_psvd, m);
        } else {
          if (!train_fpod) train_fpod = pod_basis(train.nonlinear, 1.0, train.columns(), false);
          if (m > train_fpod->k) return std::nullopt;
          hs.function = deim_interpolant(train_fpod->modes, m);
        }
      } catch (const RankError&) {
        return std::nullopt;
      }
      return hs;
    };
    std::map<std::pair<std::string, std::size_t>, std::vector<StageInterpolants>> interps;
    std::vector<JacobianEval> evals;
    auto build = [&](JacobianStrategy strat, std::size_t m) {
      JacobianEval ev;
      ev.strategy = std::string(strategy_name(strat));
      ev.m = m;
      std::vector<StageInterpolants> si(ns);
      try {
        const auto tb = steady::now();
        for (std::size_t s = 0; s < ns; ++s) {
          const auto& snap = p.snapshots[s];
          if (strat == JacobianStrategy::Smdeim) {
            if (m > snap.columns()) throw RankError(snap.columns() + 1, "m exceeds the number of snapshots");
            si[s].matrix = build_smdeim(snap.pattern, gsvd[s], m);
          } else if (strat == JacobianStrategy::MdeimReference) {
            if (mdeim_status != "ok") throw MemoryGuardError("guard");
            si[s].matrix = mdeim_from_svd(snap, psvd[s], m);
          } else {
            if (m > fpod[s].k) throw RankError(fpod[s].k + 1, "m exceeds the rank of the nonlinear snapshots");
            si[s].function = deim_interpolant(fpod[s].modes, m);
          }
        }
        ev.offline_seconds = seconds_since(tb) + (strat == JacobianStrategy::Smdeim   ? gsvd_seconds
                                                  : strat == JacobianStrategy::Deim ? fpod_seconds
                                                                                    : psvd_seconds);
        evaluate_jacobian(p, si[0], heldout_fit(strat, m), ho, ev);
        interps[{ev.strategy, m}] = std::move(si);
      } catch (const MemoryGuardError&) {
        ev.status = "skipped_guard";
      } catch (const RankError& e) {
        note(ev.strategy + " m=" + std::to_string(m) + ": " + e.what());
        ev.status = "rank_error";
      }
      evals.push_back(ev);
    };
    for (auto strat : cfg_.strategies)
      if (strat == JacobianStrategy::Deim || needs_matrix_interpolant(strat))
        for (std::size_t m : cfg_.m) build(strat, m);

    // Reduced models.
    for (const auto& key : rom_rows()) {
      const std::string sname(strategy_name(key.strategy));
      const PodBasis basis = truncate(pod, key.k);
      std::span<const StageInterpolants> si;
      double interp_seconds = 0.0;
      if (key.m) {
        auto it = interps.find({sname, *key.m});
        if (it == interps.end()) continue;  // failure recorded in the evaluation list
        si = it->second;
        for (const auto& ev : evals)
          if (ev.strategy == sname && ev.m == *key.m) interp_seconds = ev.offline_seconds;
      }
      ReducedModel rm = reduce_model(model, basis, key.strategy, si, cfg_.h);
      rm.offline_seconds += pod_seconds + interp_seconds;
      art.reduced.push_back(std::move(rm));
    }

    // Interpolants for the largest m, kept for inspection.
    const std::size_t mmax = cfg_.m_max();
    if (auto it = interps.find({"smdeim", mmax}); it != interps.end())
      for (const auto& si : it->second) art.interpolants.push_back(*si.matrix);
    if (auto it = interps.find({"deim", mmax}); it != interps.end())
      for (const auto& si : it->second) art.function_deim.push_back(*si.function);

    io::Writer ew;
    ew.u64(evals.size());
    for (const auto& ev : evals) {
      ew.str(ev.strategy);
      ew.u64(ev.m);
      ew.str(ev.status);
      ew.f64(ev.offline_seconds);
      for (const auto& v : {ev.full_error, ev.heldout_error, ev.largest_sv}) {
        ew.u32(v ? 1 : 0);
        ew.f64(v.value_or(0.0));
      }
    }
    auto bytes = io::encode_artifact(art);
    io::Writer tail;
    tail.block("EVAL", ew);
    bytes.insert(bytes.end(), tail.buffer().begin(), tail.buffer().end());
    io::write_file(artifact_path(i), bytes);

    write_spectrum_tsv(i, pod, want_smdeim ? gsvd[0].singular : std::vector<double>{});
    write_indexes_tsv(i, interps);
    return art;
  }

  // ------------------------------------------------------------ online

  void online(std::size_t i, const PointData& p, std::vector<ResultRow>& rows) const {
    note("online " + cfg_.size_label(i));
    const auto path = artifact_path(i);
    const auto bytes = [&] {
      if (!fs::exists(path))
        throw IoError("offline artifact '" + path.string() + "' not found; run the offline command first");
      return io::read_file(path);
    }();
    io::Artifact art = io::decode_artifact(bytes, path.string());
    if (art.config_hash != p.model.config_hash())
      throw IoError("artifact '" + path.string() + "' was built for a different model configuration");
    const auto evals = read_evals(bytes, path.string());
    auto shared_full = std::make_shared<const FullModel>(p.model);

    std::map<std::size_t, std::vector<std::string>> error_vs_m;
    std::size_t next = 0;
    for (const auto& key : rom_rows()) {
      const std::string sname(strategy_name(key.strategy));
      ResultRow r = base_row(i);
      r.run_hash = row_hash(i, key.k, key.m, sname);
      r.k = key.k;
      r.m = key.m;
      r.strategy = sname;
      if (key.strategy == JacobianStrategy::DirectionalDerivative) r.h = cfg_.h;
      const JacobianEval* ev = nullptr;
      if (key.m)
        for (const auto& e : evals)
          if (e.strategy == sname && e.m == *key.m) ev = &e;
      if (ev) {
        r.full_jacobian_error = ev->full_error;
        r.heldout_jacobian_error = ev->heldout_error;
        r.largest_sv_discrepancy = ev->largest_sv;
        if (ev->status != "ok") {
          r.status = ev->status;
          rows.push_back(r);
          continue;
        }
      }
      if (next >= art.reduced.size()) throw IoError("artifact '" + path.string() + "' is missing reduced models");
      ReducedModel& rm = art.reduced[next++];
      if (rm.strategy != key.strategy || rm.k() != std::min(key.k, art.basis->k))
        throw IoError("artifact '" + path.string() + "' does not match the configured grid; rerun offline");
      rm.full = shared_full;
      r.offline_seconds = rm.offline_seconds;
      const auto xt0 = rm.basis.project(p.model.initial_state());
      try {
        NewtonOptions opt = cfg_.newton;
        opt.abort_on_failure = false;
        const auto res = rom_solve(rm, xt0, p.model.time_points(), opt);
        if (res.online_svd_calls || res.online_deim_calls)
          throw Error("offline work detected inside the online section");
        r.online_seconds = res.stats.online_seconds;
        r.mean_newton_iterations = res.stats.mean_iterations();
        r.trajectory_error = trajectory_error(rm, res.trajectory, p.trajectory);
        if (!res.stats.failures.empty()) r.status = "newton_failed";
        std::string tag = sname + "_k" + std::to_string(key.k) + (key.m ? "_m" + std::to_string(*key.m) : "");
        write_newton_tsv(plot_path(i, "newton_" + tag), res.stats.iterations, res.stats.residual_norms);
      } catch (const Error& e) {
        note(sname + ": " + e.what());
        r.status = "error";
      }
      r.reduced_jacobian_error = reduced_jacobian_error(rm, xt0);
      if (key.m) {
        error_vs_m[key.k].push_back(std::to_string(*key.m) + '\t' + sname + '\t' +
                                    detail::opt(r.full_jacobian_error) + '\t' +
                                    detail::opt(r.heldout_jacobian_error) + '\t' +
                                    detail::opt(r.reduced_jacobian_error) + '\t' +
                                    detail::opt(r.largest_sv_discrepancy) + '\t' + detail::opt(r.trajectory_error));
      }
      rows.push_back(r);
    }
    for (const auto& [k, lines] : error_vs_m) {
      std::string body = "m\tstrategy\tfull_jacobian_error\theldout_jacobian_error\treduced_jacobian_error\t"
                         "largest_sv_discrepancy\ttrajectory_error\n";
      for (const auto& l : lines) body += l + '\n';
      write_text(plot_path(i, "error_vs_m_k" + std::to_string(k)), body);
    }
  }

  // ------------------------------------------------------------ commands

  enum class Command { Simulate, Offline, Online, Sweep };

  /// Runs a command over every size point; rows are appended in grid order.
  int run(Command cmd) const {
    ResultsFile results(results_path());
    const std::size_t npts = cfg_.sizes();
    std::vector<std::optional<std::vector<ResultRow>>> done(npts);
    std::vector<std::string> errors(npts);
    std::mutex mu;
    std::condition_variable cv;
    std::size_t next_point = 0, written = 0;
    int status = 0;

    auto work = [&](std::size_t i) {
      std::vector<ResultRow> rows;
      if (cmd == Command::Sweep && point_complete(results, i)) {
        note("skip " + cfg_.size_label(i) + " (all rows present)");
        return rows;
      }
      switch (cmd) {
        case Command::Simulate: simulate(i, rows); break;
        case Command::Offline: offline(i, load_point(i)); break;
        case Command::Online: online(i, load_point(i), rows); break;
        case Command::Sweep: {
          PointData p = simulate(i, rows);
          offline(i, p);
          online(i, p, rows);
          break;
        }
      }
      return rows;
    };
    auto flush = [&] {  // caller holds mu
      while (written < npts && done[written]) {
        for (auto& r : *done[written]) {
          if (cmd == Command::Sweep && results.contains(r.run_hash)) continue;
          r.timestamp = utc_timestamp();
          results.append(r);
        }
        if (!errors[written].empty()) status = 1;
        ++written;
      }
    };
    auto worker = [&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard lk(mu);
          if (next_point >= npts) return;
          i = next_point++;
        }
        std::vector<ResultRow> rows;
        std::string err;
        try {
          rows = work(i);
        } catch (const std::exception& e) {
          err = e.what();
          std::fprintf(stderr, "error: %s: %s\n", cfg_.size_label(i).c_str(), e.what());
        }
        std::lock_guard lk(mu);
        errors[i] = err.empty() ? "" : err;
        done[i] = std::move(rows);
        flush();
        cv.notify_all();
      }
    };
    const std::size_t nthreads = std::min(cfg_.jobs, npts);
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return status;
  }

 private:
  struct Holdout {
    std::vector<std::size_t> train, test;
  };

  bool has(JacobianStrategy s) const {
    return std::find(cfg_.strategies.begin(), cfg_.strategies.end(), s) != cfg_.strategies.end();
  }

  void note(const std::string& msg) const {
    if (log_) log_(msg);
  }

  ResultRow base_row(std::size_t i) const {
    ResultRow r;
    r.model = cfg_.model;
    const FullModel m = cfg_.make_model(i);
    r.n = m.n();
    if (cfg_.model == "swe") {
      r.nx = cfg_.swe_grid[i].nx;
      r.ny = cfg_.swe_grid[i].ny;
    }
    r.nt = m.time_points();
    r.gamma = cfg_.gamma;
    r.seed = cfg_.seed;
    return r;
  }

  bool point_complete(const ResultsFile& results, std::size_t i) const {
    if (!results.contains(row_hash(i, std::nullopt, std::nullopt, "full"))) return false;
    for (const auto& key : rom_rows())
      if (!results.contains(row_hash(i, key.k, key.m, std::string(strategy_name(key.strategy))))) return false;
    return true;
  }

  static PodBasis truncate(const PodBasis& pod, std::size_t k) {
    PodBasis b = pod;
    b.k = std::min(k, pod.k);
    b.modes = pod.modes.cols_range(0, b.k);
    return b;
  }

  /// Held-out split: every stride-th column (offset by the seed) is left out.
  Holdout holdout(const SnapshotSet& snap) const {
    Holdout h;
    const std::size_t stride = cfg_.heldout_stride;
    for (std::size_t c = 0; c < snap.columns(); ++c) {
      if (stride > 1 && c % stride == cfg_.seed % stride) h.test.push_back(c);
      else h.train.push_back(c);
    }
    return h;
  }

  static MatrixInterpolant mdeim_from_svd(const SnapshotSet& snap, const SvdResult& svd, std::size_t m) {
    if (m == 0 || m > snap.columns()) throw RankError(snap.columns() + 1, "m outside [1, n_s]");
    smdeim::detail::check_rank(svd.singular, snap.pattern.r(), m);
    MatrixInterpolant out;
    out.mode = InterpolantMode::MdeimReference;
    out.pattern = snap.pattern;
    out.singular = svd.singular;
    out.interp = deim_interpolant(svd.left, m);
    for (std::size_t o : out.interp.indexes) out.sample_coords.push_back({o % snap.n(), o / snap.n()});
    return out;
  }

  /// Dense full-space approximation of J_F at a state.
  static DenseMatrix approximate_dense(const models::QuadraticForm& form, const StageInterpolants& si,
                                       std::span<const double> x) {
    const std::size_t n = form.n();
    if (si.matrix) {
      const auto samples = form.sample_jacobian(x, si.matrix->sample_coords);
      return si.matrix->approximate_matrix(samples).to_dense();
    }
    const auto& fi = *si.function;
    const auto rows = sample_rows(form.nonlinear_jacobian(x), fi.indexes);
    DenseMatrix d = deim_function_jacobian(fi, rows).to_dense();
    const DenseMatrix l = form.linear().to_dense();
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < n; ++r) d(r, c) += l(r, c);
    return d;
  }

  static double relative_frobenius(const DenseMatrix& approx, const SparseMatrixCSR& exact) {
    const DenseMatrix e = exact.to_dense();
    const double ne = frobenius_norm(e);
    return frobenius_norm(subtract(approx, e)) / (ne > 0.0 ? ne : 1.0);
  }

  void evaluate_jacobian(const PointData& p, const StageInterpolants& si,
                         const std::optional<StageInterpolants>& heldout, const Holdout& ho,
                         JacobianEval& ev) const {
    const auto& snap = p.snapshots[0];
    const auto& form = p.model.stage(0).implicit_rhs;
    // Training protocol: initial snapshot.
    const auto x0 = snap.states.col(0);
    const auto j0 = form.jacobian(x0);
    const DenseMatrix a0 = approximate_dense(form, si, x0);
    ev.full_error = relative_frobenius(a0, j0);
    const double n2 = spectral_norm(j0);
    ev.largest_sv = spectral_norm(SparseMatrixCSR::from_dense(subtract(a0, j0.to_dense()))) / (n2 > 0 ? n2 : 1.0);
    if (!heldout) return;
    double sum = 0.0;
    for (std::size_t c : ho.test) {
      const auto x = snap.states.col(c);
      sum += relative_frobenius(approximate_dense(form, *heldout, x), form.jacobian(x));
    }
    ev.heldout_error = sum / static_cast<double>(ho.test.size());
  }

  static double reduced_jacobian_error(const ReducedModel& rm, std::span<const double> xt) {
    const auto& form = rm.full->stage(0).implicit_rhs;
    const DenseMatrix exact =
        multiply_tn(rm.basis.modes, multiply(form.jacobian(rm.basis.lift(xt)), rm.basis.modes));
    const DenseMatrix approx = reduced_jacobian(rm, xt, 0);
    const double ne = frobenius_norm(exact);
    return frobenius_norm(subtract(approx, exact)) / (ne > 0.0 ? ne : 1.0);
  }

  static std::vector<JacobianEval> read_evals(const std::vector<unsigned char>& bytes, const std::string& what) {
    io::Reader r(bytes.data(), bytes.size(), what);
    r.tag();
    r.u32();
    std::vector<JacobianEval> out;
    while (!r.done()) {
      auto [tag, sub] = r.block();
      if (tag != "EVAL") continue;
      const auto cnt = sub.u64();
      for (std::size_t q = 0; q < cnt; ++q) {
        JacobianEval ev;
        ev.strategy = sub.str();
        ev.m = sub.u64();
        ev.status = sub.str();
        ev.offline_seconds = sub.f64();
        for (auto* v : {&ev.full_error, &ev.heldout_error, &ev.largest_sv}) {
          const bool present = sub.u32() != 0;
          const double x = sub.f64();
          if (present) *v = x;
        }
        out.push_back(ev);
      }
    }
    return out;
  }

  static void write_text(const fs::path& path, const std::string& body) {
    io::write_file(path, std::vector<unsigned char>(body.begin(), body.end()));
  }

  static void write_newton_tsv(const fs::path& path, const std::vector<std::size_t>& its,
                               const std::vector<double>& res) {
    std::string body = "solve\titerations\tfinal_residual\n";
    for (std::size_t q = 0; q < its.size(); ++q)
      body += std::to_string(q + 1) + '\t' + std::to_string(its[q]) + '\t' + fmt17(res[q]) + '\n';
    write_text(path, body);
  }

  void write_spectrum_tsv(std::size_t i, const PodBasis& pod, const std::vector<double>& jac) const {
    std::string body = "index\tstate_singular_value\tstate_energy_fraction\tjacobian_singular_value\n";
    const std::size_t len = std::max(pod.singular.size(), jac.size());
    for (std::size_t q = 0; q < len; ++q) {
      body += std::to_string(q + 1) + '\t';
      body += q < pod.singular.size() ? fmt17(pod.singular[q]) + '\t' + fmt17(energy_fraction(pod.singular, q + 1))
                                      : std::string("NA\tNA");
      body += '\t' + (q < jac.size() ? fmt17(jac[q]) : std::string("NA")) + '\n';
    }
    write_text(plot_path(i, "spectrum"), body);
  }

  void write_indexes_tsv(std::size_t i,
                         const std::map<std::pair<std::string, std::size_t>, std::vector<StageInterpolants>>& in) const {
    const std::size_t mmax = cfg_.m_max();
    for (const char* name : {"smdeim", "mdeim"}) {
      auto it = in.find({name, mmax});
      if (it == in.end()) continue;
      std::string body = "stage\torder\tindex\trow\tcol\n";
      for (std::size_t s = 0; s < it->second.size(); ++s) {
        const auto& mi = *it->second[s].matrix;
        for (std::size_t q = 0; q < mi.m(); ++q)
          body += std::to_string(s) + '\t' + std::to_string(q + 1) + '\t' + std::to_string(mi.interp.indexes[q]) +
                  '\t' + std::to_string(mi.sample_coords[q].row) + '\t' + std::to_string(mi.sample_coords[q].col) +
                  '\n';
      }
      write_text(plot_path(i, std::string(name) + "_indexes"), body);
    }
  }

  ExperimentConfig cfg_;
  std::function<void(const std::string&)> log_;
};

}  // namespace smdeim::bench
