#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <vector>

#include "smdeim/errors.hpp"
#include "smdeim/linalg.hpp"
#include "smdeim/snapshots.hpp"

namespace smdeim::models {

/// F_row += coeff · x_a · x_b
struct QuadraticTerm {
  std::size_t row;
  std::size_t a;
  std::size_t b;
  double coeff;
};

/// Jacobian-row recipe: the states a row depends on and, per structural
/// entry, its constant part plus (local state, coefficient) contributions.
struct RowPlan {
  std::vector<std::size_t> states;        // global indexes, sorted
  std::vector<std::size_t> cols;          // structural columns, sorted
  std::vector<double> linear;             // L(row, col) per column
  std::vector<std::size_t> contrib_start; // cols.size() + 1 offsets
  std::vector<std::size_t> contrib_state; // local index into states
  std::vector<double> contrib_coeff;

  /// Entry values from the local states; include_linear = false gives the
  /// Jacobian of the quadratic part only.
  void evaluate(std::span<const double> local, std::span<double> out, bool include_linear) const {
    for (std::size_t e = 0; e < cols.size(); ++e) {
      double v = include_linear ? linear[e] : 0.0;
      for (std::size_t k = contrib_start[e]; k < contrib_start[e + 1]; ++k)
        v += contrib_coeff[k] * local[contrib_state[k]];
      out[e] = v;
    }
  }

  std::size_t entry(std::size_t col) const {
    auto it = std::lower_bound(cols.begin(), cols.end(), col);
    if (it == cols.end() || *it != col) return cols.size();
    return static_cast<std::size_t>(it - cols.begin());
  }
};

/// F(x) = c + L·x + Σ coeff·x_a·x_b, with the structural Jacobian pattern
/// (always including the diagonal).
class QuadraticForm {
 public:
  QuadraticForm() = default;

  QuadraticForm(std::size_t n, std::vector<double> constant, SparseMatrixCSR linear,
                std::vector<QuadraticTerm> terms)
      : n_(n), constant_(std::move(constant)), linear_(std::move(linear)), terms_(std::move(terms)) {
    if (constant_.empty()) constant_.assign(n_, 0.0);
    if (constant_.size() != n_ || linear_.rows() != n_ || linear_.cols() != n_)
      throw DimensionError("QuadraticForm: component dimensions differ from n");
    for (const auto& t : terms_)
      if (t.row >= n_ || t.a >= n_ || t.b >= n_)
        throw DimensionError("QuadraticForm: term index out of range");
    build_plans();
  }

  std::size_t n() const noexcept { return n_; }
  std::span<const double> constant() const noexcept { return constant_; }
  const SparseMatrixCSR& linear() const noexcept { return linear_; }
  std::span<const QuadraticTerm> terms() const noexcept { return terms_; }
  const SparsityPattern& pattern() const noexcept { return pattern_; }
  const RowPlan& row_plan(std::size_t row) const { return plans_.at(row); }

  std::vector<double> nonlinear(std::span<const double> x) const {
    check(x);
    std::vector<double> f(n_, 0.0);
    for (const auto& t : terms_) f[t.row] += t.coeff * x[t.a] * x[t.b];
    return f;
  }

  std::vector<double> evaluate(std::span<const double> x) const {
    auto f = spmv(linear_, x);
    for (std::size_t i = 0; i < n_; ++i) f[i] += constant_[i];
    for (const auto& t : terms_) f[t.row] += t.coeff * x[t.a] * x[t.b];
    return f;
  }

  /// Jacobian values in pattern (column-major) order.
  std::vector<double> jacobian_gathered(std::span<const double> x, bool include_linear = true) const {
    const auto csr = jacobian(x, include_linear);
    const auto perm = pattern_.csr_to_pattern();
    std::vector<double> out(pattern_.r());
    const auto v = csr.values();
    for (std::size_t q = 0; q < v.size(); ++q) out[perm[q]] = v[q];
    return out;
  }

  /// J_F(x) assembled on the structural pattern.
  SparseMatrixCSR jacobian(std::span<const double> x, bool include_linear = true) const {
    check(x);
    std::vector<double> vals(pattern_.r());
    const auto off = pattern_.csr_offsets();
    std::vector<double> local;
    for (std::size_t i = 0; i < n_; ++i) {
      const auto& p = plans_[i];
      local.resize(p.states.size());
      for (std::size_t s = 0; s < p.states.size(); ++s) local[s] = x[p.states[s]];
      p.evaluate(local, std::span<double>(vals.data() + off[i], p.cols.size()), include_linear);
    }
    return SparseMatrixCSR(n_, n_, {off.begin(), off.end()},
                           {pattern_.csr_cols().begin(), pattern_.csr_cols().end()}, std::move(vals));
  }

  SparseMatrixCSR nonlinear_jacobian(std::span<const double> x) const { return jacobian(x, false); }

  /// Entries of J_F(x) at arbitrary coordinates; 0 outside the pattern.
  /// Only the rows that are sampled are touched.
  std::vector<double> sample_jacobian(std::span<const double> x, std::span<const Coord> coords) const {
    check(x);
    std::vector<double> out(coords.size(), 0.0);
    std::vector<double> local, vals;
    for (std::size_t j = 0; j < coords.size(); ++j) {
      const auto& c = coords[j];
      if (c.row >= n_ || c.col >= n_) throw DimensionError("sample_jacobian: coordinate out of range");
      const auto& p = plans_[c.row];
      const std::size_t e = p.entry(c.col);
      if (e == p.cols.size()) continue;
      double v = p.linear[e];
      for (std::size_t k = p.contrib_start[e]; k < p.contrib_start[e + 1]; ++k)
        v += p.contrib_coeff[k] * x[p.states[p.contrib_state[k]]];
      out[j] = v;
    }
    return out;
  }

 private:
  void check(std::span<const double> x) const {
    if (x.size() != n_)
      throw DimensionError("QuadraticForm: state has " + std::to_string(x.size()) +
                           " entries, expected " + std::to_string(n_));
  }

  void build_plans() {
    std::vector<std::vector<const QuadraticTerm*>> by_row(n_);
    for (const auto& t : terms_) by_row[t.row].push_back(&t);
    plans_.assign(n_, RowPlan{});
    std::vector<Coord> coords;
    const auto off = linear_.row_offsets();
    const auto ci = linear_.col_indices();
    const auto lv = linear_.values();
    for (std::size_t i = 0; i < n_; ++i) {
      std::map<std::size_t, double> lin;
      lin[i] = 0.0;
      for (std::size_t k = off[i]; k < off[i + 1]; ++k) lin[ci[k]] += lv[k];
      std::vector<std::size_t> states;
      for (const auto* t : by_row[i]) {
        lin.try_emplace(t->a, 0.0);
        lin.try_emplace(t->b, 0.0);
        states.push_back(t->a);
        states.push_back(t->b);
      }
      std::sort(states.begin(), states.end());
      states.erase(std::unique(states.begin(), states.end()), states.end());
      auto local = [&](std::size_t g) {
        return static_cast<std::size_t>(std::lower_bound(states.begin(), states.end(), g) -
                                        states.begin());
      };
      RowPlan& p = plans_[i];
      p.states = states;
      // (entry col, local state) → coefficient, merged.
      std::map<std::pair<std::size_t, std::size_t>, double> contrib;
      for (const auto* t : by_row[i]) {
        contrib[{t->a, local(t->b)}] += t->coeff;
        contrib[{t->b, local(t->a)}] += t->coeff;
      }
      p.contrib_start.push_back(0);
      for (const auto& [col, l] : lin) {
        p.cols.push_back(col);
        p.linear.push_back(l);
        for (auto it = contrib.lower_bound({col, 0}); it != contrib.end() && it->first.first == col; ++it) {
          p.contrib_state.push_back(it->first.second);
          p.contrib_coeff.push_back(it->second);
        }
        p.contrib_start.push_back(p.contrib_state.size());
        coords.push_back({i, col});
      }
    }
    std::sort(coords.begin(), coords.end());
    pattern_ = SparsityPattern(n_, std::move(coords));
  }

  std::size_t n_ = 0;
  std::vector<double> constant_;
  SparseMatrixCSR linear_;
  std::vector<QuadraticTerm> terms_;
  std::vector<RowPlan> plans_;
  SparsityPattern pattern_;
};

}  // namespace smdeim::models
