#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smdeim/errors.hpp"
#include "smdeim/linalg.hpp"

namespace smdeim {

/// Matrix coordinate; ordering is column-major (by column, then row).
struct Coord {
  std::size_t row = 0;
  std::size_t col = 0;

  friend bool operator==(const Coord&, const Coord&) = default;
  friend std::strong_ordering operator<=>(const Coord& a, const Coord& b) {
    if (auto c = a.col <=> b.col; c != 0) return c;
    return a.row <=> b.row;
  }
};

/// Ordered nonzero coordinate set of an n×n matrix.
class SparsityPattern {
 public:
  SparsityPattern() = default;

  SparsityPattern(std::size_t n, std::vector<Coord> coords) : n_(n), coords_(std::move(coords)) {
    for (std::size_t j = 0; j < coords_.size(); ++j) {
      const auto& c = coords_[j];
      if (c.row >= n_ || c.col >= n_)
        throw DimensionError("SparsityPattern: coordinate (" + std::to_string(c.row) + "," +
                             std::to_string(c.col) + ") outside " + std::to_string(n_) + "x" +
                             std::to_string(n_));
      if (j > 0 && !(coords_[j - 1] < c))
        throw DimensionError("SparsityPattern: coordinates not strictly increasing in column-major order");
    }
    build_index();
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t r() const noexcept { return coords_.size(); }
  std::span<const Coord> coords() const noexcept { return coords_; }
  const Coord& operator[](std::size_t j) const { return coords_[j]; }

  /// Column-major linear index col·n + row of entry j.
  std::size_t linear_index(std::size_t j) const { return coords_[j].col * n_ + coords_[j].row; }

  /// Position of (row, col) in coords, or r() when absent.
  std::size_t find(std::size_t row, std::size_t col) const {
    if (row >= n_ || col >= n_) return r();
    const auto first = coords_.begin() + static_cast<std::ptrdiff_t>(col_start_[col]);
    const auto last = coords_.begin() + static_cast<std::ptrdiff_t>(col_start_[col + 1]);
    const auto it = std::lower_bound(first, last, row,
                                     [](const Coord& c, std::size_t rr) { return c.row < rr; });
    if (it == last || it->row != row) return r();
    return static_cast<std::size_t>(it - coords_.begin());
  }

  bool contains(std::size_t row, std::size_t col) const { return find(row, col) != r(); }

  /// Row-major skeleton: CSR offsets/columns and, per CSR slot, the pattern position.
  std::span<const std::size_t> csr_offsets() const noexcept { return csr_offsets_; }
  std::span<const std::size_t> csr_cols() const noexcept { return csr_cols_; }
  std::span<const std::size_t> csr_to_pattern() const noexcept { return csr_to_pattern_; }

  friend bool operator==(const SparsityPattern& a, const SparsityPattern& b) {
    return a.n_ == b.n_ && a.coords_ == b.coords_;
  }

 private:
  void build_index() {
    col_start_.assign(n_ + 1, 0);
    for (const auto& c : coords_) ++col_start_[c.col + 1];
    for (std::size_t j = 0; j < n_; ++j) col_start_[j + 1] += col_start_[j];

    csr_offsets_.assign(n_ + 1, 0);
    for (const auto& c : coords_) ++csr_offsets_[c.row + 1];
    for (std::size_t i = 0; i < n_; ++i) csr_offsets_[i + 1] += csr_offsets_[i];
    csr_cols_.resize(coords_.size());
    csr_to_pattern_.resize(coords_.size());
    std::vector<std::size_t> next(csr_offsets_.begin(), csr_offsets_.end() - 1);
    // Column-major traversal fills each row in increasing column order.
    for (std::size_t j = 0; j < coords_.size(); ++j) {
      const std::size_t slot = next[coords_[j].row]++;
      csr_cols_[slot] = coords_[j].col;
      csr_to_pattern_[slot] = j;
    }
  }

  std::size_t n_ = 0;
  std::vector<Coord> coords_;
  std::vector<std::size_t> col_start_{0};
  std::vector<std::size_t> csr_offsets_{0};
  std::vector<std::size_t> csr_cols_;
  std::vector<std::size_t> csr_to_pattern_;
};

inline SparsityPattern build_pattern(const SparseMatrixCSR& j) {
  if (j.rows() != j.cols()) throw DimensionError("build_pattern: matrix is not square");
  std::vector<Coord> coords;
  coords.reserve(j.nnz());
  const auto off = j.row_offsets();
  const auto ci = j.col_indices();
  for (std::size_t r = 0; r < j.rows(); ++r)
    for (std::size_t k = off[r]; k < off[r + 1]; ++k) coords.push_back({r, ci[k]});
  std::sort(coords.begin(), coords.end());
  return SparsityPattern(j.rows(), std::move(coords));
}

inline SparsityPattern pattern_union(std::span<const SparsityPattern> patterns) {
  if (patterns.empty()) return {};
  const std::size_t n = patterns.front().n();
  std::vector<Coord> all;
  for (const auto& p : patterns) {
    if (p.n() != n)
      throw DimensionError("pattern_union: dimension " + std::to_string(p.n()) + " differs from " +
                           std::to_string(n));
    all.insert(all.end(), p.coords().begin(), p.coords().end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return SparsityPattern(n, std::move(all));
}

/// P̄∘T: values of J at the pattern coordinates, 0 where J stores nothing.
inline std::vector<double> gather(const SparseMatrixCSR& j, const SparsityPattern& p) {
  if (j.rows() != p.n() || j.cols() != p.n())
    throw DimensionError("gather: matrix dimension does not match pattern");
  std::vector<double> out(p.r(), 0.0);
  const auto off = j.row_offsets();
  const auto ci = j.col_indices();
  const auto v = j.values();
  const auto po = p.csr_offsets();
  const auto pc = p.csr_cols();
  const auto perm = p.csr_to_pattern();
  for (std::size_t r = 0; r < j.rows(); ++r) {
    std::size_t q = po[r];
    for (std::size_t k = off[r]; k < off[r + 1]; ++k) {
      const std::size_t c = ci[k];
      while (q < po[r + 1] && pc[q] < c) ++q;
      if (q == po[r + 1] || pc[q] != c)
        throw PatternViolation(r, c, "gather: entry (" + std::to_string(r) + "," +
                                         std::to_string(c) + ") lies outside the sparsity pattern");
      out[perm[q]] = v[k];
    }
  }
  return out;
}

/// T⁻¹∘P̄ᵀ: the matrix with exactly pattern p and values v.
inline SparseMatrixCSR scatter(std::span<const double> v, const SparsityPattern& p) {
  if (v.size() != p.r())
    throw DimensionError("scatter: got " + std::to_string(v.size()) + " values for a pattern of " +
                         std::to_string(p.r()) + " entries");
  const auto perm = p.csr_to_pattern();
  std::vector<double> vals(p.r());
  for (std::size_t q = 0; q < p.r(); ++q) vals[q] = v[perm[q]];
  return SparseMatrixCSR(p.n(), p.n(), {p.csr_offsets().begin(), p.csr_offsets().end()},
                         {p.csr_cols().begin(), p.csr_cols().end()}, std::move(vals));
}

/// Time series from a full-order run: states, nonlinear terms and gathered
/// Jacobian values for one implicit stage.
struct SnapshotSet {
  std::string model_id;
  std::uint64_t config_hash = 0;
  std::size_t stage = 0;
  double dt = 0.0;
  DenseMatrix states;           // n×N
  DenseMatrix nonlinear;        // n×N
  SparsityPattern pattern;
  DenseMatrix jacobian_values;  // r×N

  std::size_t n() const noexcept { return states.rows(); }
  std::size_t columns() const noexcept { return states.cols(); }

  void validate() const {
    if (nonlinear.cols() != states.cols() || jacobian_values.cols() != states.cols())
      throw DimensionError("SnapshotSet: column counts differ across members");
    if (nonlinear.rows() != states.rows() || pattern.n() != states.rows())
      throw DimensionError("SnapshotSet: state dimension mismatch");
    if (jacobian_values.rows() != pattern.r())
      throw DimensionError("SnapshotSet: jacobian rows differ from pattern size");
  }

  /// Snapshot set restricted to the given columns (in order).
  SnapshotSet select_columns(std::span<const std::size_t> cols) const {
    SnapshotSet out;
    out.model_id = model_id;
    out.config_hash = config_hash;
    out.stage = stage;
    out.dt = dt;
    out.pattern = pattern;
    out.states = DenseMatrix(states.rows(), cols.size());
    out.nonlinear = DenseMatrix(nonlinear.rows(), cols.size());
    out.jacobian_values = DenseMatrix(jacobian_values.rows(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j] >= columns()) throw DimensionError("select_columns: column out of range");
      std::ranges::copy(states.col(cols[j]), out.states.col(j).begin());
      std::ranges::copy(nonlinear.col(cols[j]), out.nonlinear.col(j).begin());
      std::ranges::copy(jacobian_values.col(cols[j]), out.jacobian_values.col(j).begin());
    }
    return out;
  }
};

}  // namespace smdeim
