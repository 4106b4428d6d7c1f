#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "smdeim/errors.hpp"
#include "smdeim/instrumentation.hpp"

namespace smdeim {

/// Column-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    DenseMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw DimensionError("from_rows: ragged row list");
      std::size_t j = 0;
      for (double v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[c * rows_ + r]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[c * rows_ + r]; }

  std::span<double> col(std::size_t c) noexcept { return {data_.data() + c * rows_, rows_}; }
  std::span<const double> col(std::size_t c) const noexcept {
    return {data_.data() + c * rows_, rows_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  /// Copy of columns [first, first + count).
  DenseMatrix cols_range(std::size_t first, std::size_t count) const {
    if (first + count > cols_) throw DimensionError("cols_range: out of range");
    DenseMatrix out(rows_, count);
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * rows_), count * rows_,
                out.data_.begin());
    return out;
  }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t c = 0; c < cols_; ++c)
      for (std::size_t r = 0; r < rows_; ++r) t(c, r) = (*this)(r, c);
    return t;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) {
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (double v : a) {
    const double t = v / scale;
    s += t * t;
  }
  return scale * std::sqrt(s);
}

inline double frobenius_norm(const DenseMatrix& a) { return norm2(a.data()); }

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("subtract: shape mismatch");
  DenseMatrix out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bd[i];
  return out;
}

/// C = A·B.
inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      auto ak = a.col(k);
      for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += ak[i] * bkj;
    }
  }
  return c;
}

/// C = Aᵀ·B.
inline DenseMatrix multiply_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("multiply_tn: row count mismatch");
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i) c(i, j) = dot(a.col(i), b.col(j));
  return c;
}

/// y = A·x.
inline std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("multiply: vector length mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t k = 0; k < a.cols(); ++k) {
    const double xk = x[k];
    auto ak = a.col(k);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += ak[i] * xk;
  }
  return y;
}

/// y = Aᵀ·x.
inline std::vector<double> multiply_t(const DenseMatrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw DimensionError("multiply_t: vector length mismatch");
  std::vector<double> y(a.cols());
  for (std::size_t k = 0; k < a.cols(); ++k) y[k] = dot(a.col(k), x);
  return y;
}

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row storage; column indexes strictly increase within a row.
class SparseMatrixCSR {
 public:
  SparseMatrixCSR() = default;

  SparseMatrixCSR(std::size_t rows, std::size_t cols, std::vector<std::size_t> offsets,
                  std::vector<std::size_t> col_indices, std::vector<double> values)
      : rows_(rows),
        cols_(cols),
        offsets_(std::move(offsets)),
        col_indices_(std::move(col_indices)),
        values_(std::move(values)) {
    validate();
  }

  /// Square n×n convenience constructor.
  SparseMatrixCSR(std::size_t n, std::vector<std::size_t> offsets,
                  std::vector<std::size_t> col_indices, std::vector<double> values)
      : SparseMatrixCSR(n, n, std::move(offsets), std::move(col_indices), std::move(values)) {}

  static SparseMatrixCSR from_triplets(std::size_t rows, std::size_t cols,
                                       std::vector<Triplet> triplets) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<std::size_t> offsets(rows + 1, 0);
    std::vector<std::size_t> cols_idx;
    std::vector<double> vals;
    cols_idx.reserve(triplets.size());
    vals.reserve(triplets.size());
    for (std::size_t t = 0; t < triplets.size(); ++t) {
      const auto& e = triplets[t];
      if (e.row >= rows || e.col >= cols)
        throw DimensionError("from_triplets: entry (" + std::to_string(e.row) + "," +
                             std::to_string(e.col) + ") out of range");
      if (t > 0 && triplets[t - 1].row == e.row && triplets[t - 1].col == e.col)
        throw DimensionError("from_triplets: duplicate entry (" + std::to_string(e.row) + "," +
                             std::to_string(e.col) + ")");
      ++offsets[e.row + 1];
      cols_idx.push_back(e.col);
      vals.push_back(e.value);
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    return SparseMatrixCSR(rows, cols, std::move(offsets), std::move(cols_idx), std::move(vals));
  }

  static SparseMatrixCSR from_dense(const DenseMatrix& a) {
    std::vector<Triplet> t;
    for (std::size_t r = 0; r < a.rows(); ++r)
      for (std::size_t c = 0; c < a.cols(); ++c)
        if (a(r, c) != 0.0) t.push_back({r, c, a(r, c)});
    return from_triplets(a.rows(), a.cols(), std::move(t));
  }

  static SparseMatrixCSR identity(std::size_t n) {
    std::vector<std::size_t> offsets(n + 1), cols(n);
    std::iota(offsets.begin(), offsets.end(), std::size_t{0});
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    return SparseMatrixCSR(n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t n() const noexcept { return rows_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// Storage position of (row, col), or nnz() when absent.
  std::size_t find(std::size_t row, std::size_t col) const {
    if (row >= rows_) return nnz();
    const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(offsets_[row]);
    const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(offsets_[row + 1]);
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col) return nnz();
    return static_cast<std::size_t>(it - col_indices_.begin());
  }

  double at(std::size_t row, std::size_t col) const {
    const std::size_t k = find(row, col);
    return k == nnz() ? 0.0 : values_[k];
  }

  DenseMatrix to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) d(r, col_indices_[k]) = values_[k];
    return d;
  }

  friend bool operator==(const SparseMatrixCSR&, const SparseMatrixCSR&) = default;

 private:
  void validate() const {
    if (offsets_.size() != rows_ + 1 || offsets_.front() != 0 ||
        offsets_.back() != col_indices_.size() || col_indices_.size() != values_.size())
      throw DimensionError("SparseMatrixCSR: inconsistent storage sizes");
    for (std::size_t r = 0; r < rows_; ++r) {
      if (offsets_[r] > offsets_[r + 1]) throw DimensionError("SparseMatrixCSR: offsets decrease");
      for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) {
        if (col_indices_[k] >= cols_)
          throw DimensionError("SparseMatrixCSR: column index out of range in row " +
                               std::to_string(r));
        if (k > offsets_[r] && col_indices_[k] <= col_indices_[k - 1])
          throw DimensionError("SparseMatrixCSR: columns not strictly increasing in row " +
                               std::to_string(r));
      }
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

inline std::vector<double> spmv(const SparseMatrixCSR& a, std::span<const double> x) {
  if (x.size() != a.cols())
    throw DimensionError("spmv: matrix has " + std::to_string(a.cols()) + " columns, vector has " +
                         std::to_string(x.size()) + " entries");
  std::vector<double> y(a.rows(), 0.0);
  const auto off = a.row_offsets();
  const auto ci = a.col_indices();
  const auto v = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double s = 0.0;
    for (std::size_t k = off[r]; k < off[r + 1]; ++k) s += v[k] * x[ci[k]];
    y[r] = s;
  }
  return y;
}

inline std::vector<double> spmv_transposed(const SparseMatrixCSR& a, std::span<const double> x) {
  if (x.size() != a.rows()) throw DimensionError("spmv_transposed: dimension mismatch");
  std::vector<double> y(a.cols(), 0.0);
  const auto off = a.row_offsets();
  const auto ci = a.col_indices();
  const auto v = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = off[r]; k < off[r + 1]; ++k) y[ci[k]] += v[k] * x[r];
  return y;
}

/// A·B for sparse A and dense B.
inline DenseMatrix multiply(const SparseMatrixCSR& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: sparse-dense inner dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  const auto off = a.row_offsets();
  const auto ci = a.col_indices();
  const auto v = a.values();
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto bj = b.col(j);
    auto cj = c.col(j);
    for (std::size_t r = 0; r < a.rows(); ++r) {
      double s = 0.0;
      for (std::size_t k = off[r]; k < off[r + 1]; ++k) s += v[k] * bj[ci[k]];
      cj[r] = s;
    }
  }
  return c;
}

/// Largest singular value by power iteration on AᵀA.
inline double spectral_norm(const SparseMatrixCSR& a, std::size_t max_iter = 2000,
                            double rel_tol = 1e-13) {
  if (a.nnz() == 0) return 0.0;
  std::vector<double> x(a.cols(), 1.0 / std::sqrt(static_cast<double>(a.cols())));
  double sigma = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    auto y = spmv(a, x);
    auto z = spmv_transposed(a, y);
    const double nz = norm2(z);
    if (nz == 0.0) return 0.0;
    const double next = std::sqrt(nz);
    for (std::size_t i = 0; i < z.size(); ++i) x[i] = z[i] / nz;
    if (std::abs(next - sigma) <= rel_tol * next) return next;
    sigma = next;
  }
  return sigma;
}

/// Dense LU with partial pivoting.
class LuFactorization {
 public:
  explicit LuFactorization(DenseMatrix a) : lu_(std::move(a)), piv_(lu_.rows()) {
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n) throw DimensionError("solve_dense: matrix is not square");
    const double tol = 1e-14 * frobenius_norm(lu_);
    std::iota(piv_.begin(), piv_.end(), std::size_t{0});
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(lu_(i, k)) > best) {
          best = std::abs(lu_(i, k));
          p = i;
        }
      if (!(best > tol))
        throw SingularMatrixError(k, "solve_dense: pivot " + std::to_string(k) + " has magnitude " +
                                         std::to_string(best) + " below 1e-14*||A||_F");
      if (p != k) {
        std::swap(piv_[k], piv_[p]);
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
      }
      const double d = lu_(k, k);
      for (std::size_t i = k + 1; i < n; ++i) lu_(i, k) /= d;
      for (std::size_t j = k + 1; j < n; ++j) {
        const double ukj = lu_(k, j);
        if (ukj == 0.0) continue;
        for (std::size_t i = k + 1; i < n; ++i) lu_(i, j) -= lu_(i, k) * ukj;
      }
    }
  }

  std::size_t n() const noexcept { return lu_.rows(); }

  std::vector<double> solve(std::span<const double> b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw DimensionError("solve_dense: right-hand side length mismatch");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[piv_[i]];
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = j + 1; i < n; ++i) x[i] -= lu_(i, j) * x[j];
    for (std::size_t j = n; j-- > 0;) {
      x[j] /= lu_(j, j);
      for (std::size_t i = 0; i < j; ++i) x[i] -= lu_(i, j) * x[j];
    }
    return x;
  }

  DenseMatrix inverse() const {
    const std::size_t n = lu_.rows();
    DenseMatrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      e[j] = 1.0;
      auto x = solve(e);
      std::copy(x.begin(), x.end(), inv.col(j).begin());
      e[j] = 0.0;
    }
    return inv;
  }

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> piv_;
};

inline std::vector<double> solve_dense(const DenseMatrix& a, std::span<const double> b) {
  return LuFactorization(a).solve(b);
}

/// Sparse direct solver for square systems (COLAMD-ordered supernodal LU).
class SparseLuSolver {
 public:
  explicit SparseLuSolver(const SparseMatrixCSR& a) : n_(a.rows()) {
    if (a.rows() != a.cols()) throw DimensionError("SparseLuSolver: matrix is not square");
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(a.nnz());
    const auto off = a.row_offsets();
    const auto ci = a.col_indices();
    const auto v = a.values();
    for (std::size_t r = 0; r < a.rows(); ++r)
      for (std::size_t k = off[r]; k < off[r + 1]; ++k)
        t.emplace_back(static_cast<int>(r), static_cast<int>(ci[k]), v[k]);
    Eigen::SparseMatrix<double> m(static_cast<int>(n_), static_cast<int>(n_));
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    lu_.analyzePattern(m);
    lu_.factorize(m);
    if (lu_.info() != Eigen::Success)
      throw SingularMatrixError(0, "SparseLuSolver: factorization failed: " + lu_.lastErrorMessage());
  }

  std::vector<double> solve(std::span<const double> b) const {
    if (b.size() != n_) throw DimensionError("SparseLuSolver: right-hand side length mismatch");
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n_));
    Eigen::VectorXd x = lu_.solve(rhs);
    return {x.data(), x.data() + x.size()};
  }

 private:
  std::size_t n_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

struct SvdResult {
  DenseMatrix left;              // n×s, orthonormal columns
  std::vector<double> singular;  // nonincreasing
  DenseMatrix right;             // s×s orthogonal
};

namespace detail {

inline constexpr std::size_t kRowBlock = 64;

// A ← A·W with W row-major s×s; every output row depends only on its input row.
inline void rotate_rows(DenseMatrix& a, const std::vector<double>& w) {
  const std::size_t m = a.rows(), s = a.cols();
  std::vector<double> in(kRowBlock * s), out(kRowBlock * s);
  for (std::size_t r0 = 0; r0 < m; r0 += kRowBlock) {
    const std::size_t nb = std::min(kRowBlock, m - r0);
    for (std::size_t c = 0; c < s; ++c) {
      const double* src = a.col(c).data() + r0;
      for (std::size_t r = 0; r < nb; ++r) in[r * s + c] = src[r];
    }
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(nb * s), 0.0);
    for (std::size_t r = 0; r < nb; ++r) {
      const double* x = &in[r * s];
      double* y = &out[r * s];
      for (std::size_t k = 0; k < s; ++k) {
        const double xk = x[k];
        const double* wk = &w[k * s];
        for (std::size_t j = 0; j < s; ++j) y[j] += xk * wk[j];
      }
    }
    for (std::size_t c = 0; c < s; ++c) {
      double* dst = a.col(c).data() + r0;
      for (std::size_t r = 0; r < nb; ++r) dst[r] = out[r * s + c];
    }
  }
}

}  // namespace detail

struct SvdOptions {
  std::size_t max_reorthogonalizations = 4;  // Gram–Schmidt passes per column
};

/// Thin SVD: A = QR by classical Gram–Schmidt with reorthogonalization,
/// then an SVD of the s×s factor R, and U = Q·U_R.
///
/// All arithmetic touching the n rows is row-local with a fixed summation
/// order, so appending or interleaving zero rows changes nothing in the
/// remaining rows and the added rows of U stay exactly zero.
inline SvdResult thin_svd(DenseMatrix a, const SvdOptions& opt = {}) {
  ++counters().svd_calls;
  const std::size_t m = a.rows(), s = a.cols();
  if (s > m)
    throw DimensionError("thin_svd: needs cols <= rows, got " + std::to_string(m) + "x" +
                         std::to_string(s));
  if (!a.all_finite()) throw DimensionError("thin_svd: input has non-finite entries");

  // a is overwritten by Q.
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
  std::vector<double> c(s);
  std::vector<bool> vanished(s, false);
  for (std::size_t j = 0; j < s; ++j) {
    auto aj = a.col(j);
    double before = norm2(aj), after = before;
    for (std::size_t pass = 0; pass < opt.max_reorthogonalizations && j > 0; ++pass) {
      for (std::size_t k = 0; k < j; ++k) c[k] = dot(a.col(k), aj);
      for (std::size_t k = 0; k < j; ++k) {
        const double ck = c[k];
        if (ck == 0.0) continue;
        const double* qk = a.col(k).data();
        for (std::size_t i = 0; i < m; ++i) aj[i] -= ck * qk[i];
        r(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) += ck;
      }
      after = norm2(aj);
      if (pass > 0 && after > 0.5 * before) break;
      before = after;
    }
    if (after > 0.0) {
      for (double& x : aj) x /= after;
      r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = after;
    } else {
      vanished[j] = true;
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXd> small(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (small.info() != Eigen::Success)
    throw ConvergenceError("thin_svd: SVD of the triangular factor failed on columns [0," +
                           std::to_string(s) + ")");
  std::vector<double> w(s * s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      w[i * s + j] = small.matrixU()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  detail::rotate_rows(a, w);

  SvdResult res;
  res.singular.resize(s);
  res.right = DenseMatrix(s, s);
  for (std::size_t j = 0; j < s; ++j) {
    res.singular[j] = small.singularValues()(static_cast<Eigen::Index>(j));
    for (std::size_t i = 0; i < s; ++i)
      res.right(i, j) = small.matrixV()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  // Exactly dependent columns leave zero columns in Q; the directions they
  // feed carry zero singular values and are rebuilt as an orthonormal completion.
  if (std::find(vanished.begin(), vanished.end(), true) != vanished.end()) {
    const std::size_t rank = s - static_cast<std::size_t>(std::count(vanished.begin(), vanished.end(), true));
    for (std::size_t j = rank; j < s; ++j) {
      res.singular[j] = 0.0;
      auto col = a.col(j);
      for (std::size_t e = 0; e < m; ++e) {
        std::fill(col.begin(), col.end(), 0.0);
        col[e] = 1.0;
        for (int rep = 0; rep < 2; ++rep)
          for (std::size_t k = 0; k < j; ++k) {
            auto ck = a.col(k);
            const double d = dot(ck, col);
            for (std::size_t i = 0; i < m; ++i) col[i] -= d * ck[i];
          }
        const double nc = norm2(col);
        if (nc > 0.5) {
          for (double& x : col) x /= nc;
          break;
        }
      }
    }
  }
  // Sign convention: first nonzero entry of each left vector is nonnegative.
  for (std::size_t j = 0; j < s; ++j) {
    auto col = a.col(j);
    auto it = std::find_if(col.begin(), col.end(), [](double x) { return x != 0.0; });
    if (it != col.end() && *it < 0.0) {
      for (double& x : col) x = -x;
      for (std::size_t i = 0; i < s; ++i) res.right(i, j) = -res.right(i, j);
    }
  }
  res.left = std::move(a);
  return res;
}

/// ‖UᵀU − I‖_F.
inline double orthonormality_error(const DenseMatrix& u) {
  DenseMatrix g = multiply_tn(u, u);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return frobenius_norm(g);
}

}  // namespace smdeim
