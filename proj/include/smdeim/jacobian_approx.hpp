#pragma once

#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smdeim/deim.hpp"
#include "smdeim/errors.hpp"
#include "smdeim/linalg.hpp"
#include "smdeim/pod.hpp"
#include "smdeim/snapshots.hpp"

namespace smdeim {

enum class InterpolantMode { Smdeim, MdeimReference };

inline constexpr std::size_t kDefaultMdeimGuard = 512;

/// Largest n for which the padded n²-row reference may be built.
/// SMDEIM_GUARD_N overrides the default.
inline std::size_t mdeim_guard() {
  if (const char* env = std::getenv("SMDEIM_GUARD_N")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<std::size_t>(v);
  }
  return kDefaultMdeimGuard;
}

struct MatrixInterpolant {
  InterpolantMode mode = InterpolantMode::Smdeim;
  SparsityPattern pattern;
  DeimInterpolant interp;          // d = r (SMDEIM) or n² (reference)
  std::vector<Coord> sample_coords;
  std::vector<double> singular;    // spectrum of the factored snapshot matrix

  std::size_t n() const noexcept { return pattern.n(); }
  std::size_t m() const noexcept { return sample_coords.size(); }

  /// Approximation in gathered coordinates (length r).
  std::vector<double> approximate_gathered(std::span<const double> samples) const {
    if (samples.size() != m())
      throw DimensionError("approximate_matrix: expected " + std::to_string(m()) + " samples, got " +
                           std::to_string(samples.size()));
    auto full = interp.apply(samples);
    if (mode == InterpolantMode::Smdeim) return full;
    std::vector<double> out(pattern.r());
    for (std::size_t j = 0; j < pattern.r(); ++j) out[j] = full[pattern.linear_index(j)];
    return out;
  }

  SparseMatrixCSR approximate_matrix(std::span<const double> samples) const {
    if (mode == InterpolantMode::Smdeim) return scatter(approximate_gathered(samples), pattern);
    if (samples.size() != m())
      throw DimensionError("approximate_matrix: expected " + std::to_string(m()) + " samples, got " +
                           std::to_string(samples.size()));
    const auto full = interp.apply(samples);
    const std::size_t nn = n();
    std::vector<Triplet> t;
    for (std::size_t o = 0; o < full.size(); ++o) {
      const std::size_t row = o % nn, col = o / nn;
      if (full[o] != 0.0 || pattern.contains(row, col)) t.push_back({row, col, full[o]});
    }
    return SparseMatrixCSR::from_triplets(nn, nn, std::move(t));
  }
};

namespace detail {

inline std::size_t numerical_rank(std::span<const double> singular, std::size_t rows) {
  if (singular.empty() || singular.front() == 0.0) return 0;
  const double tol = static_cast<double>(std::max(rows, singular.size())) *
                     std::numeric_limits<double>::epsilon() * singular.front();
  std::size_t k = 0;
  while (k < singular.size() && singular[k] > tol) ++k;
  return k;
}

inline void check_rank(std::span<const double> singular, std::size_t rows, std::size_t m) {
  const std::size_t rank = numerical_rank(singular, rows);
  if (m > rank)
    throw RankError(rank + 1, "interpolant: m = " + std::to_string(m) +
                                  " exceeds the numerical rank " + std::to_string(rank) +
                                  " of the Jacobian snapshots");
}

}  // namespace detail

/// SMDEIM from an already factored gathered snapshot matrix.
inline MatrixInterpolant build_smdeim(const SparsityPattern& pattern, const SvdResult& gathered_svd,
                                      std::size_t m) {
  if (gathered_svd.left.rows() != pattern.r())
    throw DimensionError("build_smdeim: singular vectors do not match pattern size");
  if (m == 0 || m > gathered_svd.left.cols())
    throw DimensionError("build_smdeim: m = " + std::to_string(m) + " outside [1," +
                         std::to_string(gathered_svd.left.cols()) + "]");
  detail::check_rank(gathered_svd.singular, pattern.r(), m);
  MatrixInterpolant out;
  out.mode = InterpolantMode::Smdeim;
  out.pattern = pattern;
  out.singular = gathered_svd.singular;
  out.interp = deim_interpolant(gathered_svd.left, m);
  for (std::size_t idx : out.interp.indexes) out.sample_coords.push_back(pattern[idx]);
  return out;
}

/// Gathered snapshot matrix factorization (r×n_s), shared across m values.
inline SvdResult gathered_svd(const SnapshotSet& snap) {
  snap.validate();
  if (snap.jacobian_values.cols() > snap.jacobian_values.rows())
    throw DimensionError("gathered_svd: more snapshots than pattern entries");
  return thin_svd(snap.jacobian_values);
}

inline MatrixInterpolant build_smdeim(const SnapshotSet& snap, std::size_t m) {
  if (m > snap.columns())
    throw DimensionError("build_smdeim: m exceeds the number of snapshots");
  return build_smdeim(snap.pattern, gathered_svd(snap), m);
}

/// Dense n²×n_s column-wise vectorized snapshots (reference oracle only).
inline DenseMatrix padded_snapshots(const SnapshotSet& snap, std::size_t guard = mdeim_guard()) {
  const std::size_t n = snap.n();
  if (n > guard)
    throw MemoryGuardError("MDEIM reference: n = " + std::to_string(n) + " exceeds guard " +
                           std::to_string(guard) +
                           "; padded n²-row snapshot storage is what limits plain MDEIM "
                           "(set SMDEIM_GUARD_N to override)");
  DenseMatrix s(n * n, snap.columns());
  for (std::size_t t = 0; t < snap.columns(); ++t) {
    auto col = s.col(t);
    for (std::size_t j = 0; j < snap.pattern.r(); ++j)
      col[snap.pattern.linear_index(j)] = snap.jacobian_values(j, t);
  }
  return s;
}

inline MatrixInterpolant build_mdeim_reference(const SnapshotSet& snap, std::size_t m,
                                               std::size_t guard = mdeim_guard()) {
  snap.validate();
  if (m == 0 || m > snap.columns())
    throw DimensionError("build_mdeim_reference: m outside [1, n_s]");
  SvdResult svd = thin_svd(padded_snapshots(snap, guard));
  detail::check_rank(svd.singular, snap.pattern.r(), m);
  MatrixInterpolant out;
  out.mode = InterpolantMode::MdeimReference;
  out.pattern = snap.pattern;
  out.singular = std::move(svd.singular);
  // Keep only the m leading vectors; the full n²×n_s factor is discarded here.
  out.interp = deim_interpolant(svd.left.cols_range(0, m), m);
  const std::size_t n = snap.n();
  for (std::size_t o : out.interp.indexes) out.sample_coords.push_back({o % n, o / n});
  return out;
}

struct Lemma2Report {
  double residual = 0.0;               // relative Frobenius reconstruction residual
  double orthonormality_error = 0.0;   // max |ūᵀ_j ū_l − δ_jl|
};

/// Checks that scattering the gathered SVD factors gives a thin SVD of the
/// padded snapshot matrix.
inline Lemma2Report verify_lemma2(const SnapshotSet& snap, std::size_t guard = mdeim_guard()) {
  const DenseMatrix full = padded_snapshots(snap, guard);
  const SvdResult svd = gathered_svd(snap);
  const std::size_t s = svd.singular.size();
  DenseMatrix padded(full.rows(), s);
  for (std::size_t j = 0; j < s; ++j)
    for (std::size_t q = 0; q < snap.pattern.r(); ++q)
      padded(snap.pattern.linear_index(q), j) = svd.left(q, j);
  DenseMatrix us = padded;
  for (std::size_t j = 0; j < s; ++j)
    for (double& x : us.col(j)) x *= svd.singular[j];
  const DenseMatrix recon = multiply(us, svd.right.transposed());
  Lemma2Report rep;
  const double nf = frobenius_norm(full);
  rep.residual = nf > 0.0 ? frobenius_norm(subtract(full, recon)) / nf : 0.0;
  DenseMatrix g = multiply_tn(padded, padded);
  for (std::size_t i = 0; i < s; ++i) g(i, i) -= 1.0;
  rep.orthonormality_error = max_abs(g.data());
  return rep;
}

/// Row-sampled Jacobian: J ≈ V(PᵀV)⁻¹·(rows of J at the indexes).
class RowSampledJacobian {
 public:
  RowSampledJacobian(const DeimInterpolant& basis, SparseMatrixCSR rows)
      : basis_(basis), rows_(std::move(rows)) {}

  const SparseMatrixCSR& rows() const noexcept { return rows_; }

  /// y ≈ J·x
  std::vector<double> apply(std::span<const double> x) const {
    return basis_.apply(spmv(rows_, x));
  }

  DenseMatrix to_dense() const {
    const DenseMatrix r = rows_.to_dense();
    return multiply(basis_.projector, r);
  }

  SparseMatrixCSR to_sparse() const { return SparseMatrixCSR::from_dense(to_dense()); }

 private:
  DeimInterpolant basis_;
  SparseMatrixCSR rows_;
};

inline RowSampledJacobian deim_function_jacobian(const DeimInterpolant& fn_basis,
                                                 SparseMatrixCSR j_rows) {
  if (j_rows.rows() != fn_basis.m())
    throw DimensionError("deim_function_jacobian: expected " + std::to_string(fn_basis.m()) +
                         " sampled rows, got " + std::to_string(j_rows.rows()));
  if (j_rows.cols() != fn_basis.d())
    throw DimensionError("deim_function_jacobian: row length differs from basis dimension");
  return RowSampledJacobian(fn_basis, std::move(j_rows));
}

/// DEIM interpolant over the m leading POD modes of the nonlinear-term snapshots.
inline DeimInterpolant function_deim_basis(const SnapshotSet& snap, std::size_t m) {
  snap.validate();
  const PodBasis pod = pod_basis(snap.nonlinear, 1.0, snap.columns(), false);
  if (m == 0 || m > pod.k)
    throw RankError(pod.k + 1, "function_deim_basis: m = " + std::to_string(m) +
                                   " exceeds the rank " + std::to_string(pod.k) +
                                   " of the nonlinear snapshots");
  return deim_interpolant(pod.modes, m);
}

/// Rows `indexes` of J as an m×n matrix.
inline SparseMatrixCSR sample_rows(const SparseMatrixCSR& j, std::span<const std::size_t> indexes) {
  std::vector<Triplet> t;
  const auto off = j.row_offsets();
  const auto ci = j.col_indices();
  const auto v = j.values();
  for (std::size_t i = 0; i < indexes.size(); ++i) {
    const std::size_t r = indexes[i];
    if (r >= j.rows())
      throw DimensionError("sample_rows: row index " + std::to_string(r) + " out of range");
    for (std::size_t k = off[r]; k < off[r + 1]; ++k) t.push_back({i, ci[k], v[k]});
  }
  return SparseMatrixCSR::from_triplets(indexes.size(), j.cols(), std::move(t));
}

}  // namespace smdeim
