#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "smdeim/errors.hpp"
#include "smdeim/instrumentation.hpp"
#include "smdeim/linalg.hpp"

namespace smdeim {

/// Greedy DEIM index selection over the first m columns of V.
/// Ties in |residual| resolve to the smallest index (exact comparison).
inline std::vector<std::size_t> deim_indexes(const DenseMatrix& v, std::size_t m) {
  ++counters().deim_calls;
  const std::size_t d = v.rows();
  if (m > v.cols()) throw DimensionError("deim_indexes: m exceeds basis columns");
  std::vector<std::size_t> rho;
  rho.reserve(m);
  std::vector<double> r(d);
  for (std::size_t l = 0; l < m; ++l) {
    auto vl = v.col(l);
    if (l == 0) {
      std::copy(vl.begin(), vl.end(), r.begin());
    } else {
      DenseMatrix pv(l, l);
      std::vector<double> rhs(l);
      for (std::size_t i = 0; i < l; ++i) {
        rhs[i] = vl[rho[i]];
        for (std::size_t j = 0; j < l; ++j) pv(i, j) = v(rho[i], j);
      }
      const auto c = solve_dense(pv, rhs);
      for (std::size_t i = 0; i < d; ++i) {
        double acc = vl[i];
        for (std::size_t j = 0; j < l; ++j) acc -= v(i, j) * c[j];
        r[i] = acc;
      }
    }
    const double vn = norm2(vl);
    if (!(norm2(r) > 1e-13 * vn))
      throw RankError(l + 1, "deim_indexes: basis column " + std::to_string(l + 1) +
                                 " is numerically dependent on the previous ones");
    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double a = std::abs(r[i]);
      if (a > best_val) {
        best_val = a;
        best = i;
      }
    }
    if (std::find(rho.begin(), rho.end(), best) != rho.end())
      throw RankError(l + 1, "deim_indexes: repeated index at column " + std::to_string(l + 1));
    rho.push_back(best);
  }
  return rho;
}

inline std::vector<std::size_t> deim_indexes(const DenseMatrix& v) {
  return deim_indexes(v, v.cols());
}

struct DeimInterpolant {
  DenseMatrix basis;                 // d×m
  std::vector<std::size_t> indexes;  // m distinct rows of basis
  DenseMatrix projector;             // d×m, V(PᵀV)⁻¹
  DenseMatrix sampled_inverse;       // (PᵀV)⁻¹
  double inverse_norm = 0.0;         // ‖(PᵀV)⁻¹‖₂

  std::size_t d() const noexcept { return basis.rows(); }
  std::size_t m() const noexcept { return indexes.size(); }

  /// f at the interpolation indexes.
  std::vector<double> sample(std::span<const double> f) const {
    if (f.size() != d()) throw DimensionError("DeimInterpolant::sample: length mismatch");
    std::vector<double> s(m());
    for (std::size_t i = 0; i < m(); ++i) s[i] = f[indexes[i]];
    return s;
  }

  /// V(PᵀV)⁻¹·samples.
  std::vector<double> apply(std::span<const double> samples) const {
    if (samples.size() != m()) throw DimensionError("DeimInterpolant::apply: expected m samples");
    return multiply(projector, samples);
  }

  std::vector<double> approximate(std::span<const double> f) const { return apply(sample(f)); }
};

inline DeimInterpolant deim_interpolant_from_indexes(DenseMatrix basis,
                                                     std::vector<std::size_t> indexes) {
  DeimInterpolant out;
  const std::size_t m = indexes.size(), d = basis.rows();
  DenseMatrix pv(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) pv(i, j) = basis(indexes[i], j);
  DenseMatrix inv;
  try {
    inv = LuFactorization(pv).inverse();
  } catch (const SingularMatrixError& e) {
    throw Error(std::string("deim_interpolant: internal consistency failure, PᵀV singular: ") +
                e.what());
  }
  // Projector rows computed one at a time: row i depends only on basis row i.
  out.projector = DenseMatrix(d, m);
  for (std::size_t j = 0; j < m; ++j) {
    auto pj = out.projector.col(j);
    for (std::size_t k = 0; k < m; ++k) {
      const double ikj = inv(k, j);
      auto bk = basis.col(k);
      for (std::size_t i = 0; i < d; ++i) pj[i] += bk[i] * ikj;
    }
  }
  const auto sv = thin_svd(pv).singular;
  out.inverse_norm = sv.back() > 0.0 ? 1.0 / sv.back() : std::numeric_limits<double>::infinity();
  out.sampled_inverse = std::move(inv);
  out.basis = std::move(basis);
  out.indexes = std::move(indexes);
  return out;
}

inline DeimInterpolant deim_interpolant(const DenseMatrix& v, std::size_t m) {
  if (m == 0 || m > v.cols())
    throw DimensionError("deim_interpolant: m = " + std::to_string(m) + " outside [1," +
                         std::to_string(v.cols()) + "]");
  DenseMatrix vm = v.cols_range(0, m);
  auto idx = deim_indexes(vm, m);
  return deim_interpolant_from_indexes(std::move(vm), std::move(idx));
}

/// ‖(PᵀV)⁻¹‖₂·‖(I − VVᵀ)f‖₂ for orthonormal V.
inline double deim_error_bound(const DeimInterpolant& in, std::span<const double> f) {
  if (f.size() != in.d()) throw DimensionError("deim_error_bound: length mismatch");
  const auto c = multiply_t(in.basis, f);
  auto res = multiply(in.basis, c);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] = f[i] - res[i];
  return in.inverse_norm * norm2(res);
}

}  // namespace smdeim
