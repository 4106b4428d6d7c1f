#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "smdeim/errors.hpp"
#include "smdeim/linalg.hpp"

namespace smdeim {

struct PodBasis {
  DenseMatrix modes;             // n×k
  std::vector<double> singular;  // full spectrum of the snapshot matrix
  std::size_t k = 0;
  double gamma = 1.0;
  bool centered = false;
  std::vector<double> mean;      // zeros when uncentered

  std::size_t n() const noexcept { return modes.rows(); }

  /// x̄ + U·x̃
  std::vector<double> lift(std::span<const double> xt) const {
    auto x = multiply(modes, xt);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += mean[i];
    return x;
  }

  /// Uᵀ(x − x̄)
  std::vector<double> project(std::span<const double> x) const {
    std::vector<double> d(x.begin(), x.end());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= mean[i];
    return multiply_t(modes, d);
  }
};

/// I(m) = Σ_{i≤m} σ_i² / Σ σ_i².
inline double energy_fraction(std::span<const double> singular, std::size_t m) {
  if (m < 1 || m > singular.size())
    throw DimensionError("energy_fraction: m = " + std::to_string(m) + " outside [1," +
                         std::to_string(singular.size()) + "]");
  double head = 0.0, total = 0.0;
  for (std::size_t i = 0; i < singular.size(); ++i) {
    const double l = singular[i] * singular[i];
    total += l;
    if (i < m) head += l;
  }
  return total > 0.0 ? head / total : 1.0;
}

/// Left singular vectors of S (n×N), wide or tall.
inline SvdResult left_singular_vectors(const DenseMatrix& s) {
  if (s.cols() <= s.rows()) return thin_svd(s);
  // S = W Σ Uᵀ for the SVD of Sᵀ; swap roles.
  SvdResult t = thin_svd(s.transposed());
  SvdResult out;
  out.left = std::move(t.right);
  out.singular = std::move(t.singular);
  out.right = std::move(t.left);
  for (std::size_t j = 0; j < out.left.cols(); ++j) {
    auto col = out.left.col(j);
    auto it = std::find_if(col.begin(), col.end(), [](double x) { return x != 0.0; });
    if (it != col.end() && *it < 0.0) {
      for (double& x : col) x = -x;
      for (double& x : out.right.col(j)) x = -x;
    }
  }
  return out;
}

inline PodBasis pod_basis(const DenseMatrix& s, double gamma, std::size_t k_max, bool centered) {
  if (s.cols() < 1) throw DegenerateInputError("pod_basis: no snapshots");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DimensionError("pod_basis: gamma must lie in (0,1]");
  if (max_abs(s.data()) == 0.0) throw DegenerateInputError("pod_basis: all-zero snapshot matrix");
  PodBasis b;
  b.gamma = gamma;
  b.centered = centered;
  b.mean.assign(s.rows(), 0.0);
  DenseMatrix work = s;
  if (centered) {
    for (std::size_t j = 0; j < s.cols(); ++j)
      for (std::size_t i = 0; i < s.rows(); ++i) b.mean[i] += s(i, j);
    for (double& v : b.mean) v /= static_cast<double>(s.cols());
    for (std::size_t j = 0; j < s.cols(); ++j)
      for (std::size_t i = 0; i < s.rows(); ++i) work(i, j) -= b.mean[i];
    if (max_abs(work.data()) == 0.0)
      throw DegenerateInputError("pod_basis: centered snapshot matrix is zero");
  }
  SvdResult svd = left_singular_vectors(work);
  b.singular = svd.singular;
  const std::size_t avail = b.singular.size();
  std::size_t k = avail;
  for (std::size_t m = 1; m <= avail; ++m) {
    // Absorb round-off in the cumulative sum so that γ = 1 stops at the rank.
    if (energy_fraction(b.singular, m) >= gamma - 1e-14) {
      k = m;
      break;
    }
  }
  k = std::min({k, k_max, avail});
  if (k == 0) throw DimensionError("pod_basis: k_max must be at least 1");
  b.k = k;
  b.modes = svd.left.cols_range(0, k);
  return b;
}

}  // namespace smdeim
