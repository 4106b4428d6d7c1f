#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "smdeim/bench/hash.hpp"
#include "smdeim/errors.hpp"
#include "smdeim/linalg.hpp"
#include "smdeim/models/full_model.hpp"
#include "smdeim/models/quadratic_form.hpp"

namespace smdeim::models {

/// 1D viscous Burgers, u_t + u u_x = μ u_xx on [0, L], u = 0 at both ends.
struct BurgersConfig {
  std::size_t n = 201;  // grid points including the two boundary nodes
  double length = 1.0;
  double mu = 0.01;
  double t_final = 2.0;
  std::size_t time_points = 401;
  /// Initial polynomial in x (ascending powers); default x³(1−x)⁴.
  std::vector<double> ic_coefficients{0, 0, 0, 1, -4, 6, -4, 1};
  bool normalize_peak = true;  // rescale so the grid maximum of u₀ is 1

  std::size_t unknowns() const { return n - 2; }
  double dx() const { return length / static_cast<double>(n - 1); }
  double dt() const { return time_points > 1 ? t_final / static_cast<double>(time_points - 1) : 0.0; }

  void validate() const {
    if (n < 6) throw ConfigError("burgers: n must be at least 6");
    if (!(mu > 0.0)) throw ConfigError("burgers: mu must be positive");
    if (!(length > 0.0) || !(t_final >= 0.0)) throw ConfigError("burgers: invalid length or t_final");
    if (time_points < 1) throw ConfigError("burgers: time_points must be at least 1");
    if (ic_coefficients.empty()) throw ConfigError("burgers: empty initial polynomial");
  }

  std::string canonical() const {
    std::string s = "burgers;n=" + std::to_string(n) + ";L=" + bench::fmt17(length) +
                    ";mu=" + bench::fmt17(mu) + ";tf=" + bench::fmt17(t_final) +
                    ";nt=" + std::to_string(time_points) + ";ic=";
    for (double c : ic_coefficients) s += bench::fmt17(c) + ",";
    s += ";norm=" + std::to_string(normalize_peak);
    return s;
  }
};

inline std::vector<double> burgers_initial_condition(const BurgersConfig& cfg) {
  cfg.validate();
  const std::size_t m = cfg.unknowns();
  std::vector<double> u(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double x = static_cast<double>(i + 1) * cfg.dx();
    double p = 0.0;
    for (std::size_t k = cfg.ic_coefficients.size(); k-- > 0;) p = p * x + cfg.ic_coefficients[k];
    u[i] = p;
  }
  if (cfg.normalize_peak) {
    const double peak = max_abs(u);
    if (peak == 0.0) throw ConfigError("burgers: initial polynomial vanishes on the grid");
    for (double& v : u) v /= peak;
  }
  return u;
}

/// −u⊙A_x u + μA_xx u over the interior unknowns.
inline QuadraticForm burgers_rhs(const BurgersConfig& cfg) {
  cfg.validate();
  const std::size_t m = cfg.unknowns();
  const double dx = cfg.dx();
  const double c1 = 1.0 / (2.0 * dx), c2 = cfg.mu / (dx * dx);
  std::vector<Triplet> lin;
  std::vector<QuadraticTerm> terms;
  for (std::size_t i = 0; i < m; ++i) {
    if (i > 0) {
      lin.push_back({i, i - 1, c2});
      terms.push_back({i, i, i - 1, c1});
    }
    lin.push_back({i, i, -2.0 * c2});
    if (i + 1 < m) {
      lin.push_back({i, i + 1, c2});
      terms.push_back({i, i, i + 1, -c1});
    }
  }
  return QuadraticForm(m, {}, SparseMatrixCSR::from_triplets(m, m, std::move(lin)), std::move(terms));
}

inline FullModel make_burgers(const BurgersConfig& cfg) {
  cfg.validate();
  Stage st;
  st.tag = "implicit";
  st.theta = cfg.dt();
  st.implicit_rhs = burgers_rhs(cfg);
  return FullModel("burgers", bench::fnv1a(cfg.canonical()), cfg.dt(), cfg.time_points,
                   burgers_initial_condition(cfg), {std::move(st)}, true);
}

/// Backward-Euler residual u_i − u_prev − dt·(−u_i⊙A_x u_i + μA_xx u_i),
/// written out stencil by stencil.
inline std::vector<double> burgers_residual(const BurgersConfig& cfg, std::span<const double> u,
                                            std::span<const double> u_prev, double dt) {
  const std::size_t m = cfg.unknowns();
  if (u.size() != m || u_prev.size() != m) throw DimensionError("burgers_residual: length mismatch");
  const double dx = cfg.dx();
  std::vector<double> r(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double ul = i > 0 ? u[i - 1] : 0.0;
    const double ur = i + 1 < m ? u[i + 1] : 0.0;
    const double f = -u[i] * (ur - ul) / (2.0 * dx) + cfg.mu * (ur - 2.0 * u[i] + ul) / (dx * dx);
    r[i] = u[i] - u_prev[i] - dt * f;
  }
  return r;
}

/// I − dt·(−diag(A_x u) − diag(u)A_x + μA_xx), tridiagonal.
inline SparseMatrixCSR burgers_jacobian(const BurgersConfig& cfg, std::span<const double> u, double dt) {
  const std::size_t m = cfg.unknowns();
  if (u.size() != m) throw DimensionError("burgers_jacobian: length mismatch");
  const double dx = cfg.dx();
  const double c1 = 1.0 / (2.0 * dx), c2 = cfg.mu / (dx * dx);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < m; ++i) {
    const double ul = i > 0 ? u[i - 1] : 0.0;
    const double ur = i + 1 < m ? u[i + 1] : 0.0;
    if (i > 0) t.push_back({i, i - 1, -dt * (u[i] * c1 + c2)});
    t.push_back({i, i, 1.0 - dt * (-(ur - ul) * c1 - 2.0 * c2)});
    if (i + 1 < m) t.push_back({i, i + 1, -dt * (-u[i] * c1 + c2)});
  }
  return SparseMatrixCSR::from_triplets(m, m, std::move(t));
}

}  // namespace smdeim::models
