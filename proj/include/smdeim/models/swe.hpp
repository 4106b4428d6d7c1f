#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "smdeim/bench/hash.hpp"
#include "smdeim/errors.hpp"
#include "smdeim/linalg.hpp"
#include "smdeim/models/full_model.hpp"
#include "smdeim/models/quadratic_form.hpp"

namespace smdeim::models {

/// Shallow water on a β-plane channel: periodic in x, rigid walls at y = 0, D.
/// Unknowns live on the interior (N_x−2)×(N_y−2) points; x is a periodic ring
/// of N_x−2 points, the walls are the two omitted y rows.
struct SweConfig {
  std::size_t nx = 21;
  std::size_t ny = 15;
  double length = 6.0e6;  // L [m]
  double width = 4.4e6;   // D [m]
  double f_hat = 1e-4;
  double beta = 1.5e-11;
  double g = 10.0;
  double h0 = 2000.0;
  double h1 = 220.0;
  double h2 = 133.0;
  double dt = 240.0;
  std::size_t time_points = 91;

  std::size_t nxi() const { return nx - 2; }
  std::size_t nyi() const { return ny - 2; }
  std::size_t points() const { return nxi() * nyi(); }
  std::size_t unknowns() const { return 3 * points(); }
  double dx() const { return length / static_cast<double>(nxi()); }
  double dy() const { return width / static_cast<double>(ny - 1); }
  double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
  double y(std::size_t j) const { return static_cast<double>(j + 1) * dy(); }
  double coriolis(double yy) const { return f_hat + beta * (yy - 0.5 * width); }

  std::size_t index(std::size_t field, std::size_t i, std::size_t j) const {
    return field * points() + j * nxi() + i;
  }

  void validate() const {
    if (nx < 5 || ny < 4) throw ConfigError("swe: grid must be at least 5x4");
    if (!(length > 0.0) || !(width > 0.0) || !(g > 0.0)) throw ConfigError("swe: invalid geometry or gravity");
    if (!(dt >= 0.0)) throw ConfigError("swe: dt must be nonnegative");
    if (time_points < 1) throw ConfigError("swe: time_points must be at least 1");
    for (std::size_t j = 0; j < nyi(); ++j)
      if (coriolis(y(j)) == 0.0) throw ConfigError("swe: Coriolis parameter vanishes, geostrophic winds undefined");
  }

  std::string canonical() const {
    std::string s = "swe;nx=" + std::to_string(nx) + ";ny=" + std::to_string(ny);
    for (double v : {length, width, f_hat, beta, g, h0, h1, h2, dt}) s += ";" + bench::fmt17(v);
    return s + ";nt=" + std::to_string(time_points);
  }
};

struct SweState {
  std::vector<double> u, v, phi;
};

inline std::vector<double> swe_pack(const SweConfig& cfg, const SweState& s) {
  const std::size_t p = cfg.points();
  if (s.u.size() != p || s.v.size() != p || s.phi.size() != p)
    throw DimensionError("swe_pack: field size differs from the grid");
  std::vector<double> x;
  x.reserve(3 * p);
  x.insert(x.end(), s.u.begin(), s.u.end());
  x.insert(x.end(), s.v.begin(), s.v.end());
  x.insert(x.end(), s.phi.begin(), s.phi.end());
  return x;
}

inline SweState swe_unpack(const SweConfig& cfg, std::span<const double> x) {
  const std::size_t p = cfg.points();
  if (x.size() != 3 * p) throw DimensionError("swe_unpack: state length differs from 3·points");
  return {{x.begin(), x.begin() + p}, {x.begin() + p, x.begin() + 2 * p}, {x.begin() + 2 * p, x.end()}};
}

/// h = φ²/(4g)
inline std::vector<double> swe_height(const SweConfig& cfg, const SweState& s) {
  std::vector<double> h(s.phi.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = s.phi[i] * s.phi[i] / (4.0 * cfg.g);
  return h;
}

/// Grammeltvedt initial height No. 1.
inline double swe_initial_height(const SweConfig& cfg, double x, double y) {
  const double a = 9.0 * (0.5 * cfg.width - y) / (2.0 * cfg.width);
  const double sech = 1.0 / std::cosh(a);
  return cfg.h0 + cfg.h1 * std::tanh(a) + cfg.h2 * sech * sech * std::sin(2.0 * std::numbers::pi * x / cfg.length);
}

/// Geostrophically balanced start: u = −(g/f)h_y, v = (g/f)h_x by central
/// differences of the height formula, φ = 2√(gh).
inline SweState swe_initialize(const SweConfig& cfg) {
  cfg.validate();
  const std::size_t p = cfg.points();
  SweState s{std::vector<double>(p), std::vector<double>(p), std::vector<double>(p)};
  const double dx = cfg.dx(), dy = cfg.dy();
  for (std::size_t j = 0; j < cfg.nyi(); ++j) {
    const double y = cfg.y(j);
    const double gf = cfg.g / cfg.coriolis(y);
    for (std::size_t i = 0; i < cfg.nxi(); ++i) {
      const double x = cfg.x(i);
      const double h = swe_initial_height(cfg, x, y);
      if (!(h > 0.0)) throw ConfigError("swe: initial height must be positive");
      const double hy = (swe_initial_height(cfg, x, y + dy) - swe_initial_height(cfg, x, y - dy)) / (2.0 * dy);
      const double hx = (swe_initial_height(cfg, x + dx, y) - swe_initial_height(cfg, x - dx, y)) / (2.0 * dx);
      const std::size_t q = j * cfg.nxi() + i;
      s.u[q] = -gf * hy;
      s.v[q] = gf * hx;
      s.phi[q] = 2.0 * std::sqrt(cfg.g * h);
    }
  }
  return s;
}

namespace detail {

enum Field : std::size_t { U = 0, V = 1, PHI = 2 };

/// F_row += coeff·x_s·(x_plus − x_minus)
inline void add_advective(std::vector<QuadraticTerm>& t, std::size_t row, std::size_t s, std::size_t plus,
                          std::size_t minus, double coeff) {
  t.push_back({row, s, plus, coeff});
  t.push_back({row, s, minus, -coeff});
}

}  // namespace detail

/// x-direction terms:
///   u: −u·u_x − ½φ·φ_x      v: −u·v_x − f·u      φ: −½φ·u_x − u·φ_x
inline QuadraticForm swe_rhs_x(const SweConfig& cfg) {
  cfg.validate();
  using namespace detail;
  const std::size_t nxi = cfg.nxi(), n = cfg.unknowns();
  const double c = 1.0 / (2.0 * cfg.dx());
  std::vector<Triplet> lin;
  std::vector<QuadraticTerm> t;
  for (std::size_t j = 0; j < cfg.nyi(); ++j) {
    const double f = cfg.coriolis(cfg.y(j));
    for (std::size_t i = 0; i < nxi; ++i) {
      const std::size_t ip = (i + 1) % nxi, im = (i + nxi - 1) % nxi;
      auto id = [&](std::size_t fld, std::size_t ii) { return cfg.index(fld, ii, j); };
      const std::size_t ru = id(U, i), rv = id(V, i), rp = id(PHI, i);
      add_advective(t, ru, id(U, i), id(U, ip), id(U, im), -c);
      add_advective(t, ru, id(PHI, i), id(PHI, ip), id(PHI, im), -0.5 * c);
      add_advective(t, rv, id(U, i), id(V, ip), id(V, im), -c);
      lin.push_back({rv, id(U, i), -f});
      add_advective(t, rp, id(PHI, i), id(U, ip), id(U, im), -0.5 * c);
      add_advective(t, rp, id(U, i), id(PHI, ip), id(PHI, im), -c);
    }
  }
  return QuadraticForm(n, {}, SparseMatrixCSR::from_triplets(n, n, std::move(lin)), std::move(t));
}

/// y-direction terms with wall ghosts (v = 0, u and φ mirrored):
///   u: −v·u_y + f·v      v: −v·v_y − ½φ·φ_y      φ: −½φ·v_y − v·φ_y
inline QuadraticForm swe_rhs_y(const SweConfig& cfg) {
  cfg.validate();
  using namespace detail;
  const std::size_t nyi = cfg.nyi(), n = cfg.unknowns();
  const double c = 1.0 / (2.0 * cfg.dy());
  std::vector<Triplet> lin;
  std::vector<QuadraticTerm> t;
  for (std::size_t j = 0; j < nyi; ++j) {
    const double f = cfg.coriolis(cfg.y(j));
    const bool south = j == 0, north = j + 1 == nyi;
    const std::size_t jp = north ? j : j + 1, jm = south ? j : j - 1;
    for (std::size_t i = 0; i < cfg.nxi(); ++i) {
      auto id = [&](std::size_t fld, std::size_t jj) { return cfg.index(fld, i, jj); };
      const std::size_t ru = id(U, j), rv = id(V, j), rp = id(PHI, j);
      // Mirrored ghosts collapse to a one-sided pair; a zero ghost drops its term.
      auto adv_mirror = [&](std::size_t row, std::size_t s, std::size_t fld, double coeff) {
        if (jp != jm) add_advective(t, row, s, id(fld, jp), id(fld, jm), coeff);
      };
      auto adv_wall = [&](std::size_t row, std::size_t s, double coeff) {
        if (!north) t.push_back({row, s, id(V, j + 1), coeff});
        if (!south) t.push_back({row, s, id(V, j - 1), -coeff});
      };
      adv_mirror(ru, id(V, j), U, -c);
      lin.push_back({ru, id(V, j), f});
      adv_wall(rv, id(V, j), -c);
      adv_mirror(rv, id(PHI, j), PHI, -0.5 * c);
      adv_wall(rp, id(PHI, j), -0.5 * c);
      adv_mirror(rp, id(V, j), PHI, -c);
    }
  }
  return QuadraticForm(n, {}, SparseMatrixCSR::from_triplets(n, n, std::move(lin)), std::move(t));
}

/// ADI: x-terms implicit over the first half step, y-terms in the second.
inline FullModel make_swe(const SweConfig& cfg) {
  cfg.validate();
  const double theta = 0.5 * cfg.dt;
  auto fx = swe_rhs_x(cfg);
  auto fy = swe_rhs_y(cfg);
  Stage sx{"x", theta, fx, fy};
  Stage sy{"y", theta, std::move(fy), std::move(fx)};
  return FullModel("swe", bench::fnv1a(cfg.canonical()), cfg.dt, cfg.time_points,
                   swe_pack(cfg, swe_initialize(cfg)), {std::move(sx), std::move(sy)}, false);
}

/// One full ADI step of length dt from `state`.
inline SweState swe_step_adi(const SweConfig& cfg, const SweState& state, double dt,
                             const NewtonOptions& opt = {}) {
  SweConfig c = cfg;
  c.dt = dt;
  c.time_points = 2;
  const FullModel model = make_swe(c);
  std::vector<double> x = swe_pack(cfg, state);
  for (std::size_t s = 0; s < 2; ++s) {
    auto out = model.solve_stage(s, x, opt);
    if (!out.converged)
      throw NewtonError(1, s, out.residual,
                        "swe_step_adi: Newton did not converge in stage " + model.stage(s).tag);
    x = std::move(out.x);
  }
  return swe_unpack(cfg, x);
}

}  // namespace smdeim::models
