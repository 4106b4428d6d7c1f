#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smdeim/bench/hash.hpp"
#include "smdeim/errors.hpp"
#include "smdeim/models/burgers.hpp"
#include "smdeim/models/full_model.hpp"
#include "smdeim/models/swe.hpp"
#include "smdeim/rom.hpp"

namespace smdeim::bench {

struct GridSize {
  std::size_t nx = 0, ny = 0;
};

/// One experiment campaign read from a key=value file.
struct ExperimentConfig {
  std::string model = "burgers";
  models::BurgersConfig burgers;
  models::SweConfig swe;
  std::vector<std::size_t> burgers_n{201};
  std::vector<GridSize> swe_grid{{21, 15}};
  std::vector<std::size_t> k{25};
  std::vector<std::size_t> m{30};
  std::vector<JacobianStrategy> strategies{kAllStrategies.begin(), kAllStrategies.end()};
  double h = 0.01;
  double gamma = 1.0;
  bool centered = false;
  NewtonOptions newton;
  std::size_t heldout_stride = 10;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::size_t jobs = 1;

  std::size_t sizes() const { return model == "burgers" ? burgers_n.size() : swe_grid.size(); }
  std::size_t k_max() const { return *std::max_element(k.begin(), k.end()); }
  std::size_t m_max() const { return *std::max_element(m.begin(), m.end()); }

  /// Model instance for size index i.
  FullModel make_model(std::size_t i) const {
    if (model == "burgers") {
      auto c = burgers;
      c.n = burgers_n.at(i);
      return models::make_burgers(c);
    }
    auto c = swe;
    c.nx = swe_grid.at(i).nx;
    c.ny = swe_grid.at(i).ny;
    return models::make_swe(c);
  }

  std::string size_label(std::size_t i) const {
    if (model == "burgers") return "burgers_n" + std::to_string(burgers_n.at(i));
    return "swe_" + std::to_string(swe_grid.at(i).nx) + "x" + std::to_string(swe_grid.at(i).ny);
  }

  /// Everything that determines the numbers of one size point except k, m, strategy.
  std::string canonical_point(std::size_t i) const {
    std::string s;
    if (model == "burgers") {
      auto c = burgers;
      c.n = burgers_n.at(i);
      s = c.canonical();
    } else {
      auto c = swe;
      c.nx = swe_grid.at(i).nx;
      c.ny = swe_grid.at(i).ny;
      s = c.canonical();
    }
    s += ";h=" + fmt17(h) + ";gamma=" + fmt17(gamma) + ";centered=" + std::to_string(centered);
    s += ";tol=" + fmt17(newton.tolerance) + ";cap=" + std::to_string(newton.max_iterations);
    s += ";guess=" + std::string(newton.guess == InitialGuess::Zero ? "zero" : "previous");
    s += ";stride=" + std::to_string(heldout_stride) + ";seed=" + std::to_string(seed);
    return s;
  }

  void validate() const {
    if (model != "burgers" && model != "swe") throw ConfigError("model must be 'burgers' or 'swe', got '" + model + "'");
    if (sizes() == 0) throw ConfigError("empty size list");
    if (k.empty()) throw ConfigError("rom.k: empty list");
    if (m.empty()) throw ConfigError("rom.m: empty list");
    if (strategies.empty()) throw ConfigError("rom.strategies: empty strategy list");
    if (std::find(k.begin(), k.end(), 0) != k.end()) throw ConfigError("rom.k: entries must be positive");
    if (std::find(m.begin(), m.end(), 0) != m.end()) throw ConfigError("rom.m: entries must be positive");
    if (!(h > 0.0)) throw ConfigError("rom.h must be positive");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("pod.gamma must lie in (0,1]");
    if (jobs == 0) throw ConfigError("jobs must be at least 1");
    for (std::size_t i = 0; i < sizes(); ++i) {
      if (model == "burgers") {
        auto c = burgers;
        c.n = burgers_n[i];
        c.validate();
      } else {
        auto c = swe;
        c.nx = swe_grid[i].nx;
        c.ny = swe_grid[i].ny;
        c.validate();
      }
    }
  }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + v + "' is not a number");
  }
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(key + ": '" + v + "' is not a nonnegative integer");
  return out;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": '" + v + "' is not a boolean");
}

template <class F>
auto map_list(const std::string& key, const std::string& v, F&& f) {
  std::vector<decltype(f(key, std::string{}))> out;
  for (const auto& item : split_list(v)) out.push_back(f(key, item));
  return out;
}

}  // namespace detail

/// Parses the flat key=value format: `#` starts a comment, lists are comma separated.
inline ExperimentConfig parse_config(const std::string& text, const std::string& origin = "config") {
  using namespace detail;
  ExperimentConfig c;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    if (kv.count(key)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
  }
  for (const auto& [key, v] : kv) {
    if (key == "model") c.model = v;
    else if (key == "burgers.n") c.burgers_n = map_list(key, v, to_u64);
    else if (key == "burgers.length") c.burgers.length = to_double(key, v);
    else if (key == "burgers.mu") c.burgers.mu = to_double(key, v);
    else if (key == "burgers.t_final") c.burgers.t_final = to_double(key, v);
    else if (key == "burgers.nt") c.burgers.time_points = to_u64(key, v);
    else if (key == "burgers.ic") c.burgers.ic_coefficients = map_list(key, v, to_double);
    else if (key == "burgers.normalize_peak") c.burgers.normalize_peak = to_bool(key, v);
    else if (key == "swe.grid") {
      c.swe_grid.clear();
      for (const auto& g : split_list(v)) {
        const auto x = g.find('x');
        if (x == std::string::npos) throw ConfigError(key + ": grid '" + g + "' must look like 21x15");
        c.swe_grid.push_back({to_u64(key, g.substr(0, x)), to_u64(key, g.substr(x + 1))});
      }
    }
    else if (key == "swe.nt") c.swe.time_points = to_u64(key, v);
    else if (key == "swe.dt") c.swe.dt = to_double(key, v);
    else if (key == "swe.length") c.swe.length = to_double(key, v);
    else if (key == "swe.width") c.swe.width = to_double(key, v);
    else if (key == "swe.f_hat") c.swe.f_hat = to_double(key, v);
    else if (key == "swe.beta") c.swe.beta = to_double(key, v);
    else if (key == "swe.g") c.swe.g = to_double(key, v);
    else if (key == "swe.h0") c.swe.h0 = to_double(key, v);
    else if (key == "swe.h1") c.swe.h1 = to_double(key, v);
    else if (key == "swe.h2") c.swe.h2 = to_double(key, v);
    else if (key == "rom.k") c.k = map_list(key, v, to_u64);
    else if (key == "rom.m") c.m = map_list(key, v, to_u64);
    else if (key == "rom.strategies") {
      c.strategies.clear();
      for (const auto& s : split_list(v)) c.strategies.push_back(parse_strategy(s));
    }
    else if (key == "rom.h") c.h = to_double(key, v);
    else if (key == "pod.gamma") c.gamma = to_double(key, v);
    else if (key == "pod.centered") c.centered = to_bool(key, v);
    else if (key == "newton.tol") c.newton.tolerance = to_double(key, v);
    else if (key == "newton.max_iterations") c.newton.max_iterations = to_u64(key, v);
    else if (key == "newton.initial_guess") {
      if (v == "zero") c.newton.guess = InitialGuess::Zero;
      else if (v == "previous") c.newton.guess = InitialGuess::Previous;
      else throw ConfigError(key + ": expected 'zero' or 'previous'");
    }
    else if (key == "newton.abort_on_failure") c.newton.abort_on_failure = to_bool(key, v);
    else if (key == "eval.heldout_stride") c.heldout_stride = to_u64(key, v);
    else if (key == "seed") c.seed = to_u64(key, v);
    else if (key == "output.dir") c.output_dir = v;
    else if (key == "jobs") c.jobs = to_u64(key, v);
    else throw ConfigError(origin + ": unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace smdeim::bench
