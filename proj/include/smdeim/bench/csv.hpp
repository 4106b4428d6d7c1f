#pragma once

#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smdeim/bench/hash.hpp"
#include "smdeim/errors.hpp"

namespace smdeim::bench {

inline constexpr int kSchemaVersion = 1;

/// One results.csv line. Optional metrics print as NA.
struct ResultRow {
  std::uint64_t run_hash = 0;
  std::string model;
  std::size_t n = 0, nx = 0, ny = 0, nt = 0;
  std::optional<std::size_t> k, m;
  std::string strategy;
  double gamma = 1.0;
  std::optional<double> h;
  std::uint64_t seed = 0;
  std::string status = "ok";
  std::optional<double> full_jacobian_error;
  std::optional<double> heldout_jacobian_error;
  std::optional<double> reduced_jacobian_error;
  std::optional<double> largest_sv_discrepancy;
  std::optional<double> trajectory_error;
  std::optional<double> mean_newton_iterations;
  // Timing columns; excluded from the determinism contract.
  double offline_seconds = 0.0;
  double online_seconds = 0.0;
  std::string timestamp;
};

inline const char* csv_header() {
  return "schema_version,run_hash,model,n,nx,ny,nt,k,m,strategy,gamma,h,seed,status,"
         "full_jacobian_error,heldout_jacobian_error,reduced_jacobian_error,largest_sv_discrepancy,"
         "trajectory_error,mean_newton_iterations,offline_seconds,online_seconds,timestamp";
}

/// Number of leading columns covered by the determinism contract.
inline constexpr std::size_t kDeterministicColumns = 20;

namespace detail {
inline std::string opt(const std::optional<double>& v) { return v ? fmt17(*v) : "NA"; }
inline std::string opt(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "NA"; }
inline std::string count(std::size_t v) { return v ? std::to_string(v) : "NA"; }
}  // namespace detail

inline std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string format_row(const ResultRow& r) {
  using namespace detail;
  std::ostringstream o;
  o << kSchemaVersion << ',' << hex64(r.run_hash) << ',' << r.model << ',' << r.n << ',' << count(r.nx) << ','
    << count(r.ny) << ',' << r.nt << ',' << opt(r.k) << ',' << opt(r.m) << ',' << r.strategy << ','
    << fmt17(r.gamma) << ',' << opt(r.h) << ',' << r.seed << ',' << r.status << ',' << opt(r.full_jacobian_error)
    << ',' << opt(r.heldout_jacobian_error) << ',' << opt(r.reduced_jacobian_error) << ','
    << opt(r.largest_sv_discrepancy) << ',' << opt(r.trajectory_error) << ',' << opt(r.mean_newton_iterations)
    << ',' << fmt17(r.offline_seconds) << ',' << fmt17(r.online_seconds) << ',' << r.timestamp;
  return o.str();
}

/// Append-only results file; each row is written with a single write call.
class ResultsFile {
 public:
  explicit ResultsFile(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    if (!std::filesystem::exists(path_) || std::filesystem::file_size(path_) == 0) {
      std::ofstream out(path_, std::ios::app);
      out << csv_header() << '\n';
    } else {
      std::ifstream in(path_);
      std::string line;
      std::getline(in, line);
      if (line != csv_header())
        throw IoError("'" + path_.string() + "' has a different header; move it aside or choose another --out");
      while (std::getline(in, line)) {
        const auto a = line.find(','), b = line.find(',', a + 1);
        if (a != std::string::npos && b != std::string::npos) done_.insert(line.substr(a + 1, b - a - 1));
      }
    }
  }

  const std::filesystem::path& path() const noexcept { return path_; }
  bool contains(std::uint64_t run_hash) const { return done_.count(hex64(run_hash)) != 0; }

  void append(const ResultRow& r) {
    const std::string line = format_row(r) + '\n';
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.flush();
    if (!out) throw IoError("append to '" + path_.string() + "' failed");
    done_.insert(hex64(r.run_hash));
  }

 private:
  std::filesystem::path path_;
  std::set<std::string> done_;
};

}  // namespace smdeim::bench
