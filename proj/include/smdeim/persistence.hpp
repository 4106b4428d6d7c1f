#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smdeim/errors.hpp"
#include "smdeim/jacobian_approx.hpp"
#include "smdeim/pod.hpp"
#include "smdeim/rom.hpp"
#include "smdeim/snapshots.hpp"

namespace smdeim::io {

inline constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

/// Little-endian byte sink.
class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  void tag(const char (&t)[5]) { bytes(t, 4); }
  void u32(std::uint32_t v) { raw(v); }
  void u64(std::uint64_t v) { raw(v); }
  void f64(double v) { raw(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  void f64s(std::span<const double> v) {
    for (double x : v) f64(x);
  }
  void vec(std::span<const double> v) {
    u64(v.size());
    f64s(v);
  }
  void idx(std::span<const std::size_t> v) {
    u64(v.size());
    for (auto x : v) u64(x);
  }
  void matrix(const DenseMatrix& m) {
    u64(m.rows());
    u64(m.cols());
    f64s(m.data());
  }
  /// Tagged block: 4-byte tag, u64 payload length, payload.
  void block(const char (&t)[5], const Writer& payload) {
    tag(t);
    u64(payload.buf_.size());
    bytes(payload.buf_.data(), payload.buf_.size());
  }
  const std::vector<unsigned char>& buffer() const noexcept { return buf_; }

 private:
  template <class T>
  void raw(T v) {
    if constexpr (std::endian::native == std::endian::big) {
      for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    } else {
      bytes(&v, sizeof v);
    }
  }
  std::vector<unsigned char> buf_;
};

class Reader {
 public:
  Reader(const unsigned char* p, std::size_t n, std::string what) : p_(p), n_(n), what_(std::move(what)) {}

  bool done() const noexcept { return pos_ == n_; }
  void bytes(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, p_ + pos_, n);
    pos_ += n;
  }
  std::string tag() {
    char t[4];
    bytes(t, 4);
    return {t, 4};
  }
  std::uint32_t u32() { return raw<std::uint32_t>(); }
  std::uint64_t u64() { return raw<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(raw<std::uint64_t>()); }
  std::string str() {
    const auto n = u64();
    need(n);
    std::string s(reinterpret_cast<const char*>(p_ + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<double> vec() {
    const auto n = u64();
    need(n * 8);
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }
  std::vector<std::size_t> idx() {
    const auto n = u64();
    need(n * 8);
    std::vector<std::size_t> v(n);
    for (auto& x : v) x = u64();
    return v;
  }
  DenseMatrix matrix() {
    const auto r = u64(), c = u64();
    need(r * c * 8);
    DenseMatrix m(r, c);
    for (auto& x : m.data()) x = f64();
    return m;
  }
  /// Sub-reader over the payload of the next tagged block.
  std::pair<std::string, Reader> block() {
    auto t = tag();
    const auto len = u64();
    need(len);
    Reader sub(p_ + pos_, len, what_ + " block " + t);
    pos_ += len;
    return {t, sub};
  }

 private:
  void need(std::size_t n) const {
    if (n > n_ - pos_) throw IoError(what_ + ": truncated data");
  }
  template <class T>
  T raw() {
    unsigned char b[sizeof(T)];
    bytes(b, sizeof b);
    T v = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) v = static_cast<T>((v << 8) | b[i]);
    return v;
  }
  const unsigned char* p_;
  std::size_t n_;
  std::size_t pos_ = 0;
  std::string what_;
};

inline std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes via a temporary file and rename so readers never see partial files.
inline void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------- blocks

inline void put_pattern(Writer& w, const SparsityPattern& p) {
  w.u64(p.n());
  w.u64(p.r());
  for (const auto& c : p.coords()) {
    w.u64(c.row);
    w.u64(c.col);
  }
}

inline SparsityPattern get_pattern(Reader& r) {
  const auto n = r.u64(), cnt = r.u64();
  std::vector<Coord> c(cnt);
  for (auto& x : c) {
    x.row = r.u64();
    x.col = r.u64();
  }
  return SparsityPattern(n, std::move(c));
}

inline void put_basis(Writer& w, const PodBasis& b) {
  w.matrix(b.modes);
  w.vec(b.singular);
  w.u64(b.k);
  w.f64(b.gamma);
  w.u32(b.centered ? 1 : 0);
  w.vec(b.mean);
}

inline PodBasis get_basis(Reader& r) {
  PodBasis b;
  b.modes = r.matrix();
  b.singular = r.vec();
  b.k = r.u64();
  b.gamma = r.f64();
  b.centered = r.u32() != 0;
  b.mean = r.vec();
  if (b.modes.cols() != b.k || b.mean.size() != b.modes.rows()) throw IoError("PODB block: inconsistent sizes");
  return b;
}

/// DEIM block: indexes as u64, then the basis and projector blocks.
inline void put_deim(Writer& w, const DeimInterpolant& d) {
  w.idx(d.indexes);
  w.matrix(d.basis);
  w.matrix(d.projector);
  w.matrix(d.sampled_inverse);
  w.f64(d.inverse_norm);
}

inline DeimInterpolant get_deim(Reader& r) {
  DeimInterpolant d;
  d.indexes = r.idx();
  d.basis = r.matrix();
  d.projector = r.matrix();
  d.sampled_inverse = r.matrix();
  d.inverse_norm = r.f64();
  return d;
}

inline void put_interpolant(Writer& w, const MatrixInterpolant& mi) {
  w.u32(mi.mode == InterpolantMode::Smdeim ? 0 : 1);
  put_pattern(w, mi.pattern);
  put_deim(w, mi.interp);
  w.u64(mi.sample_coords.size());
  for (const auto& c : mi.sample_coords) {
    w.u64(c.row);
    w.u64(c.col);
  }
  w.vec(mi.singular);
}

inline MatrixInterpolant get_interpolant(Reader& r) {
  MatrixInterpolant mi;
  mi.mode = r.u32() == 0 ? InterpolantMode::Smdeim : InterpolantMode::MdeimReference;
  mi.pattern = get_pattern(r);
  mi.interp = get_deim(r);
  mi.sample_coords.resize(r.u64());
  for (auto& c : mi.sample_coords) {
    c.row = r.u64();
    c.col = r.u64();
  }
  mi.singular = r.vec();
  return mi;
}

// ---------------------------------------------------------------- snapshots

/// Snapshot file: "SMDM", version, model id, n, N_t, r, dt, pattern coordinates
/// and the three column-major value blocks, followed by tagged blocks.
inline std::vector<unsigned char> encode_snapshots(const SnapshotSet& s,
                                                   const std::map<std::string, Writer>& extra = {}) {
  s.validate();
  Writer w;
  w.tag("SMDM");
  w.u32(kFormatVersion);
  w.str(s.model_id);
  w.u64(s.n());
  w.u64(s.columns());
  w.u64(s.pattern.r());
  w.f64(s.dt);
  for (const auto& c : s.pattern.coords()) {
    w.u64(c.row);
    w.u64(c.col);
  }
  w.f64s(s.states.data());
  w.f64s(s.nonlinear.data());
  w.f64s(s.jacobian_values.data());
  Writer meta;
  meta.u64(s.config_hash);
  meta.u64(s.stage);
  w.block("META", meta);
  for (const auto& [t, payload] : extra) {
    if (t.size() != 4) throw IoError("block tags must have four characters");
    char tg[5] = {t[0], t[1], t[2], t[3], 0};
    w.block(tg, payload);
  }
  return w.buffer();
}

struct SnapshotFile {
  SnapshotSet snapshots;
  std::map<std::string, std::vector<unsigned char>> blocks;  // unparsed trailing blocks
};

inline SnapshotFile decode_snapshots(const std::vector<unsigned char>& data, const std::string& what = "snapshot file") {
  Reader r(data.data(), data.size(), what);
  if (r.tag() != "SMDM") throw IoError(what + ": bad magic (expected SMDM)");
  if (const auto v = r.u32(); v != kFormatVersion)
    throw IoError(what + ": unsupported format version " + std::to_string(v));
  SnapshotFile f;
  auto& s = f.snapshots;
  s.model_id = r.str();
  const auto n = r.u64(), nt = r.u64(), rr = r.u64();
  s.dt = r.f64();
  std::vector<Coord> coords(rr);
  for (auto& c : coords) {
    c.row = r.u64();
    c.col = r.u64();
  }
  s.pattern = SparsityPattern(n, std::move(coords));
  s.states = DenseMatrix(n, nt);
  s.nonlinear = DenseMatrix(n, nt);
  s.jacobian_values = DenseMatrix(rr, nt);
  for (auto* m : {&s.states, &s.nonlinear, &s.jacobian_values})
    for (auto& x : m->data()) x = r.f64();
  while (!r.done()) {
    auto [tag, sub] = r.block();
    if (tag == "META") {
      s.config_hash = sub.u64();
      s.stage = sub.u64();
    } else {
      std::vector<unsigned char> payload;
      while (!sub.done()) {
        unsigned char c;
        sub.bytes(&c, 1);
        payload.push_back(c);
      }
      f.blocks[tag] = std::move(payload);
    }
  }
  s.validate();
  return f;
}

inline void save_snapshots(const std::filesystem::path& path, const SnapshotSet& s,
                           const std::map<std::string, Writer>& extra = {}) {
  write_file(path, encode_snapshots(s, extra));
}

inline SnapshotFile load_snapshots(const std::filesystem::path& path) {
  return decode_snapshots(read_file(path), path.string());
}

// ---------------------------------------------------------------- reduced models

inline void put_form(Writer& w, const ReducedForm& f) {
  w.vec(f.a0);
  w.matrix(f.lin);
  w.matrix(f.t1);
  w.matrix(f.gs);
}

inline ReducedForm get_form(Reader& r) {
  ReducedForm f;
  f.a0 = r.vec();
  f.lin = r.matrix();
  f.t1 = r.matrix();
  f.gs = r.matrix();
  return f;
}

inline void put_plan(Writer& w, const models::RowPlan& p) {
  w.idx(p.states);
  w.idx(p.cols);
  w.vec(p.linear);
  w.idx(p.contrib_start);
  w.idx(p.contrib_state);
  w.vec(p.contrib_coeff);
}

inline models::RowPlan get_plan(Reader& r) {
  models::RowPlan p;
  p.states = r.idx();
  p.cols = r.idx();
  p.linear = r.vec();
  p.contrib_start = r.idx();
  p.contrib_state = r.idx();
  p.contrib_coeff = r.vec();
  return p;
}

/// REDM payload: basis plus the per-stage reduced forms and strategy payloads.
inline Writer encode_reduced(const ReducedModel& rm) {
  Writer w;
  w.str(rm.model_id);
  w.u64(rm.config_hash);
  w.str(std::string(strategy_name(rm.strategy)));
  w.f64(rm.h);
  w.f64(rm.dt);
  w.u64(rm.time_points);
  w.f64(rm.offline_seconds);
  put_basis(w, rm.basis);
  w.u64(rm.stages.size());
  for (const auto& st : rm.stages) {
    w.str(st.tag);
    w.f64(st.theta);
    put_form(w, st.implicit_form);
    w.u32(st.explicit_form ? 1 : 0);
    if (st.explicit_form) put_form(w, *st.explicit_form);
    const auto& hp = st.hyper;
    w.matrix(hp.product);
    w.idx(hp.indexes);
    w.u64(hp.sample_coords.size());
    for (const auto& c : hp.sample_coords) {
      w.u64(c.row);
      w.u64(c.col);
    }
    w.u64(hp.samples.size());
    for (const auto& s : hp.samples) {
      w.u64(s.row);
      w.u64(s.entry);
      put_plan(w, s.plan);
      w.matrix(s.ustates);
      w.vec(s.mean_states);
      w.matrix(s.ucols);
    }
  }
  return w;
}

/// The full model is not stored; attach it with `rm.full` when the strategy needs it.
inline ReducedModel decode_reduced(Reader& r) {
  ReducedModel rm;
  rm.model_id = r.str();
  rm.config_hash = r.u64();
  rm.strategy = parse_strategy(r.str());
  rm.h = r.f64();
  rm.dt = r.f64();
  rm.time_points = r.u64();
  rm.offline_seconds = r.f64();
  rm.basis = get_basis(r);
  const auto ns = r.u64();
  for (std::size_t s = 0; s < ns; ++s) {
    ReducedStage st;
    st.tag = r.str();
    st.theta = r.f64();
    st.implicit_form = get_form(r);
    if (r.u32()) st.explicit_form = get_form(r);
    auto& hp = st.hyper;
    hp.product = r.matrix();
    hp.indexes = r.idx();
    hp.sample_coords.resize(r.u64());
    for (auto& c : hp.sample_coords) {
      c.row = r.u64();
      c.col = r.u64();
    }
    hp.samples.resize(r.u64());
    for (auto& smp : hp.samples) {
      smp.row = r.u64();
      smp.entry = r.u64();
      smp.plan = get_plan(r);
      smp.ustates = r.matrix();
      smp.mean_states = r.vec();
      smp.ucols = r.matrix();
    }
    rm.stages.push_back(std::move(st));
  }
  return rm;
}

/// Artifact file: "SMDR", version, then tagged blocks in any order.
struct Artifact {
  std::uint64_t config_hash = 0;
  std::optional<PodBasis> basis;
  std::vector<MatrixInterpolant> interpolants;  // MINT, one per stage
  std::vector<DeimInterpolant> function_deim;   // DEIM, one per stage
  std::vector<ReducedModel> reduced;            // REDM
};

inline std::vector<unsigned char> encode_artifact(const Artifact& a) {
  Writer w;
  w.tag("SMDR");
  w.u32(kFormatVersion);
  Writer meta;
  meta.u64(a.config_hash);
  w.block("META", meta);
  if (a.basis) {
    Writer b;
    put_basis(b, *a.basis);
    w.block("PODB", b);
  }
  for (const auto& mi : a.interpolants) {
    Writer b;
    put_interpolant(b, mi);
    w.block("MINT", b);
  }
  for (const auto& d : a.function_deim) {
    Writer b;
    put_deim(b, d);
    w.block("DEIM", b);
  }
  for (const auto& rm : a.reduced) w.block("REDM", encode_reduced(rm));
  return w.buffer();
}

inline Artifact decode_artifact(const std::vector<unsigned char>& data, const std::string& what = "artifact") {
  Reader r(data.data(), data.size(), what);
  if (r.tag() != "SMDR") throw IoError(what + ": bad magic (expected SMDR)");
  if (const auto v = r.u32(); v != kFormatVersion)
    throw IoError(what + ": unsupported format version " + std::to_string(v));
  Artifact a;
  while (!r.done()) {
    auto [tag, sub] = r.block();
    if (tag == "META") a.config_hash = sub.u64();
    else if (tag == "PODB") a.basis = get_basis(sub);
    else if (tag == "MINT") a.interpolants.push_back(get_interpolant(sub));
    else if (tag == "DEIM") a.function_deim.push_back(get_deim(sub));
    else if (tag == "REDM") a.reduced.push_back(decode_reduced(sub));
    // unknown blocks are skipped
  }
  return a;
}

inline void save_artifact(const std::filesystem::path& path, const Artifact& a) {
  write_file(path, encode_artifact(a));
}

inline Artifact load_artifact(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw IoError("offline artifact '" + path.string() + "' not found; run the offline command first");
  return decode_artifact(read_file(path), path.string());
}

}  // namespace smdeim::io
