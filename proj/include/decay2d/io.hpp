#pragma once

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "decay2d/core.hpp"
#include "decay2d/diagnostics.hpp"
#include "decay2d/error.hpp"
#include "decay2d/grid.hpp"

namespace decay2d {

/// 17 significant digits in scientific notation; "nan" / "inf" / "-inf".
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  return f;
}

inline void finish(std::ofstream& f, const std::filesystem::path& path) {
  f.flush();
  if (!f) throw IoError("write failed for " + path.string());
}

} // namespace detail

/// Comment lines (written as "# ..."), a header row, then numeric rows.
inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows,
                      const std::vector<std::string>& comments = {}) {
  auto f = detail::open_out(path);
  for (const auto& c : comments) f << "# " << c << '\n';
  for (std::size_t k = 0; k < columns.size(); ++k) f << (k ? "," : "") << columns[k];
  f << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw InvalidArgument("write_csv: row width mismatch in " + path.string());
    for (std::size_t k = 0; k < row.size(); ++k) f << (k ? "," : "") << format_real(row[k]);
    f << '\n';
  }
  detail::finish(f, path);
}

inline void write_series_csv(const std::filesystem::path& path, const DiagnosticSeries& series,
                             const std::vector<std::string>& comments = {}) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : series.records) rows.push_back(record_values(r));
  write_csv(path, record_columns(), rows, comments);
}

/// Long format: one row per (t, ring).
inline void write_profiles_csv(const std::filesystem::path& path, const std::vector<RadialProfile>& profiles,
                               const std::vector<std::string>& comments = {}) {
  std::vector<std::vector<double>> rows;
  for (const auto& prof : profiles)
    for (const auto& ring : prof.rings)
      rows.push_back({prof.t, ring.r, ring.phi_star, ring.phi_minus, ring.a1, ring.a2, ring.a3});
  write_csv(path, {"t", "r", "phi_star", "phi_minus", "A1", "A2", "A3"}, rows, comments);
}

// ---------------------------------------------------------------------------
// Verdicts

/// One acceptance check. `claim` names the property under test in words.
struct Verdict {
  std::string name;
  std::string claim;
  double measured = 0.0;
  double threshold = 0.0;
  std::string relation = "<="; // measured `relation` threshold
  bool pass = false;
};

inline Verdict check_le(std::string name, std::string claim, double measured, double threshold) {
  return {std::move(name), std::move(claim), measured, threshold, "<=", measured <= threshold};
}

inline Verdict check_ge(std::string name, std::string claim, double measured, double threshold) {
  return {std::move(name), std::move(claim), measured, threshold, ">=", measured >= threshold};
}

inline nlohmann::json to_json(const Verdict& v) {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(format_real(x)); };
  return {{"name", v.name}, {"claim", v.claim}, {"measured", num(v.measured)},
          {"threshold", num(v.threshold)}, {"relation", v.relation}, {"pass", v.pass}};
}

inline void write_verdicts(const std::filesystem::path& path, const std::vector<Verdict>& verdicts) {
  auto f = detail::open_out(path);
  for (const auto& v : verdicts) f << to_json(v).dump() << '\n';
  detail::finish(f, path);
}

inline bool all_pass(const std::vector<Verdict>& verdicts) {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Snapshot dumps
//
// 32-byte header: "W2D1", n (u32), L, t, p (f64), all little endian; then
// phi and pi as n*n f64 each in Field order. A text manifest sits next to
// the binary file with the extension ".manifest".

namespace detail {

inline void put_u64(std::ostream& o, std::uint64_t u) {
  char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((u >> (8 * k)) & 0xffu);
  o.write(b, 8);
}

inline void put_f64(std::ostream& o, double v) { put_u64(o, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(const unsigned char* b, int bytes = 8) {
  std::uint64_t u = 0;
  for (int k = 0; k < bytes; ++k) u |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return u;
}

} // namespace detail

inline std::filesystem::path manifest_path(const std::filesystem::path& bin) {
  auto m = bin;
  m += ".manifest";
  return m;
}

inline void write_snapshot(const std::filesystem::path& path, const WaveState& s, const GridSpec& g) {
  s.validate(g);
  auto f = detail::open_out(path, true);
  f.write("W2D1", 4);
  const auto n = static_cast<std::uint32_t>(g.n);
  char nb[4];
  for (int k = 0; k < 4; ++k) nb[k] = static_cast<char>((n >> (8 * k)) & 0xffu);
  f.write(nb, 4);
  detail::put_f64(f, g.half_width);
  detail::put_f64(f, s.t);
  detail::put_f64(f, s.p);
  for (double v : s.phi.data()) detail::put_f64(f, v);
  for (double v : s.pi.data()) detail::put_f64(f, v);
  detail::finish(f, path);

  const auto mpath = manifest_path(path);
  auto m = detail::open_out(mpath);
  m << "format = W2D1\n"
    << "n = " << g.n << '\n'
    << "L = " << format_real(g.half_width) << '\n'
    << "h = " << format_real(g.h) << '\n'
    << "t = " << format_real(s.t) << '\n'
    << "p = " << format_real(s.p) << '\n'
    << "boundary = " << to_string(g.boundary) << '\n'
    << "layout = row-major, x1 fastest, value(i, j) at j * n + i\n"
    << "fields = phi, pi\n"
    << "header_bytes = 32\n";
  detail::finish(m, mpath);
}

struct Snapshot {
  std::uint32_t n = 0;
  double half_width = 0.0;
  WaveState state;
};

inline Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  unsigned char head[32];
  if (!f.read(reinterpret_cast<char*>(head), 32)) throw IoError(path.string() + ": truncated header");
  if (std::memcmp(head, "W2D1", 4) != 0) throw IoError(path.string() + ": bad magic");
  Snapshot s;
  s.n = static_cast<std::uint32_t>(detail::get_u64(head + 4, 4));
  s.half_width = std::bit_cast<double>(detail::get_u64(head + 8));
  s.state.t = std::bit_cast<double>(detail::get_u64(head + 16));
  s.state.p = std::bit_cast<double>(detail::get_u64(head + 24));
  const std::size_t count = static_cast<std::size_t>(s.n) * s.n;
  std::vector<unsigned char> body(16 * count);
  if (!f.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size())))
    throw IoError(path.string() + ": truncated body");
  s.state.phi = Field(s.n);
  s.state.pi = Field(s.n);
  auto phi = s.state.phi.data();
  auto pi = s.state.pi.data();
  for (std::size_t k = 0; k < count; ++k) {
    phi[k] = std::bit_cast<double>(detail::get_u64(body.data() + 8 * k));
    pi[k] = std::bit_cast<double>(detail::get_u64(body.data() + 8 * (count + k)));
  }
  return s;
}

} // namespace decay2d
