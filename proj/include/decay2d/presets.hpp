#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "decay2d/config.hpp"
#include "decay2d/experiments.hpp"
#include "decay2d/io.hpp"
#include "decay2d/kernel_oracle.hpp"
#include "decay2d/run.hpp"

namespace decay2d {

inline constexpr std::array<std::string_view, 8> kPresetNames = {
    "verify-identity", "verify-potential-decay", "verify-pointwise-decay", "verify-null-flux",
    "bgw-lab",         "kernel-oracle",          "scattering-check",       "quadrature-lemmas"};

inline bool is_preset(std::string_view name) {
  for (auto n : kPresetNames)
    if (n == name) return true;
  return false;
}

/// Grid, exponent, data, seed and output directory of a parsed config.
/// Final times and sample windows are fixed by each preset.
inline ExperimentOptions options_from(const ParsedConfig& cfg) {
  ExperimentOptions o;
  o.L = cfg.run.grid.half_width;
  o.n = cfg.run.grid.n;
  o.p = cfg.run.p;
  o.data = cfg.run.data;
  o.seed = cfg.run.seed;
  o.out_dir = cfg.run.out_dir;
  return o;
}

/// Kernel-oracle query file: one "t x1 x2" triple per line; '#' starts a
/// comment.
inline std::vector<std::array<double, 3>> read_queries(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open query file " + path.string());
  std::vector<std::array<double, 3>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto c = line.find('#'); c != std::string::npos) line.erase(c);
    if (detail::trim(line).empty()) continue;
    std::istringstream ss(line);
    std::array<double, 3> q{};
    std::string extra;
    if (!(ss >> q[0] >> q[1] >> q[2]) || (ss >> extra))
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 't x1 x2'");
    out.push_back(q);
  }
  return out;
}

/// Free-wave propagator values at the queries, written to kernel_values.csv.
inline std::vector<std::vector<double>> evaluate_queries(const std::vector<std::array<double, 3>>& queries,
                                                         const InitialDataSpec& data) {
  const auto lin = linear_data(data.phi0, data.phi1);
  std::vector<std::vector<double>> rows;
  for (const auto& q : queries) {
    PointQuery pq;
    pq.t = q[0];
    pq.x = {q[1], q[2]};
    pq.n_rho = pq.n_theta = 1024;
    rows.push_back({q[0], q[1], q[2], linear_point_value(pq, lin)});
  }
  return rows;
}

/// Runs one preset and writes its reports. Partial outputs stay on disk if
/// a later stage throws.
inline std::vector<Report> run_preset(std::string_view name, const ParsedConfig& cfg) {
  const auto o = options_from(cfg);
  std::vector<Report> out;
  auto add = [&](Report r) {
    write_report(r, o);
    out.push_back(std::move(r));
  };
  if (name == "verify-identity") {
    add(conservation(o));
    add(conformal_identity(o));
  } else if (name == "verify-potential-decay") {
    add(potential_decay(o));
  } else if (name == "verify-null-flux") {
    add(null_flux(o));
  } else if (name == "verify-pointwise-decay") {
    const auto r = p4_decay_run(o);
    add(pointwise_decay(o, &r));
    add(phi_star_bounds(o, &r));
  } else if (name == "scattering-check") {
    add(scattering_trend(o));
  } else if (name == "bgw-lab") {
    add(bgw_lab(o));
  } else if (name == "kernel-oracle") {
    add(kernel_trivial_cases());
    add(solver_vs_oracle(o));
    if (!cfg.queries.empty() && !o.out_dir.empty())
      write_csv(detail::out_path(o, "kernel_values.csv"), {"t", "x1", "x2", "value"},
                evaluate_queries(read_queries(cfg.queries), cfg.run.data));
  } else if (name == "quadrature-lemmas") {
    add(F_lemma(o));
    add(log_integral_lemma(o));
  } else {
    throw InvalidArgument("unknown preset '" + std::string(name) + "'");
  }
  return out;
}

/// Plain run of a config: series CSV, profile CSV when enabled, snapshots.
inline RunResult simulate(const ParsedConfig& cfg) {
  const auto& c = cfg.run;
  auto res = run(c);
  const std::filesystem::path dir = c.out_dir;
  write_series_csv(dir / "series.csv", res.series,
                   {"p = " + format_real(c.p) + ", n = " + std::to_string(c.grid.n) +
                    ", L = " + format_real(c.grid.half_width) + ", dt = " + format_real(res.dt)});
  if (c.toggles.profile) write_profiles_csv(dir / "profiles.csv", res.series.profiles);
  for (std::size_t k = 0; k < res.snapshots.size(); ++k)
    write_snapshot(dir / ("snapshot_" + std::to_string(k) + ".bin"), res.snapshots[k], c.grid);
  if (c.null_trace)
    write_csv(dir / "null_trace.csv", {"t_reached", "I1", "I2", "I3"},
              {{res.trace.t_reached, res.trace.i1, res.trace.i2, res.trace.i3}});
  return res;
}

} // namespace decay2d
