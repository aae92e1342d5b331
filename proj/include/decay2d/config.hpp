#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "decay2d/core.hpp"
#include "decay2d/error.hpp"
#include "decay2d/run.hpp"

namespace decay2d {

// Run configuration files are INI with five sections:
//
//   [grid]         L*, n*, boundary = dirichlet | periodic
//   [data]         phi0, phi1 = zero | smooth_bump | gaussian | fourier_mode,
//                  phiK_amplitude, phiK_radius, phiK_center = x1, x2,
//                  phiK_mode = k1, k2 (K = 0, 1), queries = <path>
//   [scheme]       p*, t_final*, kind = explicit_leapfrog | conservative,
//                  cfl = 0.4, nonlinear = true
//   [diagnostics]  sample_times = t, t, ... | sample_spacing = dt,
//                  energy, potential, conformal, null_energy, weighted_norms,
//                  h2, sup, profile, spacetime, null_trace, trace_rows (bools),
//                  spacetime_spacing, seed
//   [output]       dir, snapshot_times = t, t, ...
//
// Starred keys are required. Unknown sections or keys are errors.

namespace detail {

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"grid", {"L", "n", "boundary"}},
      {"data",
       {"phi0", "phi0_amplitude", "phi0_radius", "phi0_center", "phi0_mode", "phi1", "phi1_amplitude",
        "phi1_radius", "phi1_center", "phi1_mode", "queries"}},
      {"scheme", {"p", "t_final", "kind", "cfl", "nonlinear"}},
      {"diagnostics",
       {"sample_times", "sample_spacing", "energy", "potential", "conformal", "null_energy", "weighted_norms",
        "h2", "sup", "profile", "spacetime", "null_trace", "trace_rows", "spacetime_spacing", "seed"}},
      {"output", {"dir", "snapshot_times"}},
  };
  return s;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class ConfigReader {
public:
  explicit ConfigReader(const boost::property_tree::ptree& tree) : tree_(tree) {
    const auto& schema = config_schema();
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty())
        throw ConfigError("config: key '" + section + "' outside any section");
      const auto it = schema.find(section);
      if (it == schema.end() && body.empty()) throw ConfigError("config: unknown section '" + section + "'");
      for (const auto& [key, value] : body) {
        if (it == schema.end() || !it->second.count(key))
          throw ConfigError("config: unknown key '" + section + "." + key + "'");
      }
    }
  }

  bool has(const std::string& section, const std::string& key) const {
    const auto s = tree_.get_child_optional(section);
    return s && s->get_child_optional(key);
  }

  std::string text(const std::string& section, const std::string& key) const {
    if (!has(section, key)) throw ConfigError("config: missing required key '" + section + "." + key + "'");
    return trim(tree_.get_child(section).get_child(key).data());
  }

  std::string text(const std::string& section, const std::string& key, const std::string& fallback) const {
    return has(section, key) ? text(section, key) : fallback;
  }

  double real(const std::string& section, const std::string& key) const {
    return to_real(text(section, key), section + "." + key);
  }
  double real(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? real(section, key) : fallback;
  }

  std::uint64_t unsigned_int(const std::string& section, const std::string& key) const {
    const auto s = text(section, key);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
      throw ConfigError("config: '" + section + "." + key + "' expects a non-negative integer, got '" + s + "'");
    return v;
  }
  std::uint64_t unsigned_int(const std::string& section, const std::string& key, std::uint64_t fallback) const {
    return has(section, key) ? unsigned_int(section, key) : fallback;
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const auto s = text(section, key);
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw ConfigError("config: '" + section + "." + key + "' expects a boolean, got '" + s + "'");
  }

  std::vector<double> reals(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(text(section, key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_real(trim(item), section + "." + key));
    if (out.empty()) throw ConfigError("config: '" + section + "." + key + "' is empty");
    return out;
  }

private:
  static double to_real(const std::string& s, const std::string& name) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
      throw ConfigError("config: '" + name + "' expects a number, got '" + s + "'");
    return v;
  }

  const boost::property_tree::ptree& tree_;
};

inline Profile read_profile(const ConfigReader& r, const std::string& k) {
  Profile prof;
  try {
    prof.family = parse_family(r.text("data", k, "zero"));
  } catch (const InvalidArgument& e) {
    throw ConfigError("config: 'data." + k + "': " + e.what());
  }
  if (prof.family == DataFamily::zero) return prof;
  prof.amplitude = r.real("data", k + "_amplitude", 1.0);
  prof.radius = r.real("data", k + "_radius", 1.0);
  if (r.has("data", k + "_center")) {
    const auto c = r.reals("data", k + "_center");
    if (c.size() != 2) throw ConfigError("config: 'data." + k + "_center' expects two numbers");
    prof.center = {c[0], c[1]};
  }
  if (r.has("data", k + "_mode")) {
    const auto m = r.reals("data", k + "_mode");
    if (m.size() != 2) throw ConfigError("config: 'data." + k + "_mode' expects two numbers");
    prof.mode = {m[0], m[1]};
  }
  return prof;
}

} // namespace detail

/// A parsed configuration: the run itself plus harness-only settings.
struct ParsedConfig {
  RunConfig run;
  std::string queries; // kernel-oracle query list, if any
};

inline ParsedConfig parse_config_text(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const detail::ConfigReader r(tree);
  ParsedConfig out;
  RunConfig& c = out.run;

  const double L = r.real("grid", "L");
  const auto n = r.unsigned_int("grid", "n");
  const auto boundary = r.text("grid", "boundary", "dirichlet");
  BoundaryKind bk;
  if (boundary == "dirichlet") bk = BoundaryKind::dirichlet_truncation;
  else if (boundary == "periodic") bk = BoundaryKind::periodic;
  else throw ConfigError("config: 'grid.boundary' must be dirichlet or periodic, got '" + boundary + "'");

  try {
    c.grid = make_grid(L, static_cast<std::size_t>(n), bk);
    c.data.phi0 = detail::read_profile(r, "phi0");
    c.data.phi1 = detail::read_profile(r, "phi1");
    c.p = r.real("scheme", "p");
    c.t_final = r.real("scheme", "t_final");
    c.scheme = parse_scheme(r.text("scheme", "kind", "explicit_leapfrog"));
    c.cfl = r.real("scheme", "cfl", 0.4);
    c.nonlinear = r.boolean("scheme", "nonlinear", true);

    if (r.has("diagnostics", "sample_times") && r.has("diagnostics", "sample_spacing"))
      throw ConfigError("config: give either 'diagnostics.sample_times' or 'diagnostics.sample_spacing'");
    if (r.has("diagnostics", "sample_times")) {
      c.sample_times = r.reals("diagnostics", "sample_times");
    } else if (r.has("diagnostics", "sample_spacing")) {
      const double s = r.real("diagnostics", "sample_spacing");
      if (!(s > 0.0)) throw ConfigError("config: 'diagnostics.sample_spacing' must be positive");
      c.sample_times.clear();
      const auto count = static_cast<std::size_t>(std::floor(c.t_final / s + 1e-9));
      for (std::size_t k = 0; k <= count; ++k) c.sample_times.push_back(static_cast<double>(k) * s);
    } else {
      c.sample_times = {0.0};
      if (c.t_final > 0.0) c.sample_times.push_back(c.t_final);
    }
    auto& on = c.toggles;
    on.energy = r.boolean("diagnostics", "energy", on.energy);
    on.potential = r.boolean("diagnostics", "potential", on.potential);
    on.conformal = r.boolean("diagnostics", "conformal", on.conformal);
    on.null_energy = r.boolean("diagnostics", "null_energy", on.null_energy);
    on.weighted_norms = r.boolean("diagnostics", "weighted_norms", on.weighted_norms);
    on.h2 = r.boolean("diagnostics", "h2", on.h2);
    on.sup = r.boolean("diagnostics", "sup", on.sup);
    on.profile = r.boolean("diagnostics", "profile", on.profile);
    on.spacetime = r.boolean("diagnostics", "spacetime", on.spacetime);
    c.null_trace = r.boolean("diagnostics", "null_trace", c.null_trace);
    c.trace_rows = r.boolean("diagnostics", "trace_rows", c.trace_rows);
    c.spacetime_spacing = r.real("diagnostics", "spacetime_spacing", c.spacetime_spacing);
    c.seed = r.unsigned_int("diagnostics", "seed", 0);

    c.out_dir = r.text("output", "dir", "out");
    if (r.has("output", "snapshot_times")) c.snapshot_times = r.reals("output", "snapshot_times");
    out.queries = r.text("data", "queries", "");

    validate(c);
  } catch (const ConeViolation&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return out;
}

inline ParsedConfig parse_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

} // namespace decay2d
