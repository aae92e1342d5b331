#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "decay2d/core.hpp"
#include "decay2d/diagnostics.hpp"
#include "decay2d/error.hpp"
#include "decay2d/grid.hpp"
#include "decay2d/solver.hpp"

namespace decay2d {

struct RunConfig {
  GridSpec grid = make_grid(40.0, 513);
  InitialDataSpec data{smooth_bump(1.0, 2.0), Profile{}};
  double p = 3.0;
  bool nonlinear = true;
  SchemeKind scheme = SchemeKind::explicit_leapfrog;
  double cfl = 0.4;
  double t_final = 0.0;
  std::vector<double> sample_times{0.0};
  DiagnosticToggles toggles;
  bool null_trace = true;
  bool trace_rows = false;
  /// Spacing of the rectangle rule behind S1, S2 (snapped to whole steps).
  double spacetime_spacing = 0.1;
  std::vector<double> snapshot_times;
  std::string out_dir;
  std::uint64_t seed = 0;
};

namespace detail {

inline void require_increasing(const std::vector<double>& v, double t_final, const char* what) {
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k]) || v[k] < 0.0 || v[k] > t_final * (1.0 + 1e-12))
      throw InvalidArgument(std::string(what) + " must lie in [0, t_final]; got " + std::to_string(v[k]));
    if (k > 0 && !(v[k] > v[k - 1]))
      throw InvalidArgument(std::string(what) + " must be strictly increasing");
  }
}

} // namespace detail

/// Checks everything that can be checked without stepping: exponent, CFL,
/// time lists, and cone containment on Dirichlet grids.
inline void validate(const RunConfig& c) {
  PParam{c.p};
  if (!(c.t_final >= 0.0) || !std::isfinite(c.t_final))
    throw InvalidArgument("t_final must be finite and >= 0");
  if (!(c.cfl > 0.0) || c.cfl > max_cfl())
    throw InvalidArgument("cfl must lie in (0, " + std::to_string(max_cfl()) + "], got " + std::to_string(c.cfl));
  if (!(c.spacetime_spacing > 0.0)) throw InvalidArgument("spacetime spacing must be positive");
  detail::require_increasing(c.sample_times, c.t_final, "sample_times");
  detail::require_increasing(c.snapshot_times, c.t_final, "snapshot_times");
  if (!c.grid.periodic()) require_cone(c.grid, c.data.support_radius(), c.t_final);
}

/// Time step: the largest dt <= cfl h that divides t_final into whole steps.
inline std::pair<double, std::size_t> step_plan(const RunConfig& c) {
  const double target = c.cfl * c.grid.h;
  if (c.t_final == 0.0) return {target, 0};
  const auto steps = static_cast<std::size_t>(std::ceil(c.t_final / target - 1e-12));
  return {c.t_final / static_cast<double>(steps), steps};
}

/// Step index of each requested time (nearest step). Distinct times that
/// land on the same step are an error.
inline std::vector<std::size_t> snap_to_steps(const std::vector<double>& times, double dt) {
  std::vector<std::size_t> out;
  for (double t : times) {
    const auto k = static_cast<std::size_t>(std::llround(t / dt));
    if (!out.empty() && k <= out.back())
      throw InvalidArgument("requested times closer than one time step (" + std::to_string(dt) + ")");
    out.push_back(k);
  }
  return out;
}

struct RunResult {
  DiagnosticSeries series;
  NullTrace trace;
  std::vector<WaveState> snapshots;
  SpacetimeSums spacetime;
  double dt = 0.0;
  std::size_t steps = 0;
};

/// int |phi|^{3(p-1)/2} and int |phi|^{2p}.
inline std::pair<double, double> spacetime_integrands(const Field& phi, const GridSpec& g, double p) {
  const double a = 1.5 * (p - 1.0);
  return {integrate(g, [&](std::size_t i, std::size_t j) { return pow_abs(phi(i, j), a); }),
          integrate(g, [&](std::size_t i, std::size_t j) { return pow_abs(phi(i, j), 2.0 * p); })};
}

/// Steps from t = 0 to t_final. At each sample step the record holds the
/// state diagnostics plus S1, S2 and the trace integrals accumulated over
/// [0, t). The null trace takes every step; S1, S2 use a left rectangle
/// rule with the snapped spacing.
inline RunResult run(const RunConfig& c) {
  validate(c);
  const GridSpec& g = c.grid;
  RunResult out;
  const auto [dt, steps] = step_plan(c);
  out.dt = dt;
  out.steps = steps;
  out.series.p = c.p;
  out.trace.store_rows = c.trace_rows;
  const auto samples = snap_to_steps(c.sample_times, dt);
  const auto snaps = snap_to_steps(c.snapshot_times, dt);
  const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(c.spacetime_spacing / dt)));
  SpacetimeAccumulator acc(c.p, dt * static_cast<double>(stride));

  const StepScheme scheme{c.scheme, dt, dt / g.h};
  Stepper st(g, scheme, sample_initial_data(c.data, g, c.p), c.nonlinear);
  std::size_t next_sample = 0, next_snap = 0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const bool sample = next_sample < samples.size() && samples[next_sample] == k;
    const bool snap = next_snap < snaps.size() && snaps[next_snap] == k;
    const bool accumulate = c.toggles.spacetime && k < steps && k % stride == 0;
    if (sample || snap || accumulate) {
      const WaveState s = st.state();
      if (sample) {
        RadialProfile prof;
        auto rec = evaluate_record(s, g, c.toggles, c.toggles.profile ? &prof : nullptr);
        if (c.toggles.spacetime) {
          const auto sums = acc.sums();
          rec.s1 = sums.s1;
          rec.s2 = sums.s2;
        }
        if (c.null_trace) {
          rec.i1 = out.trace.i1;
          rec.i2 = out.trace.i2;
          rec.i3 = out.trace.i3;
        }
        out.series.records.push_back(rec);
        if (c.toggles.profile) out.series.profiles.push_back(std::move(prof));
        ++next_sample;
        if (accumulate) acc.add(rec.lp_a, rec.lp_2p);
      } else if (accumulate) {
        const auto [ia, i2p] = spacetime_integrands(s.phi, g, c.p);
        acc.add(ia, i2p);
      }
      if (snap) {
        out.snapshots.push_back(s);
        ++next_snap;
      }
    }
    if (k == steps) break;
    if (c.null_trace) record_null_trace(st.current(), st.next(), st.time(), dt, g, c.p, out.trace);
    st.advance();
  }
  out.spacetime = acc.sums();
  return out;
}

} // namespace decay2d
