#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "decay2d/core.hpp"
#include "decay2d/error.hpp"
#include "decay2d/grid.hpp"
#include "decay2d/numerics/differences.hpp"
#include "decay2d/numerics/fft.hpp"
#include "decay2d/numerics/interpolation.hpp"
#include "decay2d/numerics/parallel.hpp"
#include "decay2d/numerics/quadrature.hpp"

namespace decay2d {

namespace detail {

inline double md_of(std::size_t m) { return static_cast<double>(m); }

inline double radius_at(const GridSpec& g, std::size_t i, std::size_t j) {
  return std::hypot(g.coord(i), g.coord(j));
}

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericalFault(std::string(what) + ": non-finite value");
}

} // namespace detail

// ---------------------------------------------------------------------------
// Energies

/// Trapezoid value of int |d_t phi|^2 + |grad phi|^2 + (2/(p+1))|phi|^{p+1}.
inline double total_energy(const WaveState& s, const GridSpec& g) {
  const auto gr = numerics::gradient(s.phi, g);
  const double e = integrate(g, [&](std::size_t i, std::size_t j) {
    return energy_density(gr.d1(i, j), gr.d2(i, j), s.pi(i, j), s.phi(i, j), s.p);
  });
  detail::require_finite(e, "total_energy");
  return e;
}

struct PotentialDecay {
  double weighted = 0.0; // int (1+t+r)^{(p-1)/2} |phi|^{p+1}
  double plain = 0.0;    // int |phi|^{p+1}
};

inline PotentialDecay potential_decay_functional(const WaveState& s, const GridSpec& g) {
  const double e = 0.5 * (s.p - 1.0);
  PotentialDecay out;
  out.plain = integrate(g, [&](std::size_t i, std::size_t j) {
    return pow_abs(s.phi(i, j), s.p + 1.0);
  });
  out.weighted = integrate(g, [&](std::size_t i, std::size_t j) {
    const double u = pow_abs(s.phi(i, j), s.p + 1.0);
    if (u == 0.0) return 0.0;
    return std::pow(1.0 + s.t + detail::radius_at(g, i, j), e) * u;
  });
  detail::require_finite(out.weighted, "potential_decay_functional");
  return out;
}

/// Q0 = int |x1 d2 phi - x2 d1 phi|^2 + |S phi + phi|^2 + sum_j |x_j d_t phi + t d_j phi|^2,
/// S = t d_t + x . grad.
inline double conformal_charge(const WaveState& s, const GridSpec& g,
                               const numerics::Gradient& gr) {
  const double t = s.t;
  return integrate(g, [&](std::size_t i, std::size_t j) {
    const double x1 = g.coord(i), x2 = g.coord(j);
    const double d1 = gr.d1(i, j), d2 = gr.d2(i, j), v = s.pi(i, j);
    const double rot = x1 * d2 - x2 * d1;
    const double sc = t * v + x1 * d1 + x2 * d2 + s.phi(i, j);
    const double b1 = x1 * v + t * d1;
    const double b2 = x2 * v + t * d2;
    return rot * rot + sc * sc + b1 * b1 + b2 * b2;
  });
}

inline double conformal_charge(const WaveState& s, const GridSpec& g) {
  return conformal_charge(s, g, numerics::gradient(s.phi, g));
}

/// int (t^2 + r^2) |phi|^{p+1}
inline double conformal_potential(const WaveState& s, const GridSpec& g) {
  const double t2 = s.t * s.t;
  return integrate(g, [&](std::size_t i, std::size_t j) {
    const double x1 = g.coord(i), x2 = g.coord(j);
    return (t2 + x1 * x1 + x2 * x2) * pow_abs(s.phi(i, j), s.p + 1.0);
  });
}

/// Weighted energy on the half-plane {x1 <= t}, u1 = t - x1 + 1, q = (p-1)/2:
///   int u1^{q-2} ( |x2 (d_t+d_1)phi + u1 d2 phi|^2 + |u1 (d_t-d_1)phi + x2 d2 phi + phi|^2
///                  + (2/(p+1)) (x2^2 + u1^2) |phi|^{p+1} ).
inline double null_weighted_energy(const WaveState& s, const GridSpec& g,
                                   const numerics::Gradient& gr) {
  const double t = s.t;
  const double q = 0.5 * (s.p - 1.0);
  const double c = 2.0 / (s.p + 1.0);
  return integrate(g, [&](std::size_t i, std::size_t j) {
    const double x1 = g.coord(i);
    if (x1 > t) return 0.0;
    const double x2 = g.coord(j);
    const double u1 = t - x1 + 1.0;
    const double d1 = gr.d1(i, j), d2 = gr.d2(i, j), v = s.pi(i, j), f = s.phi(i, j);
    const double a = x2 * (v + d1) + u1 * d2;
    const double b = u1 * (v - d1) + x2 * d2 + f;
    return std::pow(u1, q - 2.0) * (a * a + b * b + c * (x2 * x2 + u1 * u1) * pow_abs(f, s.p + 1.0));
  });
}

inline double null_weighted_energy(const WaveState& s, const GridSpec& g) {
  return null_weighted_energy(s, g, numerics::gradient(s.phi, g));
}

// ---------------------------------------------------------------------------
// Weighted norms

struct WeightedNorms {
  double angular = 0.0;  // (1+t)^2 ||angular grad phi||^2
  double gradient = 0.0; // ||(1+|t-r|) grad phi||^2
  double l2 = 0.0;       // ||phi||^2
  double h2 = 0.0;       // ||phi||_{H^2}
};

/// Squared angular gradient (x1 d2 phi - x2 d1 phi)^2 / r^2; 0 for r < h/2.
inline double angular_gradient_sq(const GridSpec& g, std::size_t i, std::size_t j, double d1,
                                  double d2) {
  const double x1 = g.coord(i), x2 = g.coord(j);
  const double r2 = x1 * x1 + x2 * x2;
  if (r2 < 0.25 * g.h * g.h) return 0.0;
  const double a = x1 * d2 - x2 * d1;
  return a * a / r2;
}

inline WeightedNorms weighted_norm_suite(const WaveState& s, const GridSpec& g,
                                         const numerics::Gradient& gr, bool with_h2 = true) {
  WeightedNorms w;
  const double t = s.t;
  w.angular = (1.0 + t) * (1.0 + t) * integrate(g, [&](std::size_t i, std::size_t j) {
                return angular_gradient_sq(g, i, j, gr.d1(i, j), gr.d2(i, j));
              });
  w.gradient = integrate(g, [&](std::size_t i, std::size_t j) {
    const double m = 1.0 + std::abs(t - detail::radius_at(g, i, j));
    const double d1 = gr.d1(i, j), d2 = gr.d2(i, j);
    return m * m * (d1 * d1 + d2 * d2);
  });
  w.l2 = integrate(g, [&](std::size_t i, std::size_t j) { return s.phi(i, j) * s.phi(i, j); });
  if (with_h2) {
    const auto hs = numerics::hessian(s.phi, g);
    const double sq = integrate(g, [&](std::size_t i, std::size_t j) {
      const double f = s.phi(i, j), d1 = gr.d1(i, j), d2 = gr.d2(i, j);
      const double a = hs.d11(i, j), b = hs.d12(i, j), c = hs.d22(i, j);
      return f * f + d1 * d1 + d2 * d2 + a * a + 2.0 * b * b + c * c;
    });
    w.h2 = std::sqrt(sq);
  } else {
    w.h2 = std::numeric_limits<double>::quiet_NaN();
  }
  return w;
}

inline WeightedNorms weighted_norm_suite(const WaveState& s, const GridSpec& g) {
  return weighted_norm_suite(s, g, numerics::gradient(s.phi, g));
}

// ---------------------------------------------------------------------------
// Suprema and ring profiles

struct SupNorms {
  double sup_abs = 0.0;
  double f = 0.0;      // sup|phi| (1+t)^{1/2}
  double f_star = 0.0; // max |phi(x)| (1+t+|x|)^{1/2}
};

inline SupNorms sup_norms(const WaveState& s, const GridSpec& g) {
  SupNorms out;
  const std::size_t n = g.n;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::abs(s.phi(i, j));
      if (a == 0.0) continue;
      out.sup_abs = std::max(out.sup_abs, a);
      out.f_star = std::max(out.f_star, a * std::sqrt(1.0 + s.t + detail::radius_at(g, i, j)));
    }
  out.f = out.sup_abs * std::sqrt(1.0 + s.t);
  return out;
}

struct RingSample {
  double r = 0.0;
  double phi_star = 0.0;  // max |phi| over nodes in the ring bin
  double phi_minus = 0.0; // min |phi| over nodes in the ring bin
  std::size_t nodes = 0;
  // Angular quantities from interpolated samples on the circle |x| = r.
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  double circle_max = 0.0;
  double circle_min = 0.0;
  // (max^a - min^a - a sqrt(A2 A3)) / max^a with a = (p+3)/2, over the
  // circle samples; 0 for a vanishing ring.
  double inequality_excess = 0.0;
  bool angular_valid = false;
};

struct RadialProfile {
  double t = 0.0;
  double p = 3.0;
  std::vector<RingSample> rings;
};

/// Ring extrema: node x goes to ring m = round(|x|/h), i.e. the bin
/// [r_m - h/2, r_m + h/2) with r_m = m h. Every node lands in some ring, so
/// the largest phi_star equals sup|phi|; empty bins are dropped (merged).
inline RadialProfile sup_profile(const WaveState& s, const GridSpec& g) {
  const std::size_t n = g.n;
  const double rmax = std::sqrt(2.0) * g.half_width;
  const std::size_t bins = static_cast<std::size_t>(std::floor(rmax / g.h + 0.5)) + 2;
  std::vector<double> hi(bins, 0.0), lo(bins, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> count(bins, 0);
  const std::size_t last = g.periodic() ? n - 1 : n;
  for (std::size_t j = 0; j < last; ++j)
    for (std::size_t i = 0; i < last; ++i) {
      const double r = detail::radius_at(g, i, j);
      const std::size_t m = static_cast<std::size_t>(std::floor(r / g.h + 0.5));
      const double a = std::abs(s.phi(i, j));
      hi[m] = std::max(hi[m], a);
      lo[m] = std::min(lo[m], a);
      ++count[m];
    }
  RadialProfile prof;
  prof.t = s.t;
  prof.p = s.p;
  for (std::size_t m = 0; m < bins; ++m) {
    if (count[m] == 0) continue;
    RingSample rs;
    rs.r = static_cast<double>(m) * g.h;
    rs.phi_star = hi[m];
    rs.phi_minus = lo[m];
    rs.nodes = count[m];
    prof.rings.push_back(rs);
  }
  return prof;
}

/// Fills A1 (angular mean), A2 = int |d_theta phi~|^2, A3 = int |phi~|^{p+1} and
/// the circle extrema (min is 0 when the samples change sign), from
/// N = max(16, ceil(2 pi r / h)) bicubic samples
/// per ring. d_theta is spectral (Nyquist mode dropped). Rings whose circle
/// leaves the interpolation region keep zeros and angular_valid = false.
inline void angular_functionals(const WaveState& s, const GridSpec& g, RadialProfile& prof) {
  const double p = s.p;
  numerics::parallel_for(0, prof.rings.size(), [&](std::size_t k) {
    RingSample& ring = prof.rings[k];
    ring.a1 = ring.a2 = ring.a3 = ring.circle_max = ring.circle_min = 0.0;
    ring.inequality_excess = 0.0;
    ring.angular_valid = false;
    const double r = ring.r;
    if (r == 0.0) {
      const auto v = numerics::bicubic(s.phi, g, 0.0, 0.0);
      if (!v) return;
      ring.a1 = *v;
      ring.a3 = 2.0 * std::numbers::pi * pow_abs(*v, p + 1.0);
      ring.circle_max = ring.circle_min = std::abs(*v);
      ring.angular_valid = true;
      return;
    }
    if (!g.periodic() && r > g.half_width - 2.0 * g.h) return;
    const std::size_t m =
        std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi * r / g.h)));
    std::vector<double> samples(m);
    double mx = 0.0, mn = std::numeric_limits<double>::infinity(), sum = 0.0;
    bool pos = false, neg = false;
    for (std::size_t q = 0; q < m; ++q) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(m);
      const auto v = numerics::bicubic(s.phi, g, r * std::cos(th), r * std::sin(th));
      if (!v) return;
      samples[q] = *v;
      const double a = std::abs(*v);
      mx = std::max(mx, a);
      mn = std::min(mn, a);
      pos = pos || *v > 0.0;
      neg = neg || *v < 0.0;
      sum += *v;
    }
    ring.a1 = sum / detail::md_of(m);
    ring.circle_max = mx;
    // A sign change on the circle means the interpolant vanishes somewhere.
    ring.circle_min = pos && neg ? 0.0 : mn;
    ring.angular_valid = true;
    if (mx == 0.0) return;
    // Spectra and powers of the samples scaled to unit maximum, so that far
    // rings with tiny values do not underflow.
    for (double& v : samples) v /= mx;
    const auto spec = numerics::real_fft(samples);
    const double md = detail::md_of(m);
    double a2n = 0.0, a3n = 0.0;
    for (std::size_t kk = 1; 2 * kk < m; ++kk) {
      const double c = std::abs(spec[kk]) / md;
      a2n += 2.0 * static_cast<double>(kk * kk) * c * c;
    }
    for (double v : samples) a3n += pow_abs(v, p + 1.0);
    a2n *= 2.0 * std::numbers::pi;
    a3n *= 2.0 * std::numbers::pi / md;
    ring.a2 = a2n * mx * mx;
    ring.a3 = a3n * pow_abs(mx, p + 1.0);
    const double e = 0.5 * (p + 3.0);
    ring.inequality_excess = 1.0 - pow_abs(ring.circle_min / mx, e) - e * std::sqrt(a2n * a3n);
  });
}

inline RadialProfile radial_profile(const WaveState& s, const GridSpec& g) {
  RadialProfile prof = sup_profile(s, g);
  angular_functionals(s, g, prof);
  return prof;
}

/// Trapezoid over rings of (1+t+r)^{(p-1)/2} phi_star^{(p+3)/2}.
inline double phi_star_functional(const RadialProfile& prof, double t, double p) {
  const auto& rg = prof.rings;
  if (rg.size() < 2) return 0.0;
  auto f = [&](const RingSample& r) {
    return std::pow(1.0 + t + r.r, 0.5 * (p - 1.0)) * pow_abs(r.phi_star, 0.5 * (p + 3.0));
  };
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < rg.size(); ++k)
    acc += 0.5 * (rg[k + 1].r - rg[k].r) * (f(rg[k]) + f(rg[k + 1]));
  return acc;
}

struct RingInequalityStats {
  std::size_t checked = 0;
  std::size_t satisfied = 0;
  double worst_relative_excess = 0.0;
  double fraction() const {
    return checked == 0 ? 1.0 : static_cast<double>(satisfied) / static_cast<double>(checked);
  }
};

/// Per-ring check of phi*^{a} <= phi_-^{a} + a sqrt(A2 A3), a = (p+3)/2, with
/// the extrema taken over the same circle samples that define A2, A3.
/// A ring passes when the excess is at most rel_tol * phi*^{a}.
inline RingInequalityStats ring_inequality(const RadialProfile& prof, double rel_tol = 1e-3) {
  RingInequalityStats st;
  for (const auto& ring : prof.rings) {
    if (!ring.angular_valid) continue;
    ++st.checked;
    if (ring.inequality_excess <= rel_tol) ++st.satisfied;
    st.worst_relative_excess = std::max(st.worst_relative_excess, ring.inequality_excess);
  }
  return st;
}

// ---------------------------------------------------------------------------
// Records and series

struct DiagnosticToggles {
  bool energy = true;
  bool potential = true;
  bool conformal = true;
  bool null_energy = true;
  bool weighted_norms = true;
  bool h2 = true;
  bool sup = true;
  bool profile = false;
  bool spacetime = true;
};

/// One sample. Disabled entries are NaN.
struct DiagnosticRecord {
  double t = 0.0;
  double e_total = 0.0;
  double pot_weighted = 0.0;
  double pot_plain = 0.0;
  double q0 = 0.0;
  double conf_pot = 0.0;
  double e_q = 0.0;
  double wl2_angular = 0.0;
  double wl2_gradient = 0.0;
  double wl2_l2 = 0.0;
  double h2_norm = 0.0;
  double sup_abs = 0.0;
  double f = 0.0;
  double f_star = 0.0;
  double phi_star_int = 0.0;
  double lp_a = 0.0;  // int |phi|^{3(p-1)/2}
  double lp_2p = 0.0; // int |phi|^{2p}
  double s1 = 0.0;
  double s2 = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
};

inline const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {
      "t",       "e_total",      "pot_weighted", "pot_plain", "q0",           "conf_pot",
      "e_q",     "wl2_angular",  "wl2_gradient", "wl2_l2",    "h2_norm",      "sup_abs",
      "f",       "f_star",       "phi_star_int", "lp_a",      "lp_2p",        "s1",
      "s2",      "i1",           "i2",           "i3"};
  return cols;
}

inline std::vector<double> record_values(const DiagnosticRecord& r) {
  return {r.t,      r.e_total,      r.pot_weighted, r.pot_plain, r.q0,           r.conf_pot,
          r.e_q,    r.wl2_angular,  r.wl2_gradient, r.wl2_l2,    r.h2_norm,      r.sup_abs,
          r.f,      r.f_star,       r.phi_star_int, r.lp_a,      r.lp_2p,        r.s1,
          r.s2,     r.i1,           r.i2,           r.i3};
}

struct DiagnosticSeries {
  double p = 3.0;
  std::vector<DiagnosticRecord> records;
  std::vector<RadialProfile> profiles;

  std::vector<double> times() const {
    std::vector<double> v;
    for (const auto& r : records) v.push_back(r.t);
    return v;
  }
  template <class Get>
  std::vector<double> column(Get get) const {
    std::vector<double> v;
    for (const auto& r : records) v.push_back(get(r));
    return v;
  }
};

/// Evaluates the per-state entries of a record (spacetime sums and trace
/// integrals are filled by the caller, which sees the whole stream).
inline DiagnosticRecord evaluate_record(const WaveState& s, const GridSpec& g,
                                        const DiagnosticToggles& on,
                                        RadialProfile* profile_out = nullptr) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  DiagnosticRecord r;
  r.t = s.t;
  const double p = s.p;
  const bool need_grad = on.energy || on.conformal || on.null_energy || on.weighted_norms;
  numerics::Gradient gr;
  if (need_grad) gr = numerics::gradient(s.phi, g);

  if (on.energy) {
    r.e_total = integrate(g, [&](std::size_t i, std::size_t j) {
      return energy_density(gr.d1(i, j), gr.d2(i, j), s.pi(i, j), s.phi(i, j), p);
    });
  } else {
    r.e_total = nan;
  }
  if (on.potential) {
    const auto pd = potential_decay_functional(s, g);
    r.pot_weighted = pd.weighted;
    r.pot_plain = pd.plain;
  } else {
    r.pot_weighted = r.pot_plain = nan;
  }
  if (on.conformal) {
    r.q0 = conformal_charge(s, g, gr);
    r.conf_pot = conformal_potential(s, g);
  } else {
    r.q0 = r.conf_pot = nan;
  }
  r.e_q = on.null_energy ? null_weighted_energy(s, g, gr) : nan;
  if (on.weighted_norms) {
    const auto w = weighted_norm_suite(s, g, gr, on.h2);
    r.wl2_angular = w.angular;
    r.wl2_gradient = w.gradient;
    r.wl2_l2 = w.l2;
    r.h2_norm = w.h2;
  } else {
    r.wl2_angular = r.wl2_gradient = r.wl2_l2 = r.h2_norm = nan;
  }
  if (on.sup) {
    const auto sn = sup_norms(s, g);
    r.sup_abs = sn.sup_abs;
    r.f = sn.f;
    r.f_star = sn.f_star;
  } else {
    r.sup_abs = r.f = r.f_star = nan;
  }
  if (on.profile) {
    RadialProfile prof = radial_profile(s, g);
    r.phi_star_int = phi_star_functional(prof, s.t, p);
    if (profile_out) *profile_out = std::move(prof);
  } else {
    r.phi_star_int = nan;
  }
  if (on.spacetime) {
    const double a = 1.5 * (p - 1.0);
    r.lp_a = integrate(g, [&](std::size_t i, std::size_t j) { return pow_abs(s.phi(i, j), a); });
    r.lp_2p =
        integrate(g, [&](std::size_t i, std::size_t j) { return pow_abs(s.phi(i, j), 2.0 * p); });
  } else {
    r.lp_a = r.lp_2p = nan;
  }
  r.s1 = r.s2 = nan;
  r.i1 = r.i2 = r.i3 = nan;
  for (double v : record_values(r))
    if (std::isinf(v)) throw NumericalFault("diagnostics: infinite value at t=" + std::to_string(s.t));
  return r;
}

// ---------------------------------------------------------------------------
// Spacetime norms

struct SpacetimeSums {
  double s1 = 0.0;
  double s2 = 0.0;
  /// false when p <= 1 + sqrt(8): S1 is computed but no bound is claimed.
  bool s1_bound_claimed = false;
};

/// Partial sums over a uniformly spaced stream with spacing dt:
///   S1 = (sum dt int |phi|^a)^{1/a}, a = 3(p-1)/2
///   S2 = (sum dt (int |phi|^{2p})^{1/2})^{1/p}
class SpacetimeAccumulator {
public:
  SpacetimeAccumulator(double p, double dt) : p_(p), dt_(dt) {
    PParam{p};
    if (!(dt > 0.0)) throw InvalidArgument("spacetime accumulator: sample spacing must be positive");
  }

  SpacetimeSums add(double int_abs_a, double int_abs_2p) {
    sum_a_ += dt_ * int_abs_a;
    sum_2p_ += dt_ * std::sqrt(int_abs_2p);
    return sums();
  }

  SpacetimeSums sums() const {
    const double a = 1.5 * (p_ - 1.0);
    return {std::pow(sum_a_, 1.0 / a), std::pow(sum_2p_, 1.0 / p_), p_ > 1.0 + std::sqrt(8.0)};
  }

private:
  double p_;
  double dt_;
  double sum_a_ = 0.0;
  double sum_2p_ = 0.0;
};

// ---------------------------------------------------------------------------
// Series-level checks

namespace detail {

inline std::size_t find_time(const std::vector<DiagnosticRecord>& rec, double t) {
  for (std::size_t k = 0; k < rec.size(); ++k)
    if (std::abs(rec[k].t - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
  throw InvalidArgument("no sample at t=" + std::to_string(t));
}

} // namespace detail

struct ConformalBalance {
  double lhs = 0.0;
  double rhs = 0.0;
  double bulk = 0.0; // ((p-5)/(p+1)) int_s^t 2 tau int |phi|^{p+1}
  double residual = 0.0;
};

/// Conformal identity between samples s < t:
///   LHS = Q0(t) + (2/(p+1)) int (t^2+r^2)|phi(t)|^{p+1} + ((p-5)/(p+1)) int_s^t 2 tau int |phi|^{p+1}
///   RHS = Q0(s) + (2/(p+1)) int (s^2+r^2)|phi(s)|^{p+1}
/// The time integral is the trapezoid rule over the recorded samples.
inline ConformalBalance conformal_balance(const DiagnosticSeries& series, double s, double t) {
  const auto& rec = series.records;
  const std::size_t a = detail::find_time(rec, s);
  const std::size_t b = detail::find_time(rec, t);
  if (!(b > a)) throw InvalidArgument("conformal identity: need s < t");
  if (b - a - 1 < 3)
    throw InvalidArgument("conformal identity: fewer than 3 samples strictly between s and t");
  const double p = series.p;
  const double c = 2.0 / (p + 1.0);
  double integral = 0.0;
  for (std::size_t k = a; k < b; ++k) {
    const double f0 = 2.0 * rec[k].t * rec[k].pot_plain;
    const double f1 = 2.0 * rec[k + 1].t * rec[k + 1].pot_plain;
    integral += 0.5 * (rec[k + 1].t - rec[k].t) * (f0 + f1);
  }
  ConformalBalance out;
  out.bulk = (p - 5.0) / (p + 1.0) * integral;
  out.lhs = rec[b].q0 + c * rec[b].conf_pot + out.bulk;
  out.rhs = rec[a].q0 + c * rec[a].conf_pot;
  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.residual = scale == 0.0 ? 0.0 : std::abs(out.lhs - out.rhs) / scale;
  if (!std::isfinite(out.residual)) throw NumericalFault("conformal identity: non-finite residual");
  return out;
}

inline double conformal_identity_residual(const DiagnosticSeries& series, double s, double t) {
  return conformal_balance(series, s, t).residual;
}

struct RateFit {
  double alpha = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  std::size_t samples = 0;
};

/// Least-squares fit of log y = intercept + alpha log(1+t) over t in [t0, t1].
inline RateFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y,
                              double t0, double t1) {
  if (t.size() != y.size()) throw InvalidArgument("fit_decay_rate: length mismatch");
  std::vector<double> xs, ys;
  const double eps = 1e-9 * std::max(1.0, std::abs(t1));
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t0 - eps || t[k] > t1 + eps) continue;
    if (!(y[k] > 0.0) || !std::isfinite(y[k]))
      throw InvalidArgument("fit_decay_rate: nonpositive or non-finite value at t=" +
                            std::to_string(t[k]));
    xs.push_back(std::log1p(t[k]));
    ys.push_back(std::log(y[k]));
  }
  if (xs.size() < 5) throw InvalidArgument("fit_decay_rate: fewer than 5 samples in window");
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit_decay_rate: window has a single time value");
  RateFit fit;
  fit.alpha = sxy / sxx;
  fit.intercept = my - fit.alpha * mx;
  double rss = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double e = ys[k] - fit.intercept - fit.alpha * xs[k];
    rss += e * e;
  }
  fit.residual_rms = std::sqrt(rss / m);
  fit.t0 = t0;
  fit.t1 = t1;
  fit.samples = xs.size();
  return fit;
}

/// 1 + int_0^{t0} (ln(1+s) + 1)(1+s)^{(7-3p)/4} |f(s)|^{(p-3)/2} ds, with f
/// the piecewise-linear interpolant of the samples (8-point Gauss per cell).
inline double bootstrap_rhs(const std::vector<double>& t, const std::vector<double>& f, double p,
                            double t0) {
  if (!(p > 3.0)) throw InvalidArgument("bootstrap_rhs: requires p > 3");
  if (t.size() != f.size()) throw InvalidArgument("bootstrap_rhs: length mismatch");
  const double e_w = (7.0 - 3.0 * p) / 4.0;
  const double e_f = 0.5 * (p - 3.0);
  const auto rule = numerics::gauss_legendre(8);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double a = t[k];
    if (a >= t0) break;
    const double b = std::min(t[k + 1], t0);
    const double len = t[k + 1] - t[k];
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = a + 0.5 * (b - a) * (rule.nodes[q] + 1.0);
      const double lam = (s - a) / len;
      const double fs = (1.0 - lam) * f[k] + lam * f[k + 1];
      acc += 0.5 * (b - a) * rule.weights[q] * (std::log1p(s) + 1.0) * std::pow(1.0 + s, e_w) *
             pow_abs(fs, e_f);
    }
  }
  return 1.0 + acc;
}

} // namespace decay2d
