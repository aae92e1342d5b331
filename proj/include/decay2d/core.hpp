#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "decay2d/error.hpp"
#include "decay2d/grid.hpp"
#include "decay2d/numerics/differences.hpp"

namespace decay2d {

// ---------------------------------------------------------------------------
// Exponent bookkeeping and the nonlinearity

/// Nonlinearity exponent with its derived quantities.
struct PParam {
  double p = 3.0;

  explicit PParam(double exponent) : p(exponent) {
    if (!(exponent > 1.0) || !std::isfinite(exponent))
      throw InvalidArgument("exponent p must satisfy p > 1, got " + std::to_string(exponent));
  }
  /// Weight order of the null-hyperplane multiplier, (p-1)/2.
  double q() const { return 0.5 * (p - 1.0); }
  /// Critical Sobolev regularity (p-3)/(p-1).
  double critical_s() const { return (p - 3.0) / (p - 1.0); }
  bool subconformal() const { return p < 5.0; }
};

/// |x|^e for e > 0, with exact zero at x = 0 and a multiply-only path for
/// small integer exponents.
inline double pow_abs(double x, double e) {
  const double a = std::abs(x);
  if (a == 0.0) return 0.0;
  if (e == 1.0) return a;
  if (e == 2.0) return a * a;
  if (e == 3.0) return a * a * a;
  if (e == 4.0) {
    const double a2 = a * a;
    return a2 * a2;
  }
  if (e == 5.0) {
    const double a2 = a * a;
    return a2 * a2 * a;
  }
  if (e == 6.0) {
    const double a3 = a * a * a;
    return a3 * a3;
  }
  return std::pow(a, e);
}

/// Defocusing power nonlinearity N(u) = |u|^{p-1} u and its potential
/// G(u) = |u|^{p+1} / (p+1). `enabled == false` gives the free wave equation.
struct Nonlinearity {
  double p = 3.0;
  bool enabled = true;

  double force(double u) const {
    if (!enabled || u == 0.0) return 0.0;
    return pow_abs(u, p - 1.0) * u;
  }
  double potential(double u) const {
    if (!enabled) return 0.0;
    return pow_abs(u, p + 1.0) / (p + 1.0);
  }
  /// G''(u) = p |u|^{p-1}
  double force_slope(double u) const {
    if (!enabled) return 0.0;
    return p * pow_abs(u, p - 1.0);
  }
};

/// Energy density |v|^2 + |grad phi|^2 + (2/(p+1)) |phi|^{p+1}; shared so that
/// total_energy at t = 0 reproduces E_{0,0} bit for bit.
inline double energy_density(double d1, double d2, double v, double phi, double p) {
  return d1 * d1 + d2 * d2 + v * v + 2.0 / (p + 1.0) * pow_abs(phi, p + 1.0);
}

// ---------------------------------------------------------------------------
// Analytic initial data

enum class DataFamily { zero, smooth_bump, gaussian, fourier_mode };

inline std::string_view to_string(DataFamily f) {
  switch (f) {
  case DataFamily::zero: return "zero";
  case DataFamily::smooth_bump: return "smooth_bump";
  case DataFamily::gaussian: return "gaussian";
  case DataFamily::fourier_mode: return "fourier_mode";
  }
  return "zero";
}

inline DataFamily parse_family(std::string_view s) {
  if (s == "zero") return DataFamily::zero;
  if (s == "smooth_bump") return DataFamily::smooth_bump;
  if (s == "gaussian") return DataFamily::gaussian;
  if (s == "fourier_mode") return DataFamily::fourier_mode;
  throw InvalidArgument("unknown data family '" + std::string(s) + "'");
}

using Vec2 = std::array<double, 2>;

/// One analytic profile, used for either phi0 or phi1.
///  smooth_bump:  a exp(1 - 1/(1 - |x-c|^2/R^2)) inside |x-c| < R, else 0
///  gaussian:     a exp(-|x-c|^2/R^2)
///  fourier_mode: a cos(k . (x-c))
struct Profile {
  DataFamily family = DataFamily::zero;
  double amplitude = 0.0;
  double radius = 1.0;
  Vec2 center{0.0, 0.0};
  Vec2 mode{0.0, 0.0};

  /// Radius (about the center) beyond which the gaussian tail is below
  /// 1e-14 of its amplitude.
  double truncation_radius() const { return radius * std::sqrt(14.0 * std::log(10.0)); }

  bool is_zero() const { return family == DataFamily::zero || amplitude == 0.0; }

  /// Radius about the origin containing the (effective) support; infinite
  /// for Fourier modes.
  double support_radius() const {
    if (is_zero()) return 0.0;
    const double c = std::hypot(center[0], center[1]);
    switch (family) {
    case DataFamily::smooth_bump: return c + radius;
    case DataFamily::gaussian: return c + truncation_radius();
    case DataFamily::fourier_mode: return INFINITY;
    default: return 0.0;
    }
  }

  double value(double x1, double x2) const {
    if (is_zero()) return 0.0;
    const double d1 = x1 - center[0], d2 = x2 - center[1];
    switch (family) {
    case DataFamily::smooth_bump: {
      const double s = (d1 * d1 + d2 * d2) / (radius * radius);
      if (s >= 1.0) return 0.0;
      return amplitude * std::exp(1.0 - 1.0 / (1.0 - s));
    }
    case DataFamily::gaussian:
      return amplitude * std::exp(-(d1 * d1 + d2 * d2) / (radius * radius));
    case DataFamily::fourier_mode: return amplitude * std::cos(mode[0] * d1 + mode[1] * d2);
    default: return 0.0;
    }
  }

  Vec2 gradient(double x1, double x2) const {
    if (is_zero()) return {0.0, 0.0};
    const double d1 = x1 - center[0], d2 = x2 - center[1];
    switch (family) {
    case DataFamily::smooth_bump: {
      const double r2 = radius * radius;
      const double s = (d1 * d1 + d2 * d2) / r2;
      if (s >= 1.0) return {0.0, 0.0};
      const double v = amplitude * std::exp(1.0 - 1.0 / (1.0 - s));
      const double g = -v / ((1.0 - s) * (1.0 - s)) * 2.0 / r2;
      return {g * d1, g * d2};
    }
    case DataFamily::gaussian: {
      const double r2 = radius * radius;
      const double v = amplitude * std::exp(-(d1 * d1 + d2 * d2) / r2);
      return {-2.0 * v * d1 / r2, -2.0 * v * d2 / r2};
    }
    case DataFamily::fourier_mode: {
      const double s = -amplitude * std::sin(mode[0] * d1 + mode[1] * d2);
      return {s * mode[0], s * mode[1]};
    }
    default: return {0.0, 0.0};
    }
  }
};

inline Profile smooth_bump(double amplitude, double radius, Vec2 center = {0.0, 0.0}) {
  return {DataFamily::smooth_bump, amplitude, radius, center, {0.0, 0.0}};
}
inline Profile gaussian(double amplitude, double radius, Vec2 center = {0.0, 0.0}) {
  return {DataFamily::gaussian, amplitude, radius, center, {0.0, 0.0}};
}
inline Profile fourier_mode(double amplitude, Vec2 mode) {
  return {DataFamily::fourier_mode, amplitude, 1.0, {0.0, 0.0}, mode};
}

/// Cauchy data (phi0, phi1) as a pair of analytic profiles.
struct InitialDataSpec {
  Profile phi0;
  Profile phi1;

  double support_radius() const { return std::max(phi0.support_radius(), phi1.support_radius()); }
};

// ---------------------------------------------------------------------------
// Field state

/// The pair (phi, d_t phi) on the grid at time t.
struct WaveState {
  double t = 0.0;
  Field phi;
  Field pi;
  double p = 3.0;

  void validate(const GridSpec& g) const {
    if (phi.n() != g.n || pi.n() != g.n)
      throw InvalidArgument("WaveState: field shape does not match the grid");
    if (!all_finite(phi) || !all_finite(pi))
      throw NumericalFault("WaveState: non-finite sample at t=" + std::to_string(t));
  }
};

inline WaveState zero_state(const GridSpec& g, double p, double t = 0.0) {
  return {t, Field(g.n), Field(g.n), p};
}

/// Samples the analytic data at the nodes. Dirichlet grids additionally
/// require the support to stay strictly inside the box (cone_guard with
/// T_final = 0); Fourier modes need a periodic grid.
inline WaveState sample_initial_data(const InitialDataSpec& spec, const GridSpec& g, double p) {
  PParam{p};
  for (const Profile* prof : {&spec.phi0, &spec.phi1}) {
    if (prof->is_zero()) continue;
    if (!(prof->radius > 0.0))
      throw InvalidArgument("sample_initial_data: profile radius must be positive");
    if (prof->family == DataFamily::fourier_mode) {
      if (!g.periodic())
        throw InvalidArgument("sample_initial_data: fourier_mode data needs a periodic grid");
      continue;
    }
    const double rs = prof->support_radius();
    if (!(rs < g.half_width))
      throw ConeViolation("sample_initial_data: data support radius " + std::to_string(rs) +
                              " reaches the box half-width " + std::to_string(g.half_width) +
                              " (cone_guard)",
                          0.0);
  }
  WaveState s = zero_state(g, p);
  const std::size_t n = g.n;
  for (std::size_t j = 0; j < n; ++j) {
    const double x2 = g.coord(j);
    for (std::size_t i = 0; i < n; ++i) {
      const double x1 = g.coord(i);
      s.phi(i, j) = spec.phi0.value(x1, x2);
      s.pi(i, j) = spec.phi1.value(x1, x2);
    }
  }
  if (g.periodic()) {
    // Duplicate column/row must match node 0 exactly.
    for (std::size_t k = 0; k < n; ++k) {
      s.phi(n - 1, k) = s.phi(0, k);
      s.pi(n - 1, k) = s.pi(0, k);
    }
    for (std::size_t k = 0; k < n; ++k) {
      s.phi(k, n - 1) = s.phi(k, 0);
      s.pi(k, n - 1) = s.pi(k, 0);
    }
  }
  s.validate(g);
  return s;
}

// ---------------------------------------------------------------------------
// Weighted data norms

/// Discrete E_{0,0}, E_{0,2}, E_{1,0} of the Cauchy data.
struct InitialEnergies {
  double e00 = 0.0;
  double e02 = 0.0;
  double e10 = 0.0;
};

/// Trapezoid values of the weighted data energies
///   E_{k,g} = sum_{l<=k} int (1+|x|)^{g+2l} (|grad^{l+1} phi0|^2 + |grad^l phi1|^2)
///             + int (1+|x|)^g (2/(p+1)) |phi0|^{p+1}.
/// The potential coefficient 2/(p+1) makes E_{0,0} the conserved energy.
inline InitialEnergies initial_energies(const WaveState& s, const GridSpec& g) {
  if (s.t != 0.0) throw InvalidArgument("initial_energies: state must be at t = 0");
  s.validate(g);
  const double p = s.p;
  const double c = 2.0 / (p + 1.0);
  const auto grad0 = numerics::gradient(s.phi, g);
  const auto grad1 = numerics::gradient(s.pi, g);
  const auto hess0 = numerics::hessian(s.phi, g);

  auto radius = [&](std::size_t i, std::size_t j) { return std::hypot(g.coord(i), g.coord(j)); };
  auto base = [&](std::size_t i, std::size_t j) {
    const double d1 = grad0.d1(i, j), d2 = grad0.d2(i, j), v = s.pi(i, j);
    return d1 * d1 + d2 * d2 + v * v;
  };
  auto pot = [&](std::size_t i, std::size_t j) { return c * pow_abs(s.phi(i, j), p + 1.0); };

  InitialEnergies e;
  e.e00 = integrate(g, [&](std::size_t i, std::size_t j) {
    return energy_density(grad0.d1(i, j), grad0.d2(i, j), s.pi(i, j), s.phi(i, j), p);
  });
  e.e02 = integrate(g, [&](std::size_t i, std::size_t j) {
    const double w = 1.0 + radius(i, j);
    return w * w * (base(i, j) + pot(i, j));
  });
  const double second = integrate(g, [&](std::size_t i, std::size_t j) {
    const double w = 1.0 + radius(i, j);
    const double a = hess0.d11(i, j), b = hess0.d12(i, j), d = hess0.d22(i, j);
    const double g1 = grad1.d1(i, j), g2 = grad1.d2(i, j);
    return w * w * (a * a + 2.0 * b * b + d * d + g1 * g1 + g2 * g2);
  });
  e.e10 = e.e00 + second;
  if (!std::isfinite(e.e00) || !std::isfinite(e.e02) || !std::isfinite(e.e10))
    throw NumericalFault("initial_energies: non-finite integrand");
  return e;
}

} // namespace decay2d
