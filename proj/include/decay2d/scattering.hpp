#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "decay2d/core.hpp"
#include "decay2d/error.hpp"
#include "decay2d/grid.hpp"
#include "decay2d/numerics/fft.hpp"
#include "decay2d/numerics/summation.hpp"

namespace decay2d {

// Spectral free evolution on the 2L-periodic box. A grid snapshot is read
// through its m = n-1 distinct nodes per axis; on Dirichlet grids node n-1
// (x = +L) is the image of node 0 (x = -L) and both hold zero.

/// Half-complex Fourier coefficients c_k = (1/m^2) sum_x f(x) e^{-i k.x} of
/// (phi, d_t phi), stored m rows (k2) by m/2 + 1 columns (k1), with
/// k = pi * index / L. With this scaling ||f||_{L^2}^2 = (2L)^2 sum_k |c_k|^2.
struct SpectralState {
  double t = 0.0;
  double half_width = 1.0;
  std::size_t m = 2;
  double p = 3.0;
  std::vector<std::complex<double>> phi_hat;
  std::vector<std::complex<double>> pi_hat;

  std::size_t columns() const { return m / 2 + 1; }

  /// Signed wavenumber components of entry (row, col).
  double k1(std::size_t col) const { return std::numbers::pi * static_cast<double>(col) / half_width; }
  double k2(std::size_t row) const {
    const long r = row <= m / 2 ? static_cast<long>(row) : static_cast<long>(row) - static_cast<long>(m);
    return std::numbers::pi * static_cast<double>(r) / half_width;
  }
  double abs_k(std::size_t row, std::size_t col) const { return std::hypot(k1(col), k2(row)); }

  /// Multiplicity of a half-complex column in the full spectrum.
  double multiplicity(std::size_t col) const { return (col == 0 || 2 * col == m) ? 1.0 : 2.0; }
};

namespace detail {

inline std::size_t spectral_size(const GridSpec& g) {
  const std::size_t m = g.n - 1;
  if (m < 2 || m % 2 != 0) throw InvalidArgument("spectral transform needs an even number of distinct nodes");
  return m;
}

inline std::vector<std::complex<double>> forward_coefficients(const Field& f, std::size_t m,
                                                              numerics::RealFft2d& fft) {
  auto real = fft.real();
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) real[j * m + i] = f(i, j);
  fft.forward();
  const double scale = 1.0 / (static_cast<double>(m) * static_cast<double>(m));
  std::vector<std::complex<double>> out(fft.spectrum().begin(), fft.spectrum().end());
  for (auto& c : out) c *= scale;
  return out;
}

inline Field backward_field(const std::vector<std::complex<double>>& c, std::size_t m,
                            numerics::RealFft2d& fft) {
  std::copy(c.begin(), c.end(), fft.spectrum().begin());
  fft.backward();
  const auto real = fft.real();
  Field f(m + 1);
  for (std::size_t j = 0; j <= m; ++j)
    for (std::size_t i = 0; i <= m; ++i) f(i, j) = real[(j % m) * m + (i % m)];
  return f;
}

// (2L)^2 sum over the full spectrum of weight(|k|) |c_k|^2, zero mode
// included only if keep_zero.
template <class Weight>
double spectral_sum(const SpectralState& s, const std::vector<std::complex<double>>& c,
                    Weight&& weight, bool keep_zero) {
  const std::size_t cols = s.columns();
  std::vector<double> rows(s.m, 0.0);
  std::vector<double> buf(cols);
  for (std::size_t r = 0; r < s.m; ++r) {
    for (std::size_t q = 0; q < cols; ++q) {
      if (r == 0 && q == 0 && !keep_zero) {
        buf[q] = 0.0;
        continue;
      }
      buf[q] = s.multiplicity(q) * weight(s.abs_k(r, q)) * std::norm(c[r * cols + q]);
    }
    rows[r] = numerics::pairwise_sum(buf);
  }
  const double box = 2.0 * s.half_width;
  return box * box * numerics::pairwise_sum(rows);
}

inline void require_same_shape(const SpectralState& a, const SpectralState& b) {
  if (a.m != b.m || a.half_width != b.half_width)
    throw InvalidArgument("spectral states live on different boxes");
}

} // namespace detail

inline SpectralState to_spectral(const WaveState& s, const GridSpec& g) {
  s.validate(g);
  const std::size_t m = detail::spectral_size(g);
  numerics::RealFft2d fft(m);
  SpectralState out;
  out.t = s.t;
  out.half_width = g.half_width;
  out.m = m;
  out.p = s.p;
  out.phi_hat = detail::forward_coefficients(s.phi, m, fft);
  out.pi_hat = detail::forward_coefficients(s.pi, m, fft);
  return out;
}

/// Back to grid samples; node n-1 repeats node 0 on both axes.
inline WaveState to_physical(const SpectralState& s) {
  numerics::RealFft2d fft(s.m);
  return {s.t, detail::backward_field(s.phi_hat, s.m, fft), detail::backward_field(s.pi_hat, s.m, fft), s.p};
}

/// Free propagator used by free_evolve. `exact` rotates each mode with
/// frequency |k|. `leapfrog` reproduces the linear part of the three-level
/// solver with step dt on the same grid: frequency w with
/// sin(w dt / 2) = (dt/h) (sin^2(k1 h/2) + sin^2(k2 h/2))^{1/2}, and the
/// solver's centred velocity pi is the true mode velocity times sin(w dt)/(w dt).
/// Evolving a solver snapshot backwards with it undoes the free solver exactly.
struct FreeFlow {
  enum class Kind { exact, leapfrog };
  Kind kind = Kind::exact;
  double dt = 0.0;

  static FreeFlow leapfrog(double step) {
    if (!(step > 0.0)) throw InvalidArgument("FreeFlow: leapfrog step must be positive");
    return {Kind::leapfrog, step};
  }
};

namespace detail {

struct ModeRate {
  double omega;
  double velocity_scale; // solver pi = velocity_scale * mode velocity
};

inline ModeRate mode_rate(const SpectralState& s, const FreeFlow& flow, std::size_t r, std::size_t q) {
  if (flow.kind == FreeFlow::Kind::exact) return {s.abs_k(r, q), 1.0};
  const double h = 2.0 * s.half_width / static_cast<double>(s.m);
  const double a = std::sin(0.5 * s.k1(q) * h), b = std::sin(0.5 * s.k2(r) * h);
  const double arg = flow.dt / h * std::sqrt(a * a + b * b);
  if (!(arg < 1.0)) throw InvalidArgument("FreeFlow: leapfrog step violates the CFL limit");
  if (arg == 0.0) return {0.0, 1.0};
  const double wdt = 2.0 * std::asin(arg);
  return {wdt / flow.dt, std::sin(wdt) / wdt};
}

} // namespace detail

/// Free evolution by dt (any sign), mode by mode:
///   phi <- cos(w dt) phi + sin(w dt)/w v,  v <- -w sin(w dt) phi + cos(w dt) v,
/// and phi <- phi + dt v at w = 0; v is the mode velocity.
inline SpectralState free_evolve(SpectralState s, double dt, const FreeFlow& flow = {}) {
  const std::size_t cols = s.columns();
  for (std::size_t r = 0; r < s.m; ++r) {
    for (std::size_t q = 0; q < cols; ++q) {
      auto& a = s.phi_hat[r * cols + q];
      auto& b = s.pi_hat[r * cols + q];
      const auto rate = detail::mode_rate(s, flow, r, q);
      const double w = rate.omega;
      if (w == 0.0) {
        a += dt * b;
        continue;
      }
      const std::complex<double> v = b / rate.velocity_scale;
      const double c = std::cos(w * dt), sn = std::sin(w * dt);
      const std::complex<double> na = c * a + (sn / w) * v;
      const std::complex<double> nv = -w * sn * a + c * v;
      a = na;
      b = nv * rate.velocity_scale;
    }
  }
  s.t += dt;
  return s;
}

/// ||phi||_{L^2} from the coefficients (Parseval).
inline double spectral_l2(const SpectralState& s) {
  return std::sqrt(detail::spectral_sum(s, s.phi_hat, [](double) { return 1.0; }, true));
}

/// (sum |k|^{2s} |phi_k|^2 + sum |k|^{2s-2} |pi_k|^2)^{1/2} over k != 0, box-normalized.
/// The zero mode is left out of both sums.
inline double sobolev_norm(const SpectralState& st, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidArgument("sobolev_norm: s must lie in [0, 1]");
  const double a = detail::spectral_sum(st, st.phi_hat, [s](double k) { return std::pow(k, 2.0 * s); }, false);
  const double b = detail::spectral_sum(st, st.pi_hat, [s](double k) { return std::pow(k, 2.0 * s - 2.0); }, false);
  return std::sqrt(a + b);
}

/// (||grad phi||^2 + ||pi||^2)^{1/2}; the zero mode of pi is kept, so the
/// value is invariant under free_evolve.
inline double energy_norm(const SpectralState& st) {
  const double a = detail::spectral_sum(st, st.phi_hat, [](double k) { return k * k; }, false);
  const double b = detail::spectral_sum(st, st.pi_hat, [](double) { return 1.0; }, true);
  return std::sqrt(a + b);
}

inline SpectralState difference(const SpectralState& a, const SpectralState& b) {
  detail::require_same_shape(a, b);
  SpectralState d = a;
  for (std::size_t k = 0; k < d.phi_hat.size(); ++k) {
    d.phi_hat[k] -= b.phi_hat[k];
    d.pi_hat[k] -= b.pi_hat[k];
  }
  return d;
}

/// Largest violation of c(-k) = conj(c(k)) on the self-conjugate columns.
inline double hermitian_defect(const SpectralState& s) {
  const std::size_t cols = s.columns();
  double worst = 0.0;
  for (std::size_t q : {std::size_t{0}, s.m / 2}) {
    for (std::size_t r = 0; r < s.m; ++r) {
      const std::size_t rr = (s.m - r) % s.m;
      for (const auto* c : {&s.phi_hat, &s.pi_hat})
        worst = std::max(worst, std::abs((*c)[r * cols + q] - std::conj((*c)[rr * cols + q])));
    }
  }
  return worst;
}

/// Largest |phi|, |pi| within `band` nodes of the edge, relative to the
/// global maximum (0 for the zero state).
inline double boundary_fraction(const WaveState& s, const GridSpec& g, std::size_t band = 3) {
  const std::size_t n = g.n;
  double edge = 0.0, all = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::max(std::abs(s.phi(i, j)), std::abs(s.pi(i, j)));
      all = std::max(all, v);
      const std::size_t d = std::min({i, n - 1 - i, j, n - 1 - j});
      if (d <= band) edge = std::max(edge, v);
    }
  }
  return all == 0.0 ? 0.0 : edge / all;
}

/// Relative edge amplitude above which a Dirichlet snapshot is refused.
inline constexpr double kEdgeTolerance = 1e-10;

/// Data at t = 0 of the free wave that agrees with the snapshot at its time:
/// free_evolve(snapshot, -t). Dirichlet snapshots that reach the edge band
/// are refused, since the periodic surrogate would wrap them.
inline SpectralState scattering_candidate(const WaveState& snapshot, const GridSpec& g,
                                          const FreeFlow& flow = {}) {
  if (!g.periodic()) {
    const double frac = boundary_fraction(snapshot, g);
    if (frac > kEdgeTolerance)
      throw ConeViolation("scattering_candidate: snapshot at t=" + std::to_string(snapshot.t) +
                              " reaches the boundary band (relative amplitude " +
                              std::to_string(frac) + ")",
                          0.0);
  }
  return free_evolve(to_spectral(snapshot, g), -snapshot.t, flow);
}

/// Picks the stored snapshot at time T.
inline SpectralState scattering_candidate(const std::vector<WaveState>& snapshots, double T,
                                          const GridSpec& g, const FreeFlow& flow = {}) {
  for (const auto& s : snapshots)
    if (std::abs(s.t - T) <= 1e-9 * std::max(1.0, std::abs(T))) return scattering_candidate(s, g, flow);
  throw InvalidArgument("scattering_candidate: no snapshot at t=" + std::to_string(T));
}

struct CauchyRow {
  double t1 = 0.0;
  double t2 = 0.0;
  double energy_diff = 0.0;
  double critical_diff = 0.0;
};

/// Regularity used for the critical norm: (p-3)/(p-1), floored at 0.
inline double critical_regularity(double p) { return std::max(0.0, PParam{p}.critical_s()); }

/// Differences of candidates at consecutive snapshot times.
inline std::vector<CauchyRow> cauchy_differences(const std::vector<WaveState>& snapshots,
                                                 const GridSpec& g, const FreeFlow& flow = {}) {
  std::vector<SpectralState> cand;
  cand.reserve(snapshots.size());
  for (const auto& s : snapshots) cand.push_back(scattering_candidate(s, g, flow));
  std::vector<CauchyRow> rows;
  for (std::size_t k = 1; k < cand.size(); ++k) {
    const auto d = difference(cand[k], cand[k - 1]);
    rows.push_back({snapshots[k - 1].t, snapshots[k].t, energy_norm(d),
                    sobolev_norm(d, critical_regularity(snapshots[k].p))});
  }
  return rows;
}

} // namespace decay2d
