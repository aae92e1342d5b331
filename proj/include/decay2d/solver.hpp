#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "decay2d/core.hpp"
#include "decay2d/error.hpp"
#include "decay2d/grid.hpp"
#include "decay2d/numerics/differences.hpp"
#include "decay2d/numerics/interpolation.hpp"
#include "decay2d/numerics/parallel.hpp"

namespace decay2d {

enum class SchemeKind { explicit_leapfrog, conservative };

inline std::string_view to_string(SchemeKind k) {
  return k == SchemeKind::conservative ? "conservative" : "explicit_leapfrog";
}

inline SchemeKind parse_scheme(std::string_view s) {
  if (s == "explicit_leapfrog" || s == "leapfrog") return SchemeKind::explicit_leapfrog;
  if (s == "conservative") return SchemeKind::conservative;
  throw InvalidArgument("unknown scheme kind '" + std::string(s) + "'");
}

/// Largest admissible dt/h: the 2D five-point limit 1/sqrt(2) minus a margin.
inline constexpr double kCflMargin = 1e-3;
inline double max_cfl() { return 1.0 / std::sqrt(2.0) - kCflMargin; }

struct StepScheme {
  SchemeKind kind = SchemeKind::explicit_leapfrog;
  double dt = 0.0;
  double cfl = 0.4;
};

inline void check_scheme(const StepScheme& s, const GridSpec& g) {
  if (!(s.dt > 0.0) || !std::isfinite(s.dt)) throw InvalidArgument("time step must be positive");
  const double cfl = s.dt / g.h;
  if (cfl > max_cfl() * (1.0 + 1e-12))
    throw InvalidArgument("CFL violation: dt/h = " + std::to_string(cfl) + " exceeds " +
                          std::to_string(max_cfl()));
}

inline StepScheme make_scheme(SchemeKind kind, const GridSpec& g, double cfl = 0.4) {
  StepScheme s{kind, cfl * g.h, cfl};
  check_scheme(s, g);
  return s;
}

// ---------------------------------------------------------------------------
// Cone containment

struct ConeCheck {
  bool ok = true;
  double max_t_final = 0.0;
};

/// ok iff R_s + T + 2h < L. max_t_final = L - R_s - 2h is the supremum of
/// admissible final times.
inline ConeCheck cone_guard(const GridSpec& g, double support_radius, double t_final) {
  const double limit = g.half_width - support_radius - 2.0 * g.h;
  return {support_radius + t_final + 2.0 * g.h < g.half_width, limit};
}

inline void require_cone(const GridSpec& g, double support_radius, double t_final) {
  const auto c = cone_guard(g, support_radius, t_final);
  if (!c.ok)
    throw ConeViolation("cone_guard: support radius " + std::to_string(support_radius) +
                            " plus T_final " + std::to_string(t_final) +
                            " reaches the box; largest admissible T_final is " +
                            std::to_string(c.max_t_final),
                        c.max_t_final);
}

// ---------------------------------------------------------------------------
// Discrete energies

/// Energy of the interval between levels `older` and `newer`:
///   sum h^2 [ ((newer-older)/dt)^2 + grad newer . grad older + G(newer) + G(older) ]
/// with G = |u|^{p+1}/(p+1), scaled like total_energy. The gradient pairing
/// is -newer . Lap older (summation by parts against held boundary values).
/// It is exactly invariant under the conservative scheme.
inline double interval_energy(const Field& older, const Field& newer, const GridSpec& g,
                              double dt, const Nonlinearity& nl) {
  Field lap(g.n);
  numerics::laplacian_into(older, g, lap);
  const double p1 = nl.p + 1.0;
  const double inv_dt = 1.0 / dt;
  return integrate(g, [&](std::size_t i, std::size_t j) {
    const double v = (newer(i, j) - older(i, j)) * inv_dt;
    double e = v * v - newer(i, j) * lap(i, j);
    if (nl.enabled) e += (pow_abs(newer(i, j), p1) + pow_abs(older(i, j), p1)) / p1;
    return e;
  });
}

namespace detail {

// Secant slope Q(x, c) = (G(x) - G(c)) / (x - c) and its x-derivative.
// Near x = c both come from a midpoint Taylor expansion, which avoids the
// cancellation in the difference quotient.
struct Secant {
  double q;
  double dq;
};

inline Secant secant_slope(double x, double c, double p) {
  const double d = x - c;
  const double scale = std::max(std::abs(x), std::abs(c));
  if (scale == 0.0) return {0.0, 0.0};
  if (std::abs(d) <= 1e-3 * scale) {
    const double m = 0.5 * (x + c);
    const double am = std::abs(m);
    const double s = m < 0.0 ? -1.0 : 1.0;
    const double g1 = pow_abs(m, p - 1.0) * m;                       // G'
    const double g2 = p * pow_abs(m, p - 1.0);                       // G''
    const double g3 = am == 0.0 ? 0.0 : p * (p - 1.0) * std::pow(am, p - 2.0) * s;  // G'''
    return {g1 + g3 * d * d / 24.0, 0.5 * g2 + g3 * d / 12.0};
  }
  const double p1 = p + 1.0;
  const double gx = pow_abs(x, p1) / p1, gc = pow_abs(c, p1) / p1;
  const double q = (gx - gc) / d;
  const double nx = pow_abs(x, p - 1.0) * x;
  return {q, (nx - q) / d};
}

// Root of f(x) = x + a Q(x, c) - b, a >= 0. f is increasing with f' >= 1,
// so the root lies within |f(x0)| of x0 on the side given by the sign.
inline double solve_node(double x0, double c, double b, double a, double p) {
  auto f = [&](double x) { return x + a * secant_slope(x, c, p).q - b; };
  double f0 = f(x0);
  if (f0 == 0.0) return x0;
  double lo = f0 > 0.0 ? x0 - f0 : x0;
  double hi = f0 > 0.0 ? x0 : x0 - f0;
  double x = x0;
  for (int it = 0; it < 50; ++it) {
    const auto s = secant_slope(x, c, p);
    const double fx = x + a * s.q - b;
    const double tol = 1e-13 * std::max(1.0, std::abs(x));
    if (std::abs(fx) <= tol) return x;
    if (fx > 0.0)
      hi = x;
    else
      lo = x;
    double xn = x - fx / (1.0 + a * s.dq);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 1e-16 * std::max(1.0, std::abs(x))) return xn;
    x = xn;
  }
  throw NumericalFault("conservative step: Newton iteration did not converge (50 iterations, "
                       "tolerance 1e-13)");
}

inline void copy_periodic_edges(Field& f) {
  const std::size_t n = f.n();
  for (std::size_t k = 0; k < n; ++k) f(n - 1, k) = f(0, k);
  for (std::size_t k = 0; k < n; ++k) f(k, n - 1) = f(k, 0);
}

} // namespace detail

/// Three-level time stepper. Holds phi at the previous, current and next
/// levels, so that the centered velocity (next - prev)/(2 dt) is available
/// at the current level. The first step is the Taylor start
///   phi^1 = phi^0 + dt phi_1 + dt^2/2 (Lap phi^0 - N(phi^0)).
class Stepper {
public:
  Stepper(const GridSpec& g, const StepScheme& scheme, const WaveState& initial,
          bool nonlinear = true)
      : g_(g), scheme_(scheme), nl_{initial.p, nonlinear}, t0_(initial.t), pi0_(initial.pi),
        prev_(g.n), cur_(initial.phi), next_(g.n), lap_(g.n) {
    PParam{initial.p};
    check_scheme(scheme_, g_);
    initial.validate(g_);
    const double dt = scheme_.dt;
    numerics::laplacian_into(cur_, g_, lap_);
    const std::size_t n = g_.n;
    numerics::parallel_for(0, n, [&](std::size_t j) {
      for (std::size_t i = 0; i < n; ++i)
        next_(i, j) = cur_(i, j) + dt * pi0_(i, j) +
                      0.5 * dt * dt * (lap_(i, j) - nl_.force(cur_(i, j)));
    });
    fix_boundary(next_);
    if (!all_finite(next_)) throw NumericalFault("Taylor start produced a non-finite value");
  }

  const GridSpec& grid() const { return g_; }
  const StepScheme& scheme() const { return scheme_; }
  const Nonlinearity& nonlinearity() const { return nl_; }
  double dt() const { return scheme_.dt; }
  std::size_t steps() const { return steps_; }
  /// Time of the current level.
  double time() const { return t0_ + direction_ * static_cast<double>(steps_) * scheme_.dt; }

  const Field& previous() const { return prev_; }
  const Field& current() const { return cur_; }
  const Field& next() const { return next_; }

  /// (phi, pi) at the current level.
  WaveState state() const {
    WaveState s{time(), cur_, Field(g_.n), nl_.p};
    if (steps_ == 0 && !reversed_) {
      s.pi = pi0_;
    } else {
      const double inv = direction_ / (2.0 * scheme_.dt);
      const auto a = next_.data();
      const auto b = prev_.data();
      auto out = s.pi.data();
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = (a[k] - b[k]) * inv;
    }
    return s;
  }

  /// Advances one level.
  void advance() {
    const double dt = scheme_.dt;
    const double a = dt * dt;
    numerics::laplacian_into(next_, g_, lap_);
    // prev_ becomes the new "next" buffer.
    Field& out = prev_;
    const std::size_t n = g_.n;
    const std::size_t rows = g_.periodic() ? n - 1 : n;
    if (scheme_.kind == SchemeKind::explicit_leapfrog || !nl_.enabled) {
      numerics::parallel_for(0, rows, [&](std::size_t j) {
        for (std::size_t i = 0; i < n; ++i)
          out(i, j) = 2.0 * next_(i, j) - cur_(i, j) + a * (lap_(i, j) - nl_.force(next_(i, j)));
      });
    } else {
      const double p = nl_.p;
      numerics::parallel_for(0, rows, [&](std::size_t j) {
        for (std::size_t i = 0; i < n; ++i) {
          const double c = cur_(i, j);
          const double b = 2.0 * next_(i, j) - c + a * lap_(i, j);
          const double guess = b - a * nl_.force(next_(i, j));
          out(i, j) = detail::solve_node(guess, c, b, a, p);
        }
      });
    }
    fix_boundary(out);
    // rotate: prev <- cur, cur <- next, next <- out
    std::swap(prev_, cur_);  // prev_ = old cur, cur_ = out
    std::swap(cur_, next_);  // cur_ = old next, next_ = out
    ++steps_;
    if (!all_finite(next_))
      throw NumericalFault("solver produced a non-finite value at t=" + std::to_string(time()));
  }

  void advance(std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) advance();
  }

  /// Reverses the direction of time (equivalent to negating pi). Requires at
  /// least one completed step so that both neighbours of the current level
  /// exist. Subsequent steps walk back through earlier levels.
  void reverse() {
    if (steps_ == 0 && !reversed_)
      throw InvalidArgument("Stepper::reverse: needs a completed step");
    std::swap(prev_, next_);
    t0_ = time();
    steps_ = 0;
    direction_ = -direction_;
    reversed_ = true;
  }

  /// Energy of the interval [current, next]; exactly conserved by the
  /// conservative scheme.
  double interval_energy() const {
    return decay2d::interval_energy(cur_, next_, g_, scheme_.dt, nl_);
  }

private:
  void fix_boundary(Field& f) const {
    const std::size_t n = g_.n;
    if (g_.periodic()) {
      detail::copy_periodic_edges(f);
      return;
    }
    for (std::size_t k = 0; k < n; ++k) {
      f(0, k) = 0.0;
      f(n - 1, k) = 0.0;
      f(k, 0) = 0.0;
      f(k, n - 1) = 0.0;
    }
  }

  GridSpec g_;
  StepScheme scheme_;
  Nonlinearity nl_;
  double t0_;
  double direction_ = 1.0;
  bool reversed_ = false;
  std::size_t steps_ = 0;
  Field pi0_;
  Field prev_, cur_, next_, lap_;
};

/// One step of size dt from a bare state. The state carries no history, so
/// this is the Taylor start; repeated stepping should use Stepper.
inline WaveState step(const WaveState& s, const GridSpec& g, const StepScheme& scheme,
                      bool nonlinear = true) {
  Stepper st(g, scheme, s, nonlinear);
  st.advance();
  return st.state();
}

// ---------------------------------------------------------------------------
// Trace on the null hyperplane {t = x1}

struct NullTraceRow {
  double t = 0.0;
  std::vector<double> phi;
  std::vector<double> l1phi;
  std::vector<double> d2phi;
};

/// Flux integrals through {t = x1}:
///   I1 = int x2^2 |L1 phi|^2,  I2 = int |L1 phi|^2 + |d2 phi|^2 + (2/(p+1))|phi|^{p+1},
///   I3 = int |x2 L1 phi + d2 phi|^2 + (2/(p+1))|phi|^{p+1},   L1 = d_t + d_1,
/// each over dt dx2.
struct NullTrace {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double t_reached = 0.0;
  std::size_t intervals = 0;
  bool saturated = false;
  bool store_rows = false;
  std::vector<NullTraceRow> rows;
};

/// Adds the interval [t, t + dt] between levels `a` (time t) and `b` (time
/// t + dt). Values are taken at the interval midpoint: cubic interpolation in
/// x1 on each level, averaged in time; d_t by the level difference.
inline void record_null_trace(const Field& a, const Field& b, double t, double dt,
                              const GridSpec& g, double p, NullTrace& trace) {
  if (trace.saturated) return;
  const double tm = t + 0.5 * dt;
  if (t + dt >= g.half_width - 2.0 * g.h) {
    trace.saturated = true;
    return;
  }
  const auto loc = numerics::locate(g, tm);
  if (!loc) {
    trace.saturated = true;
    return;
  }
  const auto w = numerics::cubic_weights(loc->offset);
  const std::size_t n = g.n;
  std::vector<double> va(n), vb(n), da(n), db(n);
  for (std::size_t j = 0; j < n; ++j) {
    double sa = 0.0, sb = 0.0, ga = 0.0, gb = 0.0;
    for (int q = 0; q < 4; ++q) {
      const std::size_t i = numerics::stencil_index(g, loc->base - 1 + q);
      sa += w.value[q] * a(i, j);
      sb += w.value[q] * b(i, j);
      ga += w.slope[q] * a(i, j);
      gb += w.slope[q] * b(i, j);
    }
    va[j] = sa;
    vb[j] = sb;
    da[j] = ga / g.h;
    db[j] = gb / g.h;
  }
  const double c = 2.0 / (p + 1.0);
  NullTraceRow row;
  if (trace.store_rows) {
    row.t = tm;
    row.phi.resize(n);
    row.l1phi.resize(n);
    row.d2phi.resize(n);
  }
  std::vector<double> f1(n), f2(n), f3(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = 0.5 * (va[j] + vb[j]);
    const double dtp = (vb[j] - va[j]) / dt;
    const double d1 = 0.5 * (da[j] + db[j]);
    double d2 = 0.0;
    if (g.periodic() || (j > 0 && j + 1 < n)) {
      const std::size_t jp = g.periodic() ? wrap_index(static_cast<long>(j) + 1, n) : j + 1;
      const std::size_t jm = g.periodic() ? wrap_index(static_cast<long>(j) - 1, n) : j - 1;
      d2 = 0.25 * ((va[jp] + vb[jp]) - (va[jm] + vb[jm])) / g.h;
    }
    const double l1 = dtp + d1;
    const double x2 = g.coord(j);
    const double pot = c * pow_abs(phi, p + 1.0);
    const double wj = g.weight(j);
    f1[j] = wj * x2 * x2 * l1 * l1;
    f2[j] = wj * (l1 * l1 + d2 * d2 + pot);
    const double m = x2 * l1 + d2;
    f3[j] = wj * (m * m + pot);
    if (trace.store_rows) {
      row.phi[j] = phi;
      row.l1phi[j] = l1;
      row.d2phi[j] = d2;
    }
  }
  trace.i1 += dt * numerics::pairwise_sum(f1);
  trace.i2 += dt * numerics::pairwise_sum(f2);
  trace.i3 += dt * numerics::pairwise_sum(f3);
  trace.t_reached = t + dt;
  ++trace.intervals;
  if (trace.store_rows) trace.rows.push_back(std::move(row));
}

} // namespace decay2d
