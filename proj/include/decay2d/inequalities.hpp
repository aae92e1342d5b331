#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string_view>
#include <vector>

#include "decay2d/diagnostics.hpp"
#include "decay2d/error.hpp"
#include "decay2d/grid.hpp"
#include "decay2d/numerics/differences.hpp"
#include "decay2d/numerics/quadrature.hpp"

namespace decay2d {

// ---------------------------------------------------------------------------
// Logarithmic Sobolev (Brezis-Gallouet-Wainger) ratios

/// Where the sup is taken and where the Sobolev norms are integrated:
///   plane    sup over R^2,          norms over R^2
///   inner    sup over |x| <= 1/2,   norms over |x| <= 3/4
///   outer    sup over |x| > 1,      norms over |x| > 5/6
///   annulus  sup over 1/2<=|x|<=3/2, norms over R^2 (uses the angular norm)
enum class Region { plane, inner_ball, outer, annulus };

inline std::string_view to_string(Region r) {
  switch (r) {
  case Region::plane: return "plane";
  case Region::inner_ball: return "inner_ball";
  case Region::outer: return "outer";
  case Region::annulus: return "annulus";
  }
  return "?";
}

inline Region parse_region(std::string_view s) {
  if (s == "plane") return Region::plane;
  if (s == "inner" || s == "inner_ball") return Region::inner_ball;
  if (s == "outer") return Region::outer;
  if (s == "annulus") return Region::annulus;
  throw InvalidArgument("unknown region '" + std::string(s) + "'");
}

/// Squared pieces of the norms. Kept separately so that ratios for rescaled
/// inputs can be predicted from the homogeneities of each piece.
struct NormParts {
  double sup = 0.0;
  double l2_sq = 0.0;
  double grad_sq = 0.0;
  double hess_sq = 0.0;    // |d11|^2 + 2|d12|^2 + |d22|^2
  double angular_sq = 0.0; // |angular grad u|^2
};

struct NormBundle {
  double sup_norm = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double l2 = 0.0;
  double angular = 0.0; // ||(u, angular grad u)||_{L^2}
  Region region = Region::plane;
  NormParts parts;
};

inline NormBundle bundle_from_parts(const NormParts& p, Region region) {
  NormBundle b;
  b.sup_norm = p.sup;
  b.l2 = std::sqrt(p.l2_sq);
  b.h1 = std::sqrt(p.l2_sq + p.grad_sq);
  b.h2 = std::sqrt(p.l2_sq + p.grad_sq + p.hess_sq);
  b.angular = std::sqrt(p.l2_sq + p.angular_sq);
  b.region = region;
  b.parts = p;
  return b;
}

namespace detail {

inline bool in_sup_region(Region reg, double r) {
  switch (reg) {
  case Region::plane: return true;
  case Region::inner_ball: return r <= 0.5;
  case Region::outer: return r > 1.0;
  case Region::annulus: return r >= 0.5 && r <= 1.5;
  }
  return false;
}

inline bool in_norm_region(Region reg, double r) {
  switch (reg) {
  case Region::inner_ball: return r <= 0.75;
  case Region::outer: return r > 5.0 / 6.0;
  default: return true;
  }
}

} // namespace detail

/// Finite-difference norms of u over the region masks (node-centre
/// membership). Derivatives use the whole grid.
inline NormBundle norm_bundle(const Field& u, const GridSpec& g, Region region) {
  if (u.n() != g.n) throw InvalidArgument("norm_bundle: field does not match grid");
  const auto gr = numerics::gradient(u, g);
  const auto hs = numerics::hessian(u, g);
  const std::size_t n = g.n;
  std::size_t sup_nodes = 0, norm_nodes = 0;
  NormParts p;
  for (std::size_t j = 0; j < g.unique_points(); ++j)
    for (std::size_t i = 0; i < g.unique_points(); ++i) {
      const double r = detail::radius_at(g, i, j);
      if (detail::in_sup_region(region, r)) {
        ++sup_nodes;
        p.sup = std::max(p.sup, std::abs(u(i, j)));
      }
      if (detail::in_norm_region(region, r)) ++norm_nodes;
    }
  (void)n;
  if (sup_nodes == 0 || norm_nodes == 0)
    throw InvalidArgument("norm_bundle: region " + std::string(to_string(region)) +
                          " holds no grid node");
  auto masked = [&](auto&& fn) {
    return integrate(g, [&](std::size_t i, std::size_t j) {
      return detail::in_norm_region(region, detail::radius_at(g, i, j)) ? fn(i, j) : 0.0;
    });
  };
  p.l2_sq = masked([&](std::size_t i, std::size_t j) { return u(i, j) * u(i, j); });
  p.grad_sq = masked([&](std::size_t i, std::size_t j) {
    return gr.d1(i, j) * gr.d1(i, j) + gr.d2(i, j) * gr.d2(i, j);
  });
  p.hess_sq = masked([&](std::size_t i, std::size_t j) {
    const double a = hs.d11(i, j), b = hs.d12(i, j), c = hs.d22(i, j);
    return a * a + 2.0 * b * b + c * c;
  });
  p.angular_sq = masked([&](std::size_t i, std::size_t j) {
    return angular_gradient_sq(g, i, j, gr.d1(i, j), gr.d2(i, j));
  });
  return bundle_from_parts(p, region);
}

/// LHS / RHS of the chosen inequality with the constant C dropped:
///   plane, inner, outer:  sup / (h1 (1 + ln(h2/h1))^{1/2})
///   annulus:              sup^2 / (h1 ang (1 + ln(h2/ang)))
inline double bgw_ratio(const NormBundle& b) {
  if (b.region == Region::annulus) {
    if (!(b.h1 > 0.0) || !(b.angular > 0.0))
      throw DegenerateInput("bgw_check: zero norm in denominator (annulus)");
    return b.sup_norm * b.sup_norm /
           (b.h1 * b.angular * (1.0 + std::log(b.h2 / b.angular)));
  }
  if (!(b.h1 > 0.0)) throw DegenerateInput("bgw_check: zero H^1 norm in denominator");
  return b.sup_norm / (b.h1 * std::sqrt(1.0 + std::log(b.h2 / b.h1)));
}

inline double bgw_check(const Field& u, const GridSpec& g, Region variant) {
  return bgw_ratio(norm_bundle(u, g, variant));
}

/// Parts of x -> u(mu x) predicted from those of u (d = 2).
inline NormParts dilate_parts(const NormParts& p, double mu) {
  NormParts q = p;
  q.l2_sq = p.l2_sq / (mu * mu);
  q.hess_sq = p.hess_sq * mu * mu;
  return q;
}

/// Radial profile with its first two derivatives, for norms evaluated by
/// one-dimensional quadrature instead of on a grid.
struct RadialNorms {
  double sup = 0.0;
  double l2_sq = 0.0;
  double grad_sq = 0.0;
  double hess_sq = 0.0;
};

/// Norms of u(x) = S(z), z = clamp(ln(1/|x|)/ln(lambda), 0, 1), with the C^2
/// quintic step S(z) = z^3 (10 - 15 z + 6 z^2). u = 1 on |x| < 1/lambda and
/// u = 0 outside the unit disk. In w = -ln r the integrals are smooth.
inline RadialNorms log_cone_norms(double lambda) {
  if (!(lambda > 1.0)) throw InvalidArgument("log_cone_norms: lambda must exceed 1");
  const double ll = std::log(lambda);
  auto S = [](double z) { return z * z * z * (10.0 - 15.0 * z + 6.0 * z * z); };
  auto S1 = [](double z) { return 30.0 * z * z * (1.0 - z) * (1.0 - z); };
  auto S2 = [](double z) { return 60.0 * z * (1.0 - z) * (1.0 - 2.0 * z); };
  // r dr = e^{-2w} dw
  auto l2 = [&](double w) {
    const double v = S(w / ll);
    return v * v * std::exp(-2.0 * w);
  };
  // g' = -S'(z) / (r ln lambda): g'^2 r dr = S'^2 / ln^2 dw
  auto grad = [&](double w) {
    const double v = S1(w / ll) / ll;
    return v * v;
  };
  // g'' = (S'' / ln^2 + S' / ln) / r^2, g'/r = -S' / (ln r^2)
  auto hess = [&](double w) {
    const double z = w / ll;
    const double a = S2(z) / (ll * ll) + S1(z) / ll;
    const double b = S1(z) / ll;
    return (a * a + b * b) * std::exp(2.0 * w);
  };
  const double two_pi = 2.0 * std::numbers::pi;
  RadialNorms out;
  out.sup = 1.0;
  const double tol = 1e-12;
  out.l2_sq = two_pi * (numerics::adaptive_simpson(l2, 0.0, ll, tol).value) +
              std::numbers::pi / (lambda * lambda);
  out.grad_sq = two_pi * numerics::adaptive_simpson(grad, 0.0, ll, tol).value;
  out.hess_sq = two_pi * numerics::adaptive_simpson(hess, 0.0, ll, tol * lambda * lambda).value;
  return out;
}

/// Plane-variant ratio and the plain sup/H^1 quotient of the log-cone family.
struct LogConeResult {
  double lambda = 0.0;
  double sup_over_h1 = 0.0;
  double bgw_ratio = 0.0;
};

inline LogConeResult log_cone_ratio(double lambda) {
  const auto rn = log_cone_norms(lambda);
  NormParts p;
  p.sup = rn.sup;
  p.l2_sq = rn.l2_sq;
  p.grad_sq = rn.grad_sq;
  p.hess_sq = rn.hess_sq;
  const auto b = bundle_from_parts(p, Region::plane);
  return {lambda, b.sup_norm / b.h1, bgw_ratio(b)};
}

// ---------------------------------------------------------------------------
// F(A) = int_{A + cos(theta) > 0} (A + cos theta)^{-1/2} d theta

struct FValue {
  double value = 0.0;
  bool divergent = false;
  bool converged = true;
};

namespace detail {

// Break points clustered where the integrand of the s-form varies on the
// scale sqrt(eps) near s = 0.
inline std::vector<double> layer_breaks(double eps) {
  std::vector<double> b{0.0};
  const double half_pi = 0.5 * std::numbers::pi;
  for (double w = std::sqrt(eps); w < half_pi; w *= 8.0) b.push_back(w);
  b.push_back(half_pi);
  return b;
}

} // namespace detail

/// s-form: 4 int_0^{pi/2} ((1+A) sin^2 s + (1-A))^{-1/2} ds for -1 < A < 1,
///         4 int_0^{pi/2} (2 sin^2 s + (A-1))^{-1/2} ds     for A > 1.
inline FValue F_of_A(double A, double abs_tol = 1e-12) {
  FValue out;
  if (A == 1.0) {
    out.divergent = true;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  if (A <= -1.0) return out;
  const double eps = std::abs(A - 1.0);
  numerics::QuadratureResult q;
  if (A < 1.0) {
    auto f = [&](double s) {
      const double sn = std::sin(s);
      return 1.0 / std::sqrt((1.0 + A) * sn * sn + (1.0 - A));
    };
    q = numerics::adaptive_simpson_pieces(f, detail::layer_breaks(eps / (1.0 + A)), abs_tol);
  } else {
    auto f = [&](double s) {
      const double sn = std::sin(s);
      return 1.0 / std::sqrt(2.0 * sn * sn + (A - 1.0));
    };
    q = numerics::adaptive_simpson_pieces(f, detail::layer_breaks(0.5 * eps), abs_tol);
  }
  out.value = 4.0 * q.value;
  out.converged = q.converged;
  return out;
}

/// The original angular integral. For -1 < A < 1 the endpoint singularity
/// at theta0 = arccos(-A) is removed by theta = theta0 - u^2 and the
/// identity A + cos(theta0 - v) = 2A sin^2(v/2) + sin(theta0) sin v.
inline FValue F_of_A_theta(double A, double abs_tol = 1e-12) {
  FValue out;
  if (A == 1.0) {
    out.divergent = true;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  if (A <= -1.0) return out;
  numerics::QuadratureResult q;
  if (A > 1.0) {
    auto f = [&](double th) { return 1.0 / std::sqrt(A + std::cos(th)); };
    q = numerics::adaptive_simpson(f, 0.0, std::numbers::pi, abs_tol);
  } else {
    const double th0 = std::acos(-A);
    const double s0 = std::sin(th0);
    auto f = [&](double u) {
      if (u == 0.0) return 2.0 / std::sqrt(s0);
      const double v = u * u;
      const double sh = std::sin(0.5 * v);
      return 2.0 * u / std::sqrt(2.0 * A * sh * sh + s0 * std::sin(v));
    };
    q = numerics::adaptive_simpson(f, 0.0, std::sqrt(th0), abs_tol);
  }
  out.value = 2.0 * q.value;
  out.converged = q.converged;
  return out;
}

inline double F_bound_denominator(double A) {
  return 1.0 + std::log1p(1.0 / std::abs(A - 1.0));
}

struct FBoundReport {
  double max_ratio = 0.0;
  double argmax = 0.0;
  std::size_t points = 0;
  bool all_converged = true;
};

/// max F(A) / (1 + ln(1 + 1/|A-1|)) over the given A values (A = 1 rejected).
inline FBoundReport F_bound_check(const std::vector<double>& As) {
  FBoundReport rep;
  for (double A : As) {
    if (A == 1.0) throw InvalidArgument("F_bound_check: A = 1 is excluded");
    const auto F = F_of_A(A);
    rep.all_converged = rep.all_converged && F.converged;
    const double ratio = F.value / F_bound_denominator(A);
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.argmax = A;
    }
    ++rep.points;
  }
  return rep;
}

/// Explicit constant carried by the bound on F.
inline double F_bound_constant() { return 2.0 * std::numbers::sqrt2 * std::numbers::pi; }

/// `count` values 1 +- d with d log-spaced over [d_min, d_max], alternating
/// sides.
inline std::vector<double> log_spaced_around_one(std::size_t count, double d_min, double d_max) {
  std::vector<double> out;
  out.reserve(count);
  const std::size_t half = count / 2;
  const std::size_t upper = count - half;
  auto offsets = [&](std::size_t m) {
    std::vector<double> d(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double f = m == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(m - 1);
      d[k] = d_min * std::pow(d_max / d_min, f);
    }
    return d;
  };
  for (double d : offsets(upper)) out.push_back(1.0 + d);
  for (double d : offsets(half)) out.push_back(1.0 - d);
  return out;
}

// ---------------------------------------------------------------------------
// int g(r) (1 + ln(1 + 2r/|x - r|)) dr  versus  int g(r)(1 + ln(1+s+r)) dr and
// ||g||_inf / (1+s)

/// Nonnegative samples g_k = g(r0 + k h); g is taken piecewise linear.
struct SampledRadial {
  double r0 = 0.0;
  double h = 1.0;
  std::vector<double> g;

  double r(std::size_t k) const { return r0 + static_cast<double>(k) * h; }
};

struct LogIntegralParts {
  double lhs = 0.0;
  double rhs_integral = 0.0; // int g (1 + ln(1+s+r)) dr
  double rhs_sup = 0.0;      // ||g||_inf (1+s)^{-1}

  /// LHS / (rhs_integral + rhs_sup); 0 when everything vanishes.
  double ratio() const {
    const double d = rhs_integral + rhs_sup;
    return d == 0.0 ? 0.0 : lhs / d;
  }
};

namespace detail {

// int_a^b (c0 + c1 u) ln|u| du, a < b, exact.
inline double linear_times_log(double c0, double c1, double a, double b) {
  auto F = [&](double u) {
    if (u == 0.0) return 0.0;
    const double lu = std::log(std::abs(u));
    return c0 * (u * lu - u) + c1 * (0.5 * u * u * lu - 0.25 * u * u);
  };
  return F(b) - F(a);
}

} // namespace detail

/// Cells farther than 2h from the singular point x use 8-point Gauss on the
/// whole integrand. Cells inside that window are split at x; the smooth
/// factor g (1 + ln(|x-r| + 2r)) uses Gauss, and - g ln|x-r| uses the exact
/// antiderivative for linear g.
inline LogIntegralParts log_integral_check(const SampledRadial& data, double s, double x) {
  if (!(s > 0.0)) throw InvalidArgument("log_integral_check: s must be positive");
  if (data.r0 < 0.0) throw InvalidArgument("log_integral_check: samples must lie in r >= 0");
  for (double v : data.g)
    if (v < 0.0 || !std::isfinite(v))
      throw InvalidArgument("log_integral_check: g must be nonnegative and finite");
  LogIntegralParts out;
  if (data.g.size() < 2) return out;
  const auto rule = numerics::gauss_legendre(8);
  const double h = data.h;
  double gmax = 0.0;
  for (double v : data.g) gmax = std::max(gmax, v);
  out.rhs_sup = gmax / (1.0 + s);

  auto gauss = [&](double a, double b, auto&& f) {
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double r = a + 0.5 * (b - a) * (rule.nodes[q] + 1.0);
      acc += rule.weights[q] * f(r);
    }
    return 0.5 * (b - a) * acc;
  };

  std::vector<double> lhs_cells(data.g.size() - 1), rhs_cells(data.g.size() - 1);
  for (std::size_t k = 0; k + 1 < data.g.size(); ++k) {
    const double a = data.r(k), b = data.r(k + 1);
    const double ga = data.g[k], gb = data.g[k + 1];
    if (ga == 0.0 && gb == 0.0) continue;
    auto g = [&](double r) { return ga + (gb - ga) * (r - a) / h; };
    rhs_cells[k] = gauss(a, b, [&](double r) { return g(r) * (1.0 + std::log1p(s + r)); });
    const bool near = x > a - 2.0 * h && x < b + 2.0 * h;
    if (!near) {
      lhs_cells[k] = gauss(a, b, [&](double r) {
        return g(r) * (1.0 + std::log1p(2.0 * r / std::abs(x - r)));
      });
      continue;
    }
    auto smooth = [&](double r) { return g(r) * (1.0 + std::log(std::abs(x - r) + 2.0 * r)); };
    double v = 0.0;
    if (x > a && x < b) {
      v += gauss(a, x, smooth) + gauss(x, b, smooth);
    } else {
      v += gauss(a, b, smooth);
    }
    // g(r) = c0 + c1 (r - x)
    const double c1 = (gb - ga) / h;
    const double c0 = ga + c1 * (x - a);
    v -= detail::linear_times_log(c0, c1, a - x, b - x);
    lhs_cells[k] = v;
  }
  out.lhs = numerics::pairwise_sum(lhs_cells);
  out.rhs_integral = numerics::pairwise_sum(rhs_cells);
  return out;
}

} // namespace decay2d
