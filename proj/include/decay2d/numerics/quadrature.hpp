#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "decay2d/error.hpp"

namespace decay2d::numerics {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

namespace detail {

template <class Fn>
struct SimpsonState {
  Fn& f;
  double abs_tol;
  int max_depth;
  std::size_t evals = 0;
  bool converged = true;
  double err = 0.0;

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    evals += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= max_depth) {
      converged = false;
      err += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    if (std::abs(delta) <= 15.0 * tol) {
      err += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

} // namespace detail

/// Adaptive Simpson with Richardson correction. The tolerance is absolute and
/// is split in half at each bisection; recursion stops at max_depth.
template <class Fn>
QuadratureResult adaptive_simpson(Fn&& f, double a, double b, double abs_tol = 1e-10,
                                  int max_depth = 50) {
  if (a == b) return {};
  detail::SimpsonState<Fn> st{f, abs_tol, max_depth};
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  st.evals = 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double v = st.recurse(a, b, fa, fm, fb, whole, abs_tol, 0);
  return {v, st.err, st.evals, st.converged};
}

/// Adaptive Simpson over consecutive breakpoints; the tolerance is shared out
/// in proportion to interval length. Useful when the integrand has a thin
/// layer whose location is known.
template <class Fn>
QuadratureResult adaptive_simpson_pieces(Fn&& f, const std::vector<double>& breaks,
                                         double abs_tol = 1e-10, int max_depth = 50) {
  QuadratureResult total;
  if (breaks.size() < 2) return total;
  const double span = breaks.back() - breaks.front();
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double len = breaks[k + 1] - breaks[k];
    if (len <= 0.0) continue;
    auto r = adaptive_simpson(f, breaks[k], breaks[k + 1], abs_tol * len / span, max_depth);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.evaluations += r.evaluations;
    total.converged = total.converged && r.converged;
  }
  return total;
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on the three-term
/// recurrence).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(std::size_t order) {
  if (order == 0) throw InvalidArgument("gauss_legendre: order must be positive");
  GaussRule r;
  r.nodes.assign(order, 0.0);
  r.weights.assign(order, 0.0);
  if (order == 1) {
    r.weights[0] = 2.0;
    return r;
  }
  const std::size_t half = (order + 1) / 2;
  for (std::size_t k = 0; k < half; ++k) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.75) /
                        (static_cast<double>(order) + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t l = 2; l <= order; ++l) {
        const double pl = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / static_cast<double>(l);
        p0 = p1;
        p1 = pl;
      }
      dp = static_cast<double>(order) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[k] = -x;
    r.weights[k] = w;
    r.nodes[order - 1 - k] = x;
    r.weights[order - 1 - k] = w;
  }
  return r;
}

/// Composite Gauss-Legendre on [a, b]: `panels` equal panels of `panel_order`
/// points each, mapped to absolute nodes and weights.
inline GaussRule composite_gauss(double a, double b, std::size_t panels, std::size_t panel_order) {
  const GaussRule base = gauss_legendre(panel_order);
  GaussRule r;
  r.nodes.reserve(panels * panel_order);
  r.weights.reserve(panels * panel_order);
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    for (std::size_t k = 0; k < panel_order; ++k) {
      r.nodes.push_back(lo + 0.5 * width * (base.nodes[k] + 1.0));
      r.weights.push_back(0.5 * width * base.weights[k]);
    }
  }
  return r;
}

/// Splits `total` points into panels of at most 16 points.
inline GaussRule gauss_rule_with_points(double a, double b, std::size_t total) {
  const std::size_t panel_order = total < 16 ? total : 16;
  const std::size_t panels = (total + panel_order - 1) / panel_order;
  return composite_gauss(a, b, panels, panel_order);
}

} // namespace decay2d::numerics
