#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "decay2d/core.hpp"
#include "decay2d/error.hpp"
#include "decay2d/grid.hpp"
#include "decay2d/numerics/interpolation.hpp"
#include "decay2d/numerics/quadrature.hpp"
#include "decay2d/numerics/summation.hpp"

namespace decay2d {

// Mesh-free evaluation of the free wave propagator in two dimensions:
//
//   2 pi phi(t,x) = t int_{|y|<1} phi1(x+ty) / sqrt(1-|y|^2) dy
//                 + d/dt [ t int_{|y|<1} phi0(x+ty) / sqrt(1-|y|^2) dy ]
//
// Disk integrals use y = sin(a) (cos th, sin th), which turns
// dy / sqrt(1-|y|^2) into sin(a) da dth: Gauss-Legendre in a on [0, pi/2],
// trapezoid in th.

struct PointQuery {
  double t = 0.0;
  Vec2 x{0.0, 0.0};
  std::size_t n_rho = 64;   // Gauss points in a
  std::size_t n_theta = 64; // trapezoid points in th
  std::size_t n_s = 16;     // Gauss points in time (source term)
};

using ScalarFn = std::function<double(double, double)>;
using GradientFn = std::function<Vec2(double, double)>;
/// Source F(s, y1, y2).
using SourceFn = std::function<double(double, double, double)>;

struct LinearData {
  ScalarFn phi0;
  GradientFn grad_phi0;
  ScalarFn phi1;
};

/// Wraps analytic profiles (value and gradient available in closed form).
inline LinearData linear_data(const Profile& phi0, const Profile& phi1) {
  LinearData d;
  if (!phi0.is_zero()) {
    d.phi0 = [phi0](double a, double b) { return phi0.value(a, b); };
    d.grad_phi0 = [phi0](double a, double b) { return phi0.gradient(a, b); };
  }
  if (!phi1.is_zero()) d.phi1 = [phi1](double a, double b) { return phi1.value(a, b); };
  return d;
}

namespace detail {

inline void check_query(const PointQuery& q) {
  if (!(q.t >= 0.0) || !std::isfinite(q.t))
    throw InvalidArgument("kernel oracle: query time must be finite and >= 0");
  if (q.n_rho < 8 || q.n_theta < 8 || q.n_s < 8)
    throw InvalidArgument("kernel oracle: quadrature orders must be >= 8");
}

struct DiskRule {
  numerics::GaussRule alpha;
  std::vector<double> rho;  // sin(a)
  std::vector<double> wrho; // Gauss weight * sin(a)
  std::vector<double> c, s; // cos th, sin th
  double wtheta = 0.0;
};

inline DiskRule disk_rule(std::size_t n_rho, std::size_t n_theta) {
  DiskRule r;
  r.alpha = numerics::gauss_rule_with_points(0.0, 0.5 * std::numbers::pi, n_rho);
  for (std::size_t k = 0; k < r.alpha.nodes.size(); ++k) {
    r.rho.push_back(std::sin(r.alpha.nodes[k]));
    r.wrho.push_back(r.alpha.weights[k] * r.rho.back());
  }
  for (std::size_t m = 0; m < n_theta; ++m) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n_theta);
    r.c.push_back(std::cos(th));
    r.s.push_back(std::sin(th));
  }
  r.wtheta = 2.0 * std::numbers::pi / static_cast<double>(n_theta);
  return r;
}

// int_{|y|<1} f(y) / sqrt(1-|y|^2) dy
template <class Fn>
double disk_integral(const DiskRule& r, Fn&& f) {
  std::vector<double> rings(r.rho.size());
  std::vector<double> buf(r.c.size());
  for (std::size_t k = 0; k < r.rho.size(); ++k) {
    const double rho = r.rho[k];
    for (std::size_t m = 0; m < r.c.size(); ++m) buf[m] = f(rho * r.c[m], rho * r.s[m]);
    rings[k] = r.wrho[k] * r.wtheta * numerics::pairwise_sum(buf);
  }
  return numerics::pairwise_sum(rings);
}

} // namespace detail

/// Value of the free wave with data (phi0, phi1) at (t, x). The time
/// derivative of the phi0 term is expanded before quadrature:
///   d/dt [t I0(t)] = I0(t) + t int (y . grad phi0)(x+ty) / sqrt(1-|y|^2) dy.
inline double linear_point_value(const PointQuery& q, const LinearData& data) {
  detail::check_query(q);
  if (data.phi0 && !data.grad_phi0)
    throw InvalidArgument("kernel oracle: phi0 given without its gradient");
  const auto rule = detail::disk_rule(q.n_rho, q.n_theta);
  const double t = q.t, x1 = q.x[0], x2 = q.x[1];
  double acc = 0.0;
  if (data.phi1) {
    acc += t * detail::disk_integral(rule, [&](double y1, double y2) {
      return data.phi1(x1 + t * y1, x2 + t * y2);
    });
  }
  if (data.phi0) {
    acc += detail::disk_integral(rule, [&](double y1, double y2) {
      const double a = x1 + t * y1, b = x2 + t * y2;
      const Vec2 gr = data.grad_phi0(a, b);
      return data.phi0(a, b) + t * (y1 * gr[0] + y2 * gr[1]);
    });
  }
  return acc / (2.0 * std::numbers::pi);
}

/// Raw source integral
///   D = int_0^t (t-s) int_{|y|<1} F(s, x+(t-s)y) / sqrt(1-|y|^2) dy ds.
/// Sign convention: with box = -d_t^2 + Laplacian and box phi = N(phi), the
/// solution is phi = (free wave) - D[N(phi)] / (2 pi). For F = 1, D = pi t^2.
inline double duhamel_point_value(const PointQuery& q, const SourceFn& F) {
  detail::check_query(q);
  if (q.t == 0.0) return 0.0;
  const auto rule = detail::disk_rule(q.n_rho, q.n_theta);
  const auto srule = numerics::gauss_rule_with_points(0.0, q.t, q.n_s);
  const double x1 = q.x[0], x2 = q.x[1];
  std::vector<double> parts(srule.nodes.size());
  for (std::size_t k = 0; k < srule.nodes.size(); ++k) {
    const double s = srule.nodes[k];
    const double tau = q.t - s;
    parts[k] = srule.weights[k] * tau * detail::disk_integral(rule, [&](double y1, double y2) {
      return F(s, x1 + tau * y1, x2 + tau * y2);
    });
  }
  return numerics::pairwise_sum(parts);
}

/// Stored solution levels at uniformly spaced times, evaluated by bicubic
/// interpolation in space and four-point Lagrange interpolation in time.
/// Points outside the grid (or without a full stencil) read as 0, which is
/// exact for cone-contained Dirichlet runs.
class SnapshotField {
public:
  SnapshotField(const GridSpec& g, double t0, double spacing)
      : g_(g), t0_(t0), dt_(spacing) {
    if (!(spacing > 0.0)) throw InvalidArgument("SnapshotField: spacing must be positive");
  }

  void push(Field f) {
    if (f.n() != g_.n) throw InvalidArgument("SnapshotField: field does not match grid");
    levels_.push_back(std::move(f));
  }

  std::size_t size() const { return levels_.size(); }
  double t_begin() const { return t0_; }
  double t_end() const { return t0_ + dt_ * static_cast<double>(levels_.size() - 1); }
  const GridSpec& grid() const { return g_; }

  double operator()(double s, double y1, double y2) const {
    if (levels_.empty()) throw InvalidArgument("SnapshotField: no levels stored");
    const double eps = 1e-9 * dt_;
    if (s < t_begin() - eps || s > t_end() + eps)
      throw InvalidArgument("SnapshotField: time " + std::to_string(s) + " outside stored range");
    if (levels_.size() == 1) return space(0, y1, y2);
    const double u = (s - t0_) / dt_;
    const long last = static_cast<long>(levels_.size()) - 1;
    if (levels_.size() < 4) {
      const long k = std::clamp(static_cast<long>(std::floor(u)), 0L, last - 1);
      const double w = u - static_cast<double>(k);
      return (1.0 - w) * space(k, y1, y2) + w * space(k + 1, y1, y2);
    }
    long k = static_cast<long>(std::floor(u));
    k = std::clamp(k, 1L, last - 2);
    const auto w = numerics::cubic_weights(u - static_cast<double>(k));
    double acc = 0.0;
    for (int q = 0; q < 4; ++q) acc += w.value[q] * space(k - 1 + q, y1, y2);
    return acc;
  }

private:
  double space(long k, double y1, double y2) const {
    const auto v = numerics::bicubic(levels_[static_cast<std::size_t>(k)], g_, y1, y2);
    return v ? *v : 0.0;
  }

  GridSpec g_;
  double t0_;
  double dt_;
  std::vector<Field> levels_;
};

/// Free part minus the source contribution: the representation of a solution
/// of box phi = N(phi) given its own history.
inline double representation_value(const PointQuery& q, const LinearData& data,
                                   const SnapshotField& history, const Nonlinearity& nl) {
  const double free = linear_point_value(q, data);
  if (!nl.enabled) return free;
  const double d = duhamel_point_value(
      q, [&](double s, double y1, double y2) { return nl.force(history(s, y1, y2)); });
  return free - d / (2.0 * std::numbers::pi);
}

} // namespace decay2d
