#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decay2d/error.hpp"
#include "decay2d/numerics/parallel.hpp"
#include "decay2d/numerics/summation.hpp"

namespace decay2d {

enum class BoundaryKind { dirichlet_truncation, periodic };

inline std::string_view to_string(BoundaryKind b) {
  return b == BoundaryKind::periodic ? "periodic" : "dirichlet";
}

/// Uniform square grid on [-L, L]^2 with n nodes per axis (n odd, so the
/// origin is node (n-1)/2). For periodic grids node n-1 duplicates node 0.
struct GridSpec {
  double half_width = 1.0;
  std::size_t n = 3;
  double h = 1.0;
  BoundaryKind boundary = BoundaryKind::dirichlet_truncation;

  double coord(std::size_t i) const {
    // Exact at both ends: i = 0 gives -L, i = n-1 gives +L.
    if (i == n - 1) return half_width;
    return -half_width + static_cast<double>(i) * h;
  }
  std::size_t center() const { return (n - 1) / 2; }
  std::size_t size() const { return n * n; }
  bool periodic() const { return boundary == BoundaryKind::periodic; }
  /// Number of distinct nodes per axis (n-1 when periodic).
  std::size_t unique_points() const { return periodic() ? n - 1 : n; }

  /// One-dimensional trapezoid weight of node i (includes the factor h).
  double weight(std::size_t i) const {
    if (periodic()) return i == n - 1 ? 0.0 : h;
    return (i == 0 || i == n - 1) ? 0.5 * h : h;
  }
};

inline GridSpec make_grid(double half_width, std::size_t n,
                          BoundaryKind boundary = BoundaryKind::dirichlet_truncation) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw InvalidArgument("make_grid: half-width L must be positive, got " +
                          std::to_string(half_width));
  if (n < 3 || n % 2 == 0)
    throw InvalidArgument("make_grid: points per axis must be odd and >= 3, got " +
                          std::to_string(n));
  GridSpec g;
  g.half_width = half_width;
  g.n = n;
  g.h = 2.0 * half_width / static_cast<double>(n - 1);
  g.boundary = boundary;
  return g;
}

/// n x n samples, row-major with x1 (index i) contiguous: value(i, j) sits at
/// j * n + i where j indexes x2.
class Field {
public:
  Field() = default;
  explicit Field(std::size_t n, double fill = 0.0) : n_(n), v_(n * n, fill) {}

  std::size_t n() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return v_[j * n_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return v_[j * n_ + i]; }
  std::span<double> data() { return v_; }
  std::span<const double> data() const { return v_; }
  std::span<const double> row(std::size_t j) const {
    return std::span<const double>(v_).subspan(j * n_, n_);
  }
  std::span<double> row(std::size_t j) { return std::span<double>(v_).subspan(j * n_, n_); }

  bool operator==(const Field&) const = default;

private:
  std::size_t n_ = 0;
  std::vector<double> v_;
};

/// Tensor-product trapezoid of f(i, j) over the grid. Rows are reduced
/// independently (possibly in parallel) and then combined pairwise, so the
/// value is bit-identical for any worker count.
template <class Fn>
double integrate(const GridSpec& g, Fn&& f) {
  const std::size_t n = g.n;
  std::vector<double> rows(n, 0.0);
  numerics::parallel_for(0, n, [&](std::size_t j) {
    const double wj = g.weight(j);
    if (wj == 0.0) return;
    std::vector<double> buf(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double wi = g.weight(i);
      buf[i] = wi == 0.0 ? 0.0 : wi * f(i, j);
    }
    rows[j] = wj * numerics::pairwise_sum(buf);
  });
  return numerics::pairwise_sum(rows);
}

/// Periodic wrap of a (possibly out of range) node index onto [0, n-1).
inline std::size_t wrap_index(long k, std::size_t n) {
  const long m = static_cast<long>(n - 1);
  long r = k % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

inline bool all_finite(const Field& f) {
  for (double x : f.data())
    if (!std::isfinite(x)) return false;
  return true;
}

} // namespace decay2d
