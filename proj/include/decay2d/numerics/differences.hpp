#pragma once

#include <cstddef>

#include "decay2d/grid.hpp"

namespace decay2d::numerics {

enum class Axis { x1, x2 };

namespace detail {

// Sample of f at offset k along the axis from node (i, j); periodic wraps.
inline double along(const Field& f, const GridSpec& g, Axis a, std::size_t i, std::size_t j,
                    long k) {
  if (a == Axis::x1) {
    const long ii = static_cast<long>(i) + k;
    return f(g.periodic() ? wrap_index(ii, g.n) : static_cast<std::size_t>(ii), j);
  }
  const long jj = static_cast<long>(j) + k;
  return f(i, g.periodic() ? wrap_index(jj, g.n) : static_cast<std::size_t>(jj));
}

} // namespace detail

/// Centered first difference; second-order one-sided stencils at Dirichlet
/// boundaries.
inline Field first_difference(const Field& f, const GridSpec& g, Axis a) {
  Field out(g.n);
  const std::size_t n = g.n;
  const double inv2h = 0.5 / g.h;
  parallel_for(0, n, [&](std::size_t j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pos = a == Axis::x1 ? i : j;
      double d;
      if (g.periodic() || (pos > 0 && pos < n - 1)) {
        d = (detail::along(f, g, a, i, j, 1) - detail::along(f, g, a, i, j, -1)) * inv2h;
      } else if (pos == 0) {
        d = (-3.0 * f(i, j) + 4.0 * detail::along(f, g, a, i, j, 1) -
             detail::along(f, g, a, i, j, 2)) *
            inv2h;
      } else {
        d = (3.0 * f(i, j) - 4.0 * detail::along(f, g, a, i, j, -1) +
             detail::along(f, g, a, i, j, -2)) *
            inv2h;
      }
      out(i, j) = d;
    }
  });
  return out;
}

/// Centered second difference along one axis; one-sided four-point stencil at
/// Dirichlet boundaries.
inline Field second_difference(const Field& f, const GridSpec& g, Axis a) {
  Field out(g.n);
  const std::size_t n = g.n;
  const double inv_h2 = 1.0 / (g.h * g.h);
  parallel_for(0, n, [&](std::size_t j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pos = a == Axis::x1 ? i : j;
      double d;
      if (g.periodic() || (pos > 0 && pos < n - 1)) {
        d = detail::along(f, g, a, i, j, 1) - 2.0 * f(i, j) + detail::along(f, g, a, i, j, -1);
      } else if (pos == 0) {
        d = 2.0 * f(i, j) - 5.0 * detail::along(f, g, a, i, j, 1) +
            4.0 * detail::along(f, g, a, i, j, 2) - detail::along(f, g, a, i, j, 3);
      } else {
        d = 2.0 * f(i, j) - 5.0 * detail::along(f, g, a, i, j, -1) +
            4.0 * detail::along(f, g, a, i, j, -2) - detail::along(f, g, a, i, j, -3);
      }
      out(i, j) = d * inv_h2;
    }
  });
  return out;
}

struct Gradient {
  Field d1;
  Field d2;
};

inline Gradient gradient(const Field& f, const GridSpec& g) {
  return {first_difference(f, g, Axis::x1), first_difference(f, g, Axis::x2)};
}

struct Hessian {
  Field d11;
  Field d12;
  Field d22;
};

inline Hessian hessian(const Field& f, const GridSpec& g) {
  Field d1 = first_difference(f, g, Axis::x1);
  return {second_difference(f, g, Axis::x1), first_difference(d1, g, Axis::x2),
          second_difference(f, g, Axis::x2)};
}

/// Five-point Laplacian; Dirichlet boundary nodes get 0 (they are held fixed).
inline void laplacian_into(const Field& f, const GridSpec& g, Field& out) {
  const std::size_t n = g.n;
  const double inv_h2 = 1.0 / (g.h * g.h);
  if (g.periodic()) {
    const std::size_t m = n - 1;
    parallel_for(0, m, [&](std::size_t j) {
      const std::size_t jp = j + 1 == m ? 0 : j + 1;
      const std::size_t jm = j == 0 ? m - 1 : j - 1;
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t ip = i + 1 == m ? 0 : i + 1;
        const std::size_t im = i == 0 ? m - 1 : i - 1;
        out(i, j) = (f(ip, j) + f(im, j) + f(i, jp) + f(i, jm) - 4.0 * f(i, j)) * inv_h2;
      }
    });
    for (std::size_t k = 0; k < n; ++k) {
      out(n - 1, k % m) = out(0, k % m);
      out(k % m, n - 1) = out(k % m, 0);
    }
    out(n - 1, n - 1) = out(0, 0);
    return;
  }
  parallel_for(0, n, [&](std::size_t j) {
    if (j == 0 || j == n - 1) {
      for (std::size_t i = 0; i < n; ++i) out(i, j) = 0.0;
      return;
    }
    out(0, j) = 0.0;
    out(n - 1, j) = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i)
      out(i, j) = (f(i + 1, j) + f(i - 1, j) + f(i, j + 1) + f(i, j - 1) - 4.0 * f(i, j)) * inv_h2;
  });
}

} // namespace decay2d::numerics
