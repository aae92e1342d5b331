#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>

#include "decay2d/grid.hpp"

namespace decay2d::numerics {

/// Four-point cubic Lagrange weights for nodes at -1, 0, 1, 2 evaluated at
/// fractional offset s in [0, 1), plus the weights of the derivative (d/ds).
struct CubicWeights {
  std::array<double, 4> value;
  std::array<double, 4> slope;
};

inline CubicWeights cubic_weights(double s) {
  const double sm1 = s - 1.0, sm2 = s - 2.0, sp1 = s + 1.0;
  CubicWeights w;
  w.value = {-s * sm1 * sm2 / 6.0, sp1 * sm1 * sm2 / 2.0, -sp1 * s * sm2 / 2.0,
             sp1 * s * sm1 / 6.0};
  w.slope = {-(3.0 * s * s - 6.0 * s + 2.0) / 6.0, (3.0 * s * s - 4.0 * s - 1.0) / 2.0,
             -(3.0 * s * s - 2.0 * s - 2.0) / 2.0, (3.0 * s * s - 1.0) / 6.0};
  return w;
}

/// Locates coordinate x on the grid axis: base node k (the "0" node of the
/// stencil) and offset s. Returns nullopt when the four-point stencil would
/// leave a non-periodic grid.
struct AxisLocation {
  long base;
  double offset;
};

inline std::optional<AxisLocation> locate(const GridSpec& g, double x) {
  const double u = (x + g.half_width) / g.h;
  long k = static_cast<long>(std::floor(u));
  double s = u - static_cast<double>(k);
  if (!g.periodic()) {
    const long n = static_cast<long>(g.n);
    if (k == n - 1 && s == 0.0) {
      k = n - 2;
      s = 1.0;
    }
    if (k - 1 < 0 || k + 2 > n - 1) return std::nullopt;
  }
  return AxisLocation{k, s};
}

inline std::size_t stencil_index(const GridSpec& g, long k) {
  return g.periodic() ? wrap_index(k, g.n) : static_cast<std::size_t>(k);
}

/// Tensor-product (bicubic Lagrange) interpolation of f at (x1, x2).
inline std::optional<double> bicubic(const Field& f, const GridSpec& g, double x1, double x2) {
  const auto a = locate(g, x1);
  const auto b = locate(g, x2);
  if (!a || !b) return std::nullopt;
  const auto wa = cubic_weights(a->offset);
  const auto wb = cubic_weights(b->offset);
  double acc = 0.0;
  for (int q = 0; q < 4; ++q) {
    const std::size_t j = stencil_index(g, b->base - 1 + q);
    double row = 0.0;
    for (int p = 0; p < 4; ++p) row += wa.value[p] * f(stencil_index(g, a->base - 1 + p), j);
    acc += wb.value[q] * row;
  }
  return acc;
}

} // namespace decay2d::numerics
