#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "decay2d/grid.hpp"
#include "decay2d/numerics/differences.hpp"
#include "decay2d/numerics/fft.hpp"
#include "decay2d/numerics/interpolation.hpp"
#include "decay2d/numerics/quadrature.hpp"
#include "decay2d/numerics/summation.hpp"

using namespace decay2d;
using namespace decay2d::numerics;
using Catch::Approx;

namespace {

Field sample(const GridSpec& g, auto fn) {
  Field f(g.n);
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) f(i, j) = fn(g.coord(i), g.coord(j));
  return f;
}

double max_error(const GridSpec& g, const Field& f, auto exact) {
  double e = 0.0;
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i)
      e = std::max(e, std::abs(f(i, j) - exact(g.coord(i), g.coord(j))));
  return e;
}

} // namespace

TEST_CASE("pairwise sum matches exact sums") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == Approx(100.0).epsilon(1e-14));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("differences converge at second order including boundary stencils") {
  auto f = [](double x, double y) { return std::sin(x) * std::cos(0.5 * y) + x * x * y; };
  auto fx = [](double x, double y) { return std::cos(x) * std::cos(0.5 * y) + 2.0 * x * y; };
  auto fyy = [](double x, double y) { return -0.25 * std::sin(x) * std::cos(0.5 * y); };
  auto fxy = [](double x, double y) { return -0.5 * std::cos(x) * std::sin(0.5 * y) + 2.0 * x; };
  double prev_d1 = 0, prev_d22 = 0, prev_d12 = 0;
  for (std::size_t n : {33u, 65u, 129u}) {
    const auto g = make_grid(2.0, n);
    const Field s = sample(g, f);
    const double e1 = max_error(g, first_difference(s, g, Axis::x1), fx);
    const double e22 = max_error(g, second_difference(s, g, Axis::x2), fyy);
    const double e12 = max_error(g, hessian(s, g).d12, fxy);
    if (prev_d1 > 0) {
      CHECK(prev_d1 / e1 == Approx(4.0).margin(0.6));
      CHECK(prev_d22 / e22 == Approx(4.0).margin(0.6));
      CHECK(prev_d12 / e12 == Approx(4.0).margin(0.6));
    }
    prev_d1 = e1;
    prev_d22 = e22;
    prev_d12 = e12;
  }
}

TEST_CASE("periodic laplacian has the discrete symbol on Fourier modes") {
  const auto g = make_grid(std::numbers::pi, 33, BoundaryKind::periodic);
  const Field s = sample(g, [](double x, double y) { return std::cos(2.0 * x + 3.0 * y); });
  Field lap(g.n);
  laplacian_into(s, g, lap);
  const double sym = -4.0 / (g.h * g.h) *
                     (std::pow(std::sin(g.h), 2) + std::pow(std::sin(1.5 * g.h), 2));
  double err = 0;
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) err = std::max(err, std::abs(lap(i, j) - sym * s(i, j)));
  CHECK(err < 1e-11);
}

TEST_CASE("dirichlet laplacian vanishes on the boundary and is exact on quadratics") {
  const auto g = make_grid(1.0, 9);
  const Field s = sample(g, [](double x, double y) { return x * x + 3.0 * y * y; });
  Field lap(g.n);
  laplacian_into(s, g, lap);
  CHECK(lap(0, 4) == 0.0);
  CHECK(lap(4, 8) == 0.0);
  CHECK(lap(4, 4) == Approx(8.0).epsilon(1e-12));
  CHECK(lap(2, 6) == Approx(8.0).epsilon(1e-12));
}

TEST_CASE("adaptive Simpson") {
  auto r = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-12);
  CHECK(r.value == Approx(2.0).epsilon(1e-11));
  CHECK(r.converged);
  // integrable endpoint singularity
  auto s = adaptive_simpson([](double x) { return x == 0.0 ? 0.0 : 1.0 / std::sqrt(x); }, 0.0, 1.0,
                            1e-8, 60);
  CHECK(s.value == Approx(2.0).epsilon(1e-6));
  auto pieces = adaptive_simpson_pieces([](double x) { return std::exp(x); },
                                        {0.0, 0.5, 1.0, 3.0}, 1e-12);
  CHECK(pieces.value == Approx(std::exp(3.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (std::size_t n : {1u, 2u, 5u, 16u, 31u}) {
    const auto r = gauss_legendre(n);
    double wsum = 0, poly = 0;
    const int deg = static_cast<int>(2 * n - 1);
    for (std::size_t k = 0; k < n; ++k) {
      wsum += r.weights[k];
      poly += r.weights[k] * (std::pow(r.nodes[k], deg - 1) + std::pow(r.nodes[k], deg));
    }
    CHECK(wsum == Approx(2.0).epsilon(1e-14));
    CHECK(poly == Approx(2.0 / deg).epsilon(1e-12));
  }
  const auto c = gauss_rule_with_points(0.0, 2.0, 40);
  double v = 0;
  for (std::size_t k = 0; k < c.nodes.size(); ++k) v += c.weights[k] * std::exp(-c.nodes[k]);
  CHECK(v == Approx(1.0 - std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("cubic weights reproduce cubics and their slopes") {
  auto p = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x - 0.25 * x * x * x; };
  auto dp = [](double x) { return -2.0 + x - 0.75 * x * x; };
  for (double s : {0.0, 0.25, 0.5, 0.9}) {
    const auto w = cubic_weights(s);
    double v = 0, d = 0;
    for (int k = 0; k < 4; ++k) {
      v += w.value[k] * p(k - 1.0);
      d += w.slope[k] * p(k - 1.0);
    }
    CHECK(v == Approx(p(s)).epsilon(1e-14));
    CHECK(d == Approx(dp(s)).epsilon(1e-13));
  }
}

TEST_CASE("bicubic interpolation is exact for bicubic polynomials and refuses the rim") {
  const auto g = make_grid(2.0, 17);
  auto f = [](double x, double y) { return x * x * x * y - 2.0 * y * y + x; };
  const Field s = sample(g, f);
  CHECK(*bicubic(s, g, 0.31, -0.77) == Approx(f(0.31, -0.77)).epsilon(1e-13));
  CHECK(*bicubic(s, g, 1.5, 1.5) == Approx(f(1.5, 1.5)).epsilon(1e-13));
  CHECK_FALSE(bicubic(s, g, 1.95, 0.0).has_value());
  const auto p = make_grid(std::numbers::pi, 65, BoundaryKind::periodic);
  const Field c = sample(p, [](double x, double) { return std::cos(x); });
  CHECK(*bicubic(c, p, 3.1, 0.0) == Approx(std::cos(3.1)).margin(1e-5));
}

TEST_CASE("real FFTs") {
  std::vector<double> v(12);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::cos(2.0 * std::numbers::pi * 3.0 * k / 12.0);
  const auto s = real_fft(v);
  CHECK(s.size() == 7);
  CHECK(s[3].real() == Approx(6.0).epsilon(1e-13));
  CHECK(std::abs(s[2]) < 1e-12);

  RealFft2d fft(8);
  for (std::size_t k = 0; k < 64; ++k) fft.real()[k] = std::sin(0.3 * k) + 0.1 * k;
  std::vector<double> orig(fft.real().begin(), fft.real().end());
  fft.forward();
  fft.backward();
  for (std::size_t k = 0; k < 64; ++k) CHECK(fft.real()[k] / 64.0 == Approx(orig[k]).margin(1e-13));
}
