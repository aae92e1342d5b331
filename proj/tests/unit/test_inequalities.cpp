#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "decay2d/core.hpp"
#include "decay2d/inequalities.hpp"
#include "decay2d/numerics/quadrature.hpp"

using namespace decay2d;
using Catch::Approx;

namespace {

Field sample(const GridSpec& g, auto fn) {
  Field f(g.n);
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) f(i, j) = fn(g.coord(i), g.coord(j));
  return f;
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double bump1d(double r, double c, double w) {
  const double z = (r - c) / w;
  if (std::abs(z) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - z * z));
}

SampledRadial sample_radial(double r_max, double h, auto fn) {
  SampledRadial s;
  s.h = h;
  const auto m = static_cast<std::size_t>(std::llround(r_max / h));
  for (std::size_t k = 0; k <= m; ++k) s.g.push_back(fn(s.r(k)));
  return s;
}

} // namespace

TEST_CASE("norm bundle basics") {
  const auto g = make_grid(4.0, 81);
  const Field zero(g.n);
  for (Region r : {Region::plane, Region::inner_ball, Region::outer, Region::annulus}) {
    const auto b = norm_bundle(zero, g, r);
    CHECK(b.sup_norm == 0.0);
    CHECK(b.h1 == 0.0);
    CHECK(b.h2 == 0.0);
    CHECK(b.angular == 0.0);
    CHECK_THROWS_AS(bgw_check(zero, g, r), DegenerateInput);
  }
  const auto bump = smooth_bump(1.0, 2.0, {0.3, -0.2});
  const auto u = sample(g, [&](double x, double y) { return bump.value(x, y); });
  const auto b = norm_bundle(u, g, Region::plane);
  CHECK(b.l2 < b.h1);
  CHECK(b.h1 < b.h2);
  CHECK(b.angular >= b.l2);
  CHECK(b.sup_norm == Approx(bump.value(0.3, -0.2)).epsilon(1e-2));
  for (Region r : {Region::plane, Region::inner_ball, Region::outer, Region::annulus}) {
    const double ratio = bgw_check(u, g, r);
    CHECK(std::isfinite(ratio));
    CHECK(ratio > 0.0);
  }
}

TEST_CASE("norm bundle on a periodic mode matches the discrete symbol") {
  const double L = std::numbers::pi;
  const auto g = make_grid(L, 65, BoundaryKind::periodic);
  const double k = 3.0;
  const auto u = sample(g, [&](double x, double) { return std::cos(k * x); });
  const auto b = norm_bundle(u, g, Region::plane);
  const double kh = std::sin(k * g.h) / g.h;
  CHECK(b.h1 * b.h1 == Approx(b.l2 * b.l2 * (1.0 + kh * kh)).epsilon(1e-12));
  CHECK(b.l2 * b.l2 == Approx(2.0 * L * L).epsilon(1e-12));
}

TEST_CASE("empty region is rejected") {
  const auto g = make_grid(0.5, 3);
  const Field u(g.n, 1.0);
  CHECK_THROWS_AS(norm_bundle(u, g, Region::outer), InvalidArgument);
  CHECK_NOTHROW(norm_bundle(u, g, Region::inner_ball));
}

TEST_CASE("bgw ratios: amplitude invariance and dilation bookkeeping") {
  const auto g = make_grid(6.0, 481);
  auto gauss = [](double mu) {
    return [mu](double x, double y) {
      return std::exp(-mu * mu * ((x - 0.4) * (x - 0.4) + y * y)) * (1.0 + 0.3 * x);
    };
  };
  const auto u = sample(g, gauss(1.0));
  Field u7 = u;
  for (double& v : u7.data()) v *= 7.0;
  for (Region r : {Region::plane, Region::inner_ball, Region::outer, Region::annulus})
    CHECK(bgw_check(u7, g, r) == Approx(bgw_check(u, g, r)).epsilon(1e-12));

  // Dilation changes the ratio, by the amount the homogeneities predict.
  const auto base = norm_bundle(u, g, Region::plane);
  const auto direct = norm_bundle(sample(g, gauss(2.5)), g, Region::plane);
  const auto predicted = bundle_from_parts(dilate_parts(base.parts, 2.5), Region::plane);
  CHECK(bgw_ratio(direct) == Approx(bgw_ratio(predicted)).epsilon(5e-3));
  CHECK(std::abs(bgw_ratio(direct) - bgw_ratio(base)) > 1e-3 * bgw_ratio(base));
}

TEST_CASE("log cone family") {
  // Hand computation: ||grad u||^2 = (2 pi / ln lambda) int_0^1 S'(z)^2 dz and
  // int_0^1 (30 z^2 (1-z)^2)^2 dz = 900 B(5,5) = 10/7.
  for (double lambda : {1e2, 1e3, 1e4}) {
    const auto rn = log_cone_norms(lambda);
    CHECK(rn.grad_sq == Approx(2.0 * std::numbers::pi / std::log(lambda) * 10.0 / 7.0).epsilon(1e-9));
    CHECK(rn.l2_sq < 0.2 * rn.grad_sq);
  }
  std::vector<double> scaled;
  for (double lambda : {1e2, 1e3, 1e4}) {
    const auto res = log_cone_ratio(lambda);
    scaled.push_back(res.sup_over_h1 / std::sqrt(std::log(lambda)));
    CHECK(std::isfinite(res.bgw_ratio));
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  CHECK(*hi / *lo <= 1.2);
  // Leading asymptotics sqrt(7 ln(lambda) / (20 pi)).
  CHECK(scaled.back() == Approx(std::sqrt(7.0 / (20.0 * std::numbers::pi))).epsilon(0.05));
}

TEST_CASE("F(A): special values and the two quadratures") {
  CHECK(F_of_A(-2.0).value == 0.0);
  CHECK(F_of_A(-1.0).value == 0.0);
  CHECK(F_of_A(1.0).divergent);
  // F(0) = 2 int_0^{pi/2} cos^{-1/2} = B(1/4, 1/2)
  const double beta = std::tgamma(0.25) * std::tgamma(0.5) / std::tgamma(0.75);
  CHECK(F_of_A(0.0).value == Approx(beta).epsilon(1e-11));
  CHECK(std::abs(F_of_A(0.0).value - F_of_A_theta(0.0).value) <= 1e-10);
  for (double A : {-0.9, -0.5, 0.3, 0.7, 0.99, 1.5, 3.0, 50.0})
    CHECK(std::abs(F_of_A(A).value - F_of_A_theta(A).value) <= 1e-10 * F_of_A(A).value);
  const double big = F_of_A(1e4).value * 1e2;
  CHECK(std::abs(big / (2.0 * std::numbers::pi) - 1.0) <= 1e-2);
}

TEST_CASE("F(A): monotonicity and bounds") {
  // Increasing on (-1, 1) towards the divergence at A = 1, decreasing on
  // (1, inf).
  double prev = F_of_A(-0.999).value;
  for (double A = -0.99; A < 0.999; A += 0.01) {
    const double v = F_of_A(A).value;
    CHECK(v > prev);
    prev = v;
    if (A <= 0.0) CHECK(v <= 2.0 * std::numbers::pi);
  }
  prev = F_of_A(1.0 + 1e-6).value;
  for (double A = 1.01; A < 1e3; A *= 1.5) {
    const double v = F_of_A(A).value;
    CHECK(v < prev);
    CHECK(v >= 0.0);
    prev = v;
  }
  const auto As = log_spaced_around_one(200, 1e-8, 1e-1);
  const auto rep = F_bound_check(As);
  CHECK(rep.points == 200);
  CHECK(rep.all_converged);
  CHECK(rep.max_ratio <= F_bound_constant());
  CHECK(F_bound_check({-5.0, -2.0, -1.0}).max_ratio == 0.0);
  CHECK_THROWS_AS(F_bound_check({1.0}), InvalidArgument);
}

TEST_CASE("log integral: trivial cases and errors") {
  const auto zero = sample_radial(5.0, 0.01, [](double) { return 0.0; });
  const auto z = log_integral_check(zero, 1.0, 2.0);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs_integral == 0.0);
  CHECK(z.rhs_sup == 0.0);
  auto neg = zero;
  neg.g[10] = -1e-3;
  CHECK_THROWS_AS(log_integral_check(neg, 1.0, 2.0), InvalidArgument);
}

TEST_CASE("log integral: far singular point against a direct quadrature") {
  auto g = [](double r) { return bump1d(r, 11.0, 1.0); };
  const auto data = sample_radial(13.0, 1e-3, g);
  const auto res = log_integral_check(data, 1.0, 100.0);
  const auto oracle = numerics::adaptive_simpson(
      [&](double r) { return g(r) * (1.0 + std::log1p(2.0 * r / (100.0 - r))); }, 10.0, 12.0, 1e-13);
  CHECK(res.lhs == Approx(oracle.value).epsilon(1e-6));
  const auto rhs = numerics::adaptive_simpson(
      [&](double r) { return g(r) * (1.0 + std::log1p(1.0 + r)); }, 10.0, 12.0, 1e-13);
  CHECK(res.rhs_integral == Approx(rhs.value).epsilon(1e-6));
  CHECK(res.rhs_sup == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("log integral: singular point inside the support") {
  // g = 1 on [0, 4] with x = 2: int_0^4 1 + ln(|x-r| + 2r) - ln|x-r| dr,
  // the last piece exact: -(2 ln 2 - 2) * 2.
  const auto data = sample_radial(4.0, 0.01, [](double) { return 1.0; });
  const auto res = log_integral_check(data, 1.0, 2.0);
  const auto smooth = numerics::adaptive_simpson_pieces(
      [](double r) { return 1.0 + std::log(std::abs(2.0 - r) + 2.0 * r); }, {0.0, 2.0, 4.0}, 1e-13);
  const double exact = smooth.value - 2.0 * (2.0 * std::log(2.0) - 2.0);
  CHECK(res.lhs == Approx(exact).epsilon(1e-10));
}

TEST_CASE("log integral: monotone in g and bounded empirical constant") {
  std::mt19937_64 rng(20240611);
  double worst = 0.0;
  for (int draw = 0; draw < 40; ++draw) {
    const double c1 = 20.0 * unit(rng), w1 = 0.2 + 3.0 * unit(rng);
    const double c2 = 20.0 * unit(rng), w2 = 0.2 + 3.0 * unit(rng);
    const double a2 = unit(rng);
    const double s = std::exp(std::log(1e-2) + unit(rng) * std::log(1e4));
    const double x = -5.0 + 35.0 * unit(rng);
    const auto g1 = sample_radial(25.0, 0.01, [&](double r) { return bump1d(r, c1, w1); });
    const auto g2 = sample_radial(25.0, 0.01,
                                  [&](double r) { return bump1d(r, c1, w1) + a2 * bump1d(r, c2, w2); });
    const auto r1 = log_integral_check(g1, s, x);
    const auto r2 = log_integral_check(g2, s, x);
    CHECK(r1.lhs <= r2.lhs);
    worst = std::max({worst, r1.ratio(), r2.ratio()});
  }
  CHECK(worst <= 2.5);
}
