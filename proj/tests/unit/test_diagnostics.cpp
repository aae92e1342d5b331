#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "decay2d/diagnostics.hpp"
#include "decay2d/numerics/quadrature.hpp"
#include "decay2d/solver.hpp"

using namespace decay2d;
using Catch::Approx;

namespace {

WaveState sample_fn(const GridSpec& g, double p, auto phi, auto pi, double t = 0.0) {
  WaveState s = zero_state(g, p, t);
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) {
      s.phi(i, j) = phi(g.coord(i), g.coord(j));
      s.pi(i, j) = pi(g.coord(i), g.coord(j));
    }
  return s;
}

auto zero_fn = [](double, double) { return 0.0; };

// Runs a Dirichlet bump problem and samples every `every` steps.
DiagnosticSeries run_series(const GridSpec& g, double p, double cfl, std::size_t steps,
                            std::size_t every, bool nonlinear = true) {
  const auto data = sample_initial_data({smooth_bump(1.0, 2.0), Profile{}}, g, p);
  Stepper st(g, make_scheme(SchemeKind::explicit_leapfrog, g, cfl), data, nonlinear);
  DiagnosticToggles on;
  on.h2 = false;
  DiagnosticSeries series;
  series.p = p;
  for (std::size_t k = 0;; ++k) {
    if (k % every == 0) series.records.push_back(evaluate_record(st.state(), g, on));
    if (k == steps) break;
    st.advance();
  }
  return series;
}

} // namespace

TEST_CASE("total energy: zero state and agreement with e00") {
  const auto g = make_grid(4.0, 81);
  CHECK(total_energy(zero_state(g, 3.0), g) == 0.0);
  const auto s = sample_initial_data({smooth_bump(1.0, 2.0, {0.2, 0.1}), smooth_bump(0.4, 1.0)}, g, 3.0);
  CHECK(total_energy(s, g) == initial_energies(s, g).e00);
  const auto rec = evaluate_record(s, g, DiagnosticToggles{});
  CHECK(rec.e_total == initial_energies(s, g).e00);
}

TEST_CASE("potential functionals") {
  const auto g = make_grid(4.0, 81);
  const auto z = potential_decay_functional(zero_state(g, 3.0), g);
  CHECK(z.weighted == 0.0);
  CHECK(z.plain == 0.0);

  auto s = sample_initial_data({smooth_bump(1.0, 2.0, {0.7, -0.3}), Profile{}}, g, 3.0);
  s.t = 2.5;
  const auto a = potential_decay_functional(s, g);
  CHECK(a.plain <= a.weighted);
  auto m = s;
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) m.phi(i, j) = s.phi(g.n - 1 - i, j);
  const auto b = potential_decay_functional(m, g);
  CHECK(b.weighted == Approx(a.weighted).epsilon(1e-12));
  CHECK(b.plain == Approx(a.plain).epsilon(1e-12));
}

TEST_CASE("conformal charge at t = 0 against the analytic gradient") {
  const auto g = make_grid(4.0, 801);
  const Profile b = smooth_bump(1.0, 2.0, {0.4, -0.3});
  const auto s = sample_initial_data({b, Profile{}}, g, 3.0);
  CHECK(conformal_charge(zero_state(g, 3.0), g) == 0.0);
  const double q = conformal_charge(s, g);
  // At t = 0 with phi1 = 0 only the rotation and scaling terms survive.
  const double direct = integrate(g, [&](std::size_t i, std::size_t j) {
    const double x1 = g.coord(i), x2 = g.coord(j);
    const auto gr = b.gradient(x1, x2);
    const double rot = x1 * gr[1] - x2 * gr[0];
    const double sc = x1 * gr[0] + x2 * gr[1] + b.value(x1, x2);
    return rot * rot + sc * sc;
  });
  CHECK(q == Approx(direct).epsilon(1e-3));
}

TEST_CASE("Q0 is conserved by free waves up to an O(h^2) drift") {
  auto drift = [](std::size_t n) {
    const auto g = make_grid(16.0, n);
    const std::size_t steps = (n - 1) / 4; // T = 8 at cfl 0.4 on L = 16
    const auto series = run_series(g, 3.0, 0.4, steps, steps / 10, false);
    const double q_start = series.records.front().q0;
    double worst = 0.0;
    for (const auto& r : series.records) worst = std::max(worst, std::abs(r.q0 - q_start) / q_start);
    return worst;
  };
  const double coarse = drift(321), fine = drift(641);
  INFO("free-wave Q0 drift " << coarse << " -> " << fine);
  CHECK(fine <= 1e-2);
  CHECK(coarse / fine >= 3.0);
}

TEST_CASE("conformal identity bookkeeping") {
  DiagnosticSeries zs;
  zs.p = 3.0;
  for (int k = 0; k <= 5; ++k) {
    DiagnosticRecord r;
    r.t = k;
    zs.records.push_back(r);
  }
  CHECK(conformal_identity_residual(zs, 0.0, 5.0) == 0.0);
  CHECK_THROWS_AS(conformal_identity_residual(zs, 0.0, 3.0), InvalidArgument);
  CHECK_THROWS_AS(conformal_identity_residual(zs, 0.0, 7.0), InvalidArgument);

  DiagnosticSeries s5 = zs;
  s5.p = 5.0;
  for (auto& r : s5.records) {
    r.q0 = 1.0 + r.t;
    r.conf_pot = 2.0;
    r.pot_plain = 3.0 + r.t;
  }
  const auto bal = conformal_balance(s5, 0.0, 5.0);
  CHECK(bal.bulk == 0.0);
  CHECK(bal.lhs == Approx(6.0 + 2.0 / 6.0 * 2.0));
}

TEST_CASE("p = 5 conformal quantity is conserved and converges at second order") {
  auto drift = [](std::size_t n) {
    const auto g = make_grid(12.0, n);
    const std::size_t steps = 5 * (n - 1) / 8; // T = 6 at cfl 0.4 on L = 12
    const auto series = run_series(g, 5.0, 0.4, steps, steps / 10);
    return conformal_identity_residual(series, 0.0, series.records.back().t);
  };
  const double coarse = drift(481), fine = drift(961);
  INFO("p=5 drift " << coarse << " -> " << fine);
  CHECK(fine <= 0.01);
  CHECK(coarse / fine >= 3.0);
  CHECK(coarse / fine <= 5.5);
}

TEST_CASE("null weighted energy at t = 0 against the direct formula") {
  const auto g = make_grid(4.0, 801);
  const double p = 3.0;
  const Profile b0 = smooth_bump(1.0, 2.0, {0.3, 0.2});
  const Profile b1 = smooth_bump(0.5, 1.0, {-0.5, 0.0});
  const auto s = sample_initial_data({b0, b1}, g, p);
  CHECK(null_weighted_energy(zero_state(g, p), g) == 0.0);
  const double q = 0.5 * (p - 1.0);
  const double direct = integrate(g, [&](std::size_t i, std::size_t j) {
    const double x1 = g.coord(i), x2 = g.coord(j);
    if (x1 > 0.0) return 0.0;
    const double u1 = 1.0 - x1;
    const auto gr = b0.gradient(x1, x2);
    const double v = b1.value(x1, x2), f = b0.value(x1, x2);
    const double a = x2 * (v + gr[0]) + u1 * gr[1];
    const double c = u1 * (v - gr[0]) + x2 * gr[1] + f;
    return std::pow(u1, q - 2.0) * (a * a + c * c + 0.5 * (x2 * x2 + u1 * u1) * std::pow(f, 4.0));
  });
  CHECK(null_weighted_energy(s, g) == Approx(direct).epsilon(1e-3));
}

TEST_CASE("weighted norms") {
  const auto g = make_grid(5.0, 801);
  const auto z = weighted_norm_suite(zero_state(g, 3.0), g);
  CHECK(z.angular == 0.0);
  CHECK(z.gradient == 0.0);
  CHECK(z.l2 == 0.0);
  CHECK(z.h2 == 0.0);

  auto b = [](double r) { return std::exp(-r * r); };
  const auto radial = sample_fn(g, 3.0, [&](double x, double y) { return b(std::hypot(x, y)); }, zero_fn);
  const auto wr = weighted_norm_suite(radial, g);
  CHECK(wr.angular <= 1e-4 * wr.gradient);

  // phi = x2 b(r): angular gradient is x1 b / r, so ||.||^2 = pi int b^2 r dr.
  const auto tilted =
      sample_fn(g, 3.0, [&](double x, double y) { return y * b(std::hypot(x, y)); }, zero_fn);
  const double oracle =
      std::numbers::pi *
      numerics::adaptive_simpson([&](double r) { return b(r) * b(r) * r; }, 0.0, 5.0, 1e-13).value;
  CHECK(weighted_norm_suite(tilted, g).angular == Approx(oracle).epsilon(1e-3));
  CHECK(wr.l2 <= wr.h2 * wr.h2);
}

TEST_CASE("sup profile") {
  const auto g = make_grid(5.0, 201);
  auto gfun = [](double r) { return std::exp(-r * r / 2.0); };
  const auto s = sample_fn(g, 3.0, [&](double x, double y) { return gfun(std::hypot(x, y)); }, zero_fn);
  const auto prof = sup_profile(s, g);
  const auto sn = sup_norms(s, g);
  double mx = 0.0;
  for (const auto& r : prof.rings) {
    mx = std::max(mx, r.phi_star);
    CHECK(r.phi_minus <= r.phi_star);
    CHECK(std::abs(r.phi_star - gfun(r.r)) <= g.h);
  }
  CHECK(mx == sn.sup_abs);

  auto c = sample_fn(g, 3.0, [](double, double) { return 0.3; }, zero_fn, 3.0);
  const auto cn = sup_norms(c, g);
  CHECK(cn.f == Approx(0.3 * 2.0).epsilon(1e-15));
}

TEST_CASE("angular functionals") {
  const auto g = make_grid(5.0, 201);
  const double p = 3.0;
  SECTION("constant field") {
    const auto s = sample_fn(g, p, [](double, double) { return 0.6; }, zero_fn);
    const auto prof = radial_profile(s, g);
    for (const auto& r : prof.rings) {
      if (!r.angular_valid) continue;
      CHECK(r.a1 == Approx(0.6).epsilon(1e-13));
      CHECK(r.a2 <= 1e-20);
      CHECK(r.a3 == Approx(2.0 * std::numbers::pi * std::pow(0.6, 4.0)).epsilon(1e-12));
    }
  }
  SECTION("first angular harmonic") {
    auto gr = [](double r) { return r * std::exp(-r * r); };
    const auto s = sample_fn(g, p, [&](double x, double y) { return x * std::exp(-(x * x + y * y)); }, zero_fn);
    const auto prof = radial_profile(s, g);
    const double wallis =
        numerics::adaptive_simpson_pieces(
            [&](double th) { return std::pow(std::abs(std::cos(th)), p + 1.0); },
            {0.0, 0.3, 1.9, 4.1, 2.0 * std::numbers::pi}, 1e-13)
            .value;
    std::size_t checked = 0;
    for (const auto& r : prof.rings) {
      if (!r.angular_valid || r.r == 0.0 || r.r > 3.0) continue;
      ++checked;
      const double v = gr(r.r);
      CHECK(std::abs(r.a1) <= 1e-6);
      CHECK(r.a2 == Approx(std::numbers::pi * v * v).epsilon(1e-3).margin(1e-9));
      CHECK(r.a3 == Approx(std::pow(v, p + 1.0) * wallis).epsilon(1e-3).margin(1e-9));
      CHECK(r.circle_min <= std::abs(r.a1) + 1e-3 * std::max(1.0, r.circle_max));
      CHECK(std::abs(r.a1) <= r.circle_max + 1e-3 * std::max(1.0, r.circle_max));
    }
    CHECK(checked > 20);
  }
}

TEST_CASE("ring inequality and phi* functional on an evolved field") {
  const auto g = make_grid(12.0, 241);
  const auto data = sample_initial_data({smooth_bump(1.0, 2.0, {0.5, 0.0}), Profile{}}, g, 3.0);
  Stepper st(g, make_scheme(SchemeKind::explicit_leapfrog, g), data);
  st.advance(100);
  const auto prof = radial_profile(st.state(), g);
  const auto stats = ring_inequality(prof);
  INFO("rings " << stats.checked << " worst excess " << stats.worst_relative_excess);
  CHECK(stats.fraction() >= 0.99);
  for (const auto& r : prof.rings) {
    if (!r.angular_valid) continue;
    CHECK(r.circle_min <= std::abs(r.a1) + 1e-3 * std::max(1.0, r.circle_max));
    CHECK(std::abs(r.a1) <= r.circle_max + 1e-3 * std::max(1.0, r.circle_max));
    CHECK(r.a2 >= 0.0);
    CHECK(r.a3 >= 0.0);
  }

  RadialProfile empty;
  CHECK(phi_star_functional(empty, 0.0, 3.0) == 0.0);
  RadialProfile zero = sup_profile(zero_state(g, 3.0), g);
  CHECK(phi_star_functional(zero, 0.0, 3.0) == 0.0);
  RadialProfile grown = prof;
  const double before = phi_star_functional(grown, 1.0, 3.0);
  RingSample extra;
  extra.r = grown.rings.back().r + g.h;
  extra.phi_star = 0.1;
  grown.rings.push_back(extra);
  CHECK(phi_star_functional(grown, 1.0, 3.0) > before);
}

TEST_CASE("spacetime accumulator") {
  SpacetimeAccumulator z(3.0, 0.5);
  const auto s0 = z.add(0.0, 0.0);
  CHECK(s0.s1 == 0.0);
  CHECK(s0.s2 == 0.0);
  CHECK_FALSE(s0.s1_bound_claimed);

  SpacetimeAccumulator one(5.0, 0.25);
  const auto s1 = one.add(2.0, 9.0);
  CHECK(s1.s1 == Approx(std::pow(0.25 * 2.0, 1.0 / 6.0)));
  CHECK(s1.s2 == Approx(std::pow(0.25 * 3.0, 1.0 / 5.0)));
  CHECK(s1.s1_bound_claimed);
  CHECK_THROWS_AS(SpacetimeAccumulator(3.0, 0.0), InvalidArgument);
}

TEST_CASE("decay-rate fits") {
  std::vector<double> t, a, c, w;
  for (int k = 0; k <= 60; ++k) {
    const double tk = 0.5 * k;
    t.push_back(tk);
    a.push_back(1.0 / (1.0 + tk));
    c.push_back(3.0);
    w.push_back((2.0 + std::sin(tk)) / (1.0 + tk));
  }
  CHECK(fit_decay_rate(t, a, 5.0, 30.0).alpha == Approx(-1.0).margin(1e-6));
  CHECK(fit_decay_rate(t, c, 5.0, 30.0).alpha == Approx(0.0).margin(1e-12));
  const auto f = fit_decay_rate(t, w, 5.0, 30.0);
  CHECK(f.alpha == Approx(-1.0).margin(0.1));
  CHECK(f.residual_rms > 0.0);
  CHECK(f.samples == 51);
  CHECK_THROWS_AS(fit_decay_rate(t, a, 5.0, 6.0), InvalidArgument);
  auto bad = a;
  bad[20] = 0.0;
  CHECK_THROWS_AS(fit_decay_rate(t, bad, 5.0, 30.0), InvalidArgument);
}

TEST_CASE("bootstrap right-hand side") {
  std::vector<double> t, zero, one;
  for (int k = 0; k <= 40; ++k) {
    t.push_back(0.25 * k);
    zero.push_back(0.0);
    one.push_back(1.0);
  }
  CHECK(bootstrap_rhs(t, zero, 4.0, 10.0) == 1.0);
  const double oracle =
      1.0 + numerics::adaptive_simpson(
                [](double s) { return (std::log1p(s) + 1.0) * std::pow(1.0 + s, -1.25); }, 0.0, 10.0,
                1e-13)
                .value;
  CHECK(std::abs(bootstrap_rhs(t, one, 4.0, 10.0) - oracle) <= 1e-8);
  CHECK_THROWS_AS(bootstrap_rhs(t, one, 3.0, 10.0), InvalidArgument);
}
