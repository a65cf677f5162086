#include "dwlab/errors.hpp"
#include "dwlab/grid.hpp"
#include "dwlab/rate.hpp"

#include <doctest.h>

#include <cmath>

using namespace dwlab;

TEST_CASE("power preset") {
  const auto G3 = preset_power(3.0, 4.0);
  CHECK(G3(2.0) == doctest::Approx(8.0));
  const auto F1 = make_F(preset_power(1.0, 4.0));
  CHECK(F1(2.0) == doctest::Approx(8.0));
  CHECK(F1.increasing());

  const auto dec = preset_power(-1.0, 1.0);
  CHECK(dec.monotonicity() == Monotonicity::decreasing);
  CHECK_THROWS_AS(require_increasing(dec, "test"), InvalidArgument);

  for (double p : {-0.5, -0.25, 0.0}) CHECK_THROWS_AS(preset_power(p), InvalidArgument);
  CHECK_THROWS_AS(preset_power(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(G3(5.0), RangeError);
  CHECK_THROWS_AS(G3(0.0), RangeError);
}

TEST_CASE("exp preset") {
  const auto G = preset_exp(1.0);
  CHECK(G(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  // Toward zero the values fall monotonically to zero.
  double prev = G(1.0);
  for (int i = 1; i <= 30; ++i) {
    const double x = std::pow(0.8, i);
    const double v = G(x);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(G(1e-3) < 1e-300);
  CHECK(inverse(G, G(0.5)) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK_THROWS_AS(preset_exp(0.0), InvalidArgument);
  CHECK_THROWS_AS(preset_exp(-1.0), InvalidArgument);
}

TEST_CASE("F for the exp preset at one half") {
  // x G(x)^2 = 0.5 * (e^-2)^2 / 0.5 = e^-4.
  const auto F = make_F(preset_exp(1.0));
  CHECK(F(0.5) == doctest::Approx(std::exp(-4.0)).epsilon(1e-14));
}

TEST_CASE("F of a constant rate is the identity map") {
  const RateFunction one("const", {}, [](double) { return 1.0; }, 2.0, Monotonicity::unchecked);
  const auto F = make_F(one);
  CHECK(F.increasing());
  for (double x : log_space(1e-3, 2.0, 20)) CHECK(F(x) == doctest::Approx(x).epsilon(1e-15));
}

TEST_CASE("definition identity F(x)/x = G(x)^2") {
  for (const auto& G : {preset_power(0.5, 3.0), preset_power(2.0), preset_exp(2.0)}) {
    const auto F = make_F(G);
    for (double x : log_space(0.05, G.x_max(), 50)) CHECK(F(x) / x == doctest::Approx(G(x) * G(x)).epsilon(1e-15));
  }
}

TEST_CASE("inverse examples") {
  const auto cube = preset_power(3.0, 4.0);
  CHECK(inverse(cube, 8.0) == doctest::Approx(2.0).epsilon(1e-14));
  const auto G = preset_exp(1.0);
  CHECK(inverse(G, G(0.25)) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK_THROWS_AS(inverse(cube, 65.0), RangeError);
  CHECK_THROWS_AS(inverse(cube, -1.0), RangeError);
  try {
    inverse(cube, 100.0);
  } catch (const RangeError& e) {
    CHECK(e.hi() == doctest::Approx(64.0));
  }
}

TEST_CASE("inverse meets the residual tolerance") {
  const auto G = preset_exp(0.5);
  for (double y : log_space(1e-6, G(1.0), 40)) {
    const double x = inverse(G, y);
    CHECK(std::abs(G(x) - y) <= 1e-12 * std::max(1.0, std::abs(y)));
  }
}

TEST_CASE("round trips on log grids") {
  for (const auto& f : {preset_power(0.5), preset_power(1.0), preset_power(2.0), preset_exp(1.0), preset_exp(2.0),
                        make_F(preset_power(1.0)), make_F(preset_exp(1.0))}) {
    for (double x : log_space(f.check_floor() > 0 ? f.check_floor() : 1e-6, f.x_max(), 256)) {
      const double y = f(x);
      if (!(y > 0.0)) continue;
      CHECK(std::abs(inverse(f, y) - x) <= 1e-10 * x);
    }
  }
}

TEST_CASE("bisection agrees with closed-form power inverses") {
  for (double p : {0.5, 1.0, 2.0, 3.0}) {
    const auto G = preset_power(p, 1.0);
    for (double y : log_space(1e-8, 1.0, 64)) CHECK(inverse(G, y) == doctest::Approx(std::pow(y, 1.0 / p)).epsilon(1e-10));
    const auto F = make_F(G);
    for (double y : log_space(1e-8, 1.0, 64))
      CHECK(inverse(F, y) == doctest::Approx(std::pow(y, 1.0 / (2.0 * p + 1.0))).epsilon(1e-10));
  }
}

TEST_CASE("decreasing rates invert too") {
  const auto G = preset_power(-2.0, 1.0);
  for (double x : log_space(1e-3, 1.0, 30)) CHECK(inverse(G, G(x)) == doctest::Approx(x).epsilon(1e-10));
}

TEST_CASE("tabulated rates") {
  const auto G = tabulated_rate({{0.1, 0.01}, {0.5, 0.2}, {1.0, 1.0}});
  CHECK(G.increasing());
  CHECK(G(0.3) == doctest::Approx(0.01 + 0.19 * 0.5));
  CHECK(inverse(G, 0.6) == doctest::Approx(0.75));
  CHECK_THROWS_AS(tabulated_rate({{0.1, 1.0}, {0.2, 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(tabulated_rate({{0.1, 1.0}, {0.2, 2.0}, {0.3, 1.5}}), InvalidArgument);
  CHECK_THROWS_AS(tabulated_rate({{0.2, 1.0}, {0.1, 2.0}}), InvalidArgument);
  CHECK_THROWS_AS(tabulated_rate({{0.1, 1.0}}), InvalidArgument);
}

TEST_CASE("x F^-1(1/x) monotonicity") {
  for (double p : {0.5, 1.0, 2.0}) {
    const auto G = preset_power(p, 1e3);
    const auto rep = xFinv_profile(G, log_space(1e-3, 1e3, 200));
    CHECK(rep.increasing);
    CHECK(rep.evaluated > 0);
    // Closed form x^(1 - 1/(2p+1)).
    const auto F = make_F(G);
    for (double x : {0.01, 1.0, 100.0})
      CHECK(x * inverse(F, 1.0 / x) == doctest::Approx(std::pow(x, 1.0 - 1.0 / (2.0 * p + 1.0))).epsilon(1e-10));
  }
  const auto e = xFinv_profile(preset_exp(1.0), log_space(1e-3, 1e3, 200));
  MESSAGE("exp(1) on [1e-3, 1e3]: increasing=" << e.increasing << " evaluated=" << e.evaluated
                                                << " skipped=" << e.skipped);
  CHECK(e.increasing);
  CHECK(check_xFinv_increasing(preset_power(1.0), {0.5}));

  // A decreasing G with increasing F breaks the property.
  const RateFunction quarter("power", {{"p", -0.25}}, [](double x) { return std::pow(x, -0.25); }, 1.0,
                             Monotonicity::decreasing);
  const auto bad = xFinv_profile(quarter, log_space(1e-3, 1e6, 256));
  CHECK_FALSE(bad.increasing);
  CHECK(bad.first_violation.has_value());
}

TEST_CASE("G^-1 below F^-1 near zero") {
  for (const auto& G : {preset_power(0.5), preset_power(1.0), preset_power(2.0), preset_exp(1.0)}) {
    const auto F = make_F(G);
    std::size_t checked = 0;
    for (double y : log_space(1e-12, 1e-2, 60)) {
      if (!G.in_range(y) || !F.in_range(y)) continue;
      ++checked;
      CHECK(inverse(G, y) <= inverse(F, y) * (1.0 + 1e-12));
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("nonlinear G") {
  const auto G = preset_power(1.0, 1.0);
  for (double h : {0.2, 0.5, 0.9}) CHECK(nonlinear_G(h, 1.0, 1.0, G) == doctest::Approx(std::pow(h, 27.0)).epsilon(1e-13));
  CHECK(nonlinear_G(1.0, 3.5, 2.0, G) == doctest::Approx(3.5));
  const auto NG = make_nonlinear_G(2.0, 1.0, G);
  CHECK(NG.increasing());
  double prev = 0.0;
  for (double h : log_space(0.01, 1.0, 100)) {
    CHECK(NG(h) > prev);
    prev = NG(h);
  }
  CHECK_THROWS_AS(nonlinear_G(0.0, 1.0, 1.0, G), InvalidArgument);
}

TEST_CASE("power exponents") {
  const auto e = nonlinear_power_exponents(1.0, 1.0);
  CHECK(e.quoted == 20.0);
  CHECK(e.composed == 27.0);
  const auto e2 = nonlinear_power_exponents(2.0, 3.0);
  CHECK(e2.quoted == 11.0 * 7.0 - 1.0);
  CHECK(e2.composed == 7.0 + 16.0 * 5.0);
}

TEST_CASE("dilation condition") {
  const auto grid = log_space(1e-8, 1.0, 100);
  // G = x^q: G^-1(x) = x^(1/q), so the condition is (c0+1)^(1/q) <= (c+1)/c.
  for (double q : {1.0, 2.0, 5.0})
    for (double c0 : {0.1, 1.0, 3.0})
      for (double c : {0.5, 1.0, 4.0}) {
        const bool expected = std::pow(c0 + 1.0, 1.0 / q) <= (c + 1.0) / c;
        CHECK(check_G_dilation_condition(preset_power(q, 1.0), c0, c, grid) == expected);
      }
  CHECK(check_G_dilation_condition(preset_power(1.0), 0.0, 1.0, grid));
  CHECK_FALSE(check_G_dilation_condition(preset_power(1.0), 1e6, 0.1, grid));
}
