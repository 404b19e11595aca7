#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "kfrac/errors.hpp"
#include "kfrac/musielak.hpp"
#include "kfrac/quadrature.hpp"
#include "kfrac/random_functions.hpp"

using namespace kfrac;

namespace {

MusielakFunction custom_cubic(double length) {
  // phi_x(t) = t + (1 + x/T) t^3; growth ratio ranges over [2, 4).
  return MusielakFunction::custom(
      [length](double x, double s) { return 1.0 + (1.0 + x / length) * s * s; }, 2.0,
      4.0);
}

}  // namespace

TEST_CASE("phi_value closed forms") {
  auto p2 = MusielakFunction::constant_power(2.0);
  auto p3 = MusielakFunction::constant_power(3.0);
  CHECK(p2.phi_value(0.3, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p2.phi_value(0.0, 0.0) == 0.0);
  CHECK(p3.phi_value(0.7, 2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  CHECK(p3.phi_value(0.7, -2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(p2.phi_value(0.0, std::nan("")), DomainError);
}

TEST_CASE("phi_value quadrature path matches closed form") {
  // A custom kernel that reproduces the p = 3 power family.
  auto mf = MusielakFunction::custom([](double, double s) { return s; }, 3.0, 3.0);
  for (double t : {0.25, 1.0, 2.0, 7.5}) {
    CHECK(mf.phi_value(0.1, t) ==
          doctest::Approx(std::pow(t, 3.0) / 3.0).epsilon(1e-11));
  }
}

TEST_CASE("conjugate closed forms") {
  auto p2 = MusielakFunction::constant_power(2.0);
  auto p3 = MusielakFunction::constant_power(3.0);
  CHECK(p2.conjugate_value(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p3.conjugate_value(0.0, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(p3.conjugate_value(0.0, 0.0) == 0.0);
  // Conjugate of t^3/3 is (2/3) t^{3/2}.
  CHECK(p3.conjugate_value(0.0, 4.0) == doctest::Approx(16.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("conjugate via bracketing inversion agrees with closed form") {
  auto mf = MusielakFunction::custom([](double, double s) { return s; }, 3.0, 3.0);
  auto p3 = MusielakFunction::constant_power(3.0);
  for (double t : {0.5, 1.0, 3.0}) {
    CHECK(mf.conjugate_value(0.2, t) ==
          doctest::Approx(p3.conjugate_value(0.2, t)).epsilon(1e-9));
  }
}

TEST_CASE("exponents estimation and declared-bound validation") {
  auto p2 = MusielakFunction::constant_power(2.0);
  auto xs = default_x_lattice(1.0);
  auto ts = default_t_lattice();
  auto [lo2, hi2] = exponents(p2, xs, ts);
  CHECK(lo2 == 2.0);
  CHECK(hi2 == 2.0);

  auto affine = MusielakFunction::affine_power(2.0, 1.0, 1.0);
  auto [loa, hia] = exponents(affine, xs, ts);
  CHECK(loa == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(hia == doctest::Approx(3.0).epsilon(1e-3));

  // Kernel behaves like p = 1.5 but the declared lower bound claims more.
  auto lying = MusielakFunction::custom(
      [](double, double s) { return s == 0.0 ? 0.0 : std::pow(s, -0.5); }, 1.6, 2.0);
  CHECK_THROWS_AS(exponents(lying, xs, ts), InvariantViolation);
}

TEST_CASE("modular values") {
  auto p2 = MusielakFunction::constant_power(2.0);
  auto p3 = MusielakFunction::constant_power(3.0);
  auto ramp = GridFunction::sample(1.0, 1001, [](double x) { return x; });
  CHECK(modular(p2, ramp) == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
  CHECK(modular(p2, GridFunction::zeros(1.0, 11)) == 0.0);
  auto one = GridFunction::sample(1.0, 101, [](double) { return 1.0; });
  CHECK(modular(p3, one) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("luxemburg norm closed-form anchors") {
  auto p2 = MusielakFunction::constant_power(2.0);
  auto one = GridFunction::sample(1.0, 201, [](double) { return 1.0; });
  auto two = GridFunction::sample(1.0, 201, [](double) { return 2.0; });
  CHECK(luxemburg_norm(p2, one) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
  CHECK(luxemburg_norm(p2, two) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
  CHECK(luxemburg_norm(p2, GridFunction::zeros(1.0, 11)) == 0.0);

  auto bad = GridFunction::zeros(1.0, 11);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(luxemburg_norm(p2, bad), DomainError);
}

TEST_CASE("constant-power norm equals the closed-form scaling") {
  // For constant exponent the norm solves rho(u/lambda) = 1 in closed form:
  // lambda = (trapz |u|^p / p)^{1/p} with the same discrete quadrature.
  Rng rng(11);
  for (double p : {2.0, 3.0}) {
    auto mf = MusielakFunction::constant_power(p);
    for (int trial = 0; trial < 20; ++trial) {
      auto u = random_sine_combo(rng, 1.0, 257, 6, std::pow(10.0, rng.uniform(-1, 1)));
      if (u.is_zero()) continue;
      std::vector<double> f(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) f[i] = std::pow(std::abs(u[i]), p) / p;
      const double lambda = std::pow(trapezoid(f, u.step()), 1.0 / p);
      CHECK(luxemburg_norm(mf, u) == doctest::Approx(lambda).epsilon(1e-8));
    }
  }
}

TEST_CASE("delta2 doubling constants") {
  auto ts = default_t_lattice();
  auto xs = default_x_lattice(1.0);
  CHECK(delta2_constant(MusielakFunction::constant_power(2.0), xs, ts) == 4.0);
  CHECK(delta2_constant(MusielakFunction::constant_power(3.0), xs, ts) == 8.0);
  CHECK(delta2_constant(MusielakFunction::affine_power(2.0, 1.0, 1.0), xs, ts) ==
        doctest::Approx(8.0).epsilon(1e-3));
}

TEST_CASE("holder pairing bound") {
  auto p2 = MusielakFunction::constant_power(2.0);
  auto one = GridFunction::sample(1.0, 201, [](double) { return 1.0; });
  auto rep = holder_check(p2, one, one);
  CHECK(rep.pass);
  CHECK(rep.lhs == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.rhs == doctest::Approx(1.0).epsilon(1e-8));  // equality margin case

  auto zero = GridFunction::zeros(1.0, 201);
  CHECK(holder_check(p2, zero, one).pass);

  auto p3 = MusielakFunction::constant_power(3.0);
  auto ramp = GridFunction::sample(1.0, 1001, [](double x) { return x; });
  auto down = GridFunction::sample(1.0, 1001, [](double x) { return 1.0 - x; });
  auto rep3 = holder_check(p3, ramp, down);
  CHECK(rep3.pass);
  CHECK(rep3.lhs == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
}

TEST_CASE("young-type and sandwich point values") {
  auto p2 = MusielakFunction::constant_power(2.0);
  auto p3 = MusielakFunction::constant_power(3.0);
  std::vector<double> x{0.0};

  std::vector<double> t1{1.0};
  auto y2 = young_type_check(p2, x, t1);
  CHECK(y2.pass);
  CHECK(y2.lhs == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(y2.rhs == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> t0{0.0};
  CHECK(young_type_check(p2, x, t0).pass);

  std::vector<double> t2{2.0};
  auto y3 = young_type_check(p3, x, t2);
  CHECK(y3.pass);
  CHECK(y3.lhs == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
  CHECK(y3.rhs == doctest::Approx(8.0).epsilon(1e-12));

  auto s2 = sandwich_check(p2, x, t1);
  CHECK(s2.pass);
  CHECK(s2.lhs == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s2.rhs == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sandwich_check(p2, x, t0).pass);
  auto s3 = sandwich_check(p3, x, t2);
  CHECK(s3.pass);
  CHECK(s3.lhs == doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(s3.rhs == doctest::Approx(64.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("modular-norm relations") {
  auto p2 = MusielakFunction::constant_power(2.0);
  auto two = GridFunction::sample(1.0, 201, [](double) { return 2.0; });
  auto one = GridFunction::sample(1.0, 201, [](double) { return 1.0; });
  CHECK(modular_norm_relations_check(p2, two).pass);
  CHECK(modular_norm_relations_check(p2, one).pass);
  CHECK(modular_norm_relations_check(p2, GridFunction::zeros(1.0, 11)).skipped);
}

TEST_CASE("norm homogeneity, unit modular, triangle inequality") {
  Rng rng(7);
  auto affine = MusielakFunction::affine_power(2.0, 1.0, 1.0);
  auto p3 = MusielakFunction::constant_power(3.0);
  const MusielakFunction* families[] = {&affine, &p3};
  for (const auto* mf : families) {
    for (int trial = 0; trial < 100; ++trial) {
      auto u = random_sine_combo(rng, 1.0, 129, 6, std::pow(10.0, rng.uniform(-2, 1)));
      auto v = random_sine_combo(rng, 1.0, 129, 6, std::pow(10.0, rng.uniform(-2, 1)));
      const double nu = luxemburg_norm(*mf, u);
      const double nv = luxemburg_norm(*mf, v);
      if (nu == 0.0) continue;

      const double c = std::pow(10.0, rng.uniform(-1, 1));
      CHECK(luxemburg_norm(*mf, c * u) == doctest::Approx(c * nu).epsilon(1e-8));

      CHECK(modular(*mf, (1.0 / nu) * u) == doctest::Approx(1.0).epsilon(1e-8));

      const double ns = luxemburg_norm(*mf, u + v);
      CHECK(ns <= nu + nv + 1e-8);
    }
  }
}

TEST_CASE("modular and norm vanish together on vanishing perturbations") {
  auto p3 = MusielakFunction::constant_power(3.0);
  auto affine = MusielakFunction::affine_power(2.0, 1.0, 1.0);
  Rng rng(3);
  auto w = random_sine_combo(rng, 1.0, 129, 5, 1.0);
  for (const auto* mf : {&p3, &affine}) {
    const double nw = luxemburg_norm(*mf, w);
    REQUIRE(nw > 0.0);
    auto unit = (1.0 / nw) * w;
    for (double eps : {1.0, 0.1, 1e-5, 1e-6}) {
      const double norm = luxemburg_norm(*mf, eps * unit);
      const double rho = modular(*mf, eps * unit);
      CHECK((rho <= 1e-6) == (norm <= 1e-4));
    }
  }
}

TEST_CASE("random-sample suites for the built-in families") {
  Rng rng(2024);
  auto affine = MusielakFunction::affine_power(2.0, 1.0, 1.0);
  auto p2 = MusielakFunction::constant_power(2.0);
  auto p3 = MusielakFunction::constant_power(3.0);
  for (const auto* mf : {&p2, &p3, &affine}) {
    std::vector<double> xs(10), ts(100);
    for (auto& x : xs) x = rng.uniform(0.0, 1.0);
    for (auto& t : ts) t = std::pow(10.0, rng.uniform(-6.0, 3.0));
    CHECK(young_type_check(*mf, xs, ts).pass);
    CHECK(sandwich_check(*mf, xs, ts).pass);
    for (int k = 0; k < 10; ++k) {
      auto u = random_sine_combo(rng, 1.0, 129, 6, std::pow(10.0, rng.uniform(-1, 1)));
      auto v = random_sine_combo(rng, 1.0, 129, 6, std::pow(10.0, rng.uniform(-1, 1)));
      CHECK(holder_check(*mf, u, v).pass);
    }
  }
}

TEST_CASE("custom kernel family passes the core checks") {
  auto mf = custom_cubic(1.0);
  auto xs = default_x_lattice(1.0);
  auto ts = log_lattice(1e-3, 1e3, 24);
  auto [lo, hi] = exponents(mf, xs, ts);
  CHECK(lo >= 2.0 - 1e-9);
  CHECK(hi <= 4.0 + 1e-9);
  CHECK(young_type_check(mf, xs, ts).pass);
  CHECK(sandwich_check(mf, xs, ts).pass);
}

TEST_CASE("sqrt convexity flags exponents below two") {
  auto xs = default_x_lattice(1.0);
  auto ts = log_lattice(1e-3, 1e3, 32);
  CHECK(sqrt_convexity_check(MusielakFunction::constant_power(2.0), xs, ts).pass);
  CHECK(sqrt_convexity_check(MusielakFunction::constant_power(3.0), xs, ts).pass);
  CHECK_FALSE(sqrt_convexity_check(MusielakFunction::constant_power(1.5), xs, ts).pass);
}
