#include <doctest.h>

#include <cmath>

#include "cp1lab/geometry.hpp"
#include "oracles.hpp"

using namespace cp1lab;
using geom::Complex;
using geom::SpherePoint;

TEST_CASE("normalize_point scales representatives") {
  const SpherePoint a = geom::normalize_point({2.0, 0.0}, {0.0, 0.0});
  CHECK(a.z0 == Complex(1.0, 0.0));
  CHECK(a.z1 == Complex(0.0, 0.0));

  const SpherePoint b = geom::normalize_point({0.0, 0.0}, {0.0, 5.0});
  CHECK(b.z0 == Complex(0.0, 0.0));
  CHECK(b.z1 == Complex(0.0, 1.0));
  CHECK(b.is_infinity());

  const SpherePoint c = geom::normalize_point({1.0, 0.0}, {1.0, 0.0});
  CHECK(c.z0.real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(c.z1.real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

  CHECK(std::abs(std::norm(c.z0) + std::norm(c.z1) - 1.0) < 1e-14);
  CHECK_THROWS_AS(geom::normalize_point({0.0, 0.0}, {0.0, 0.0}), DomainError);
}

TEST_CASE("fs_distance basics") {
  const SpherePoint o = geom::origin_point();
  CHECK(geom::fs_distance(o, o) == 0.0);
  CHECK(geom::fs_distance(o, geom::infinity_point()) == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(geom::fs_distance(o, geom::chart_point({1.0, 0.0})) ==
        doctest::Approx(kPi / 4).epsilon(1e-14));

  // Unit-modulus scalars do not move the projective point.
  const SpherePoint p = geom::chart_point({0.3, -0.7});
  const SpherePoint p_rot =
      geom::normalize_point(p.z0 * std::polar(1.0, 2.1), p.z1 * std::polar(1.0, 2.1));
  CHECK(geom::fs_distance(p, p_rot) < 1e-12);
}

TEST_CASE("fs_distance symmetry and triangle inequality on seeded triples") {
  SplitMix64 rng(101);
  for (int i = 0; i < 500; ++i) {
    const SpherePoint p = geom::random_point(rng);
    const SpherePoint q = geom::random_point(rng);
    const SpherePoint r = geom::random_point(rng);
    CHECK(std::abs(geom::fs_distance(p, q) - geom::fs_distance(q, p)) < 1e-15);
    CHECK(geom::fs_distance(p, r) <= geom::fs_distance(p, q) + geom::fs_distance(q, r) + 1e-12);
  }
}

TEST_CASE("fs_distance is unitary invariant") {
  SplitMix64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const SpherePoint p = geom::random_point(rng);
    const SpherePoint q = geom::random_point(rng);
    const geom::Unitary u = geom::random_unitary(rng);
    CHECK(std::abs(geom::fs_distance(u.apply(p), u.apply(q)) - geom::fs_distance(p, q)) < 1e-12);
  }
}

TEST_CASE("ball_volume closed form") {
  CHECK(geom::ball_volume(0.0) == 0.0);
  CHECK(geom::ball_volume(kPi / 2) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(geom::ball_volume(kPi / 4) == doctest::Approx(kPi / 2).epsilon(1e-14));
  for (double r = 0.1; r < kPi / 2 - 0.06; r += 0.1) {
    CHECK(geom::ball_volume(r) < geom::ball_volume(r + 0.05));
  }
  CHECK_THROWS_AS(geom::ball_volume(-0.1), DomainError);
  CHECK_THROWS_AS(geom::ball_volume(kPi / 2 + 0.01), DomainError);
}

TEST_CASE("ball volume agrees with indicator quadrature") {
  const auto rule = geom::make_quadrature(128, 256);
  const SpherePoint o = geom::origin_point();
  const double vol = geom::integrate(
      [&](const SpherePoint& p) { return geom::fs_distance(o, p) < kPi / 4 ? 1.0 : 0.0; }, rule);
  CHECK(vol == doctest::Approx(kPi / 2).epsilon(1e-6));
}

TEST_CASE("in_ball_tan examples") {
  CHECK(geom::in_ball_tan({0.4, 0.1}, {0.4, 0.1}, 0.3));
  // Boundary case |z-w| = tan(r)|1+z conj(w)|: strict inequality fails.
  CHECK_FALSE(geom::in_ball_tan({0.0, 0.0}, {1.0, 0.0}, kPi / 4));
  CHECK(geom::in_ball_tan({0.0, 0.0}, {0.5, 0.0}, kPi / 4));
}

TEST_CASE("in_ball_tan agrees with fs_distance off the boundary band") {
  SplitMix64 rng(2024);
  int checked = 0;
  for (int i = 0; i < 500; ++i) {
    const SpherePoint p = geom::random_point(rng);
    const SpherePoint q = geom::random_point(rng);
    if (p.is_infinity() || q.is_infinity()) continue;
    const Complex z = *p.chart();
    const Complex w = *q.chart();
    const double d = geom::fs_distance(p, q);
    for (int j = 0; j < 20; ++j) {
      const double r = 0.01 + (kPi / 2 - 0.02) * rng.uniform();
      if (std::abs(d - r) <= 1e-9) continue;
      ++checked;
      CHECK(geom::in_ball_tan(z, w, r) == (d < r));
    }
  }
  CHECK(checked > 9000);
}

TEST_CASE("make_quadrature integrates constants and low moments") {
  const auto one_rule = geom::make_quadrature(1, 1);
  CHECK(geom::integrate([](const SpherePoint&) { return 1.0; }, one_rule) ==
        doctest::Approx(kPi).epsilon(1e-12));

  // integral of sin^2(colatitude) = pi * int_0^1 s ds = pi/2; exact at (2,3).
  const auto rule23 = geom::make_quadrature(2, 3);
  CHECK(geom::integrate([](const SpherePoint& p) { return std::norm(p.z1); }, rule23) ==
        doctest::Approx(kPi / 2).epsilon(1e-14));

  CHECK_THROWS_AS(geom::make_quadrature(0, 4), ConfigError);
  CHECK_THROWS_AS(geom::make_quadrature(4, 0), ConfigError);
}

TEST_CASE("quadrature weights positive and summing to pi") {
  for (const auto& rule : {geom::make_quadrature(5, 9), geom::make_quadrature(40, 81)}) {
    KahanSum total;
    for (double w : rule.weights) {
      CHECK(w > 0.0);
      total.add(w);
    }
    CHECK(total.value() == doctest::Approx(kPi).epsilon(1e-12));
  }
}

TEST_CASE("exactness rule reproduces monomial norms") {
  // || z^j ||^2 = pi j! (k-j)! / (k+1)!; the integrand in homogeneous form is
  // |z0|^(2(k-j)) |z1|^(2j).
  const int k = 5;
  const auto rule = geom::make_quadrature(k + 2, 4 * k + 1);
  for (int j = 0; j <= k; ++j) {
    const double expected =
        kPi * std::exp(std::lgamma(j + 1.0) + std::lgamma(k - j + 1.0) - std::lgamma(k + 2.0));
    const double computed = geom::integrate(
        [&](const SpherePoint& p) {
          return ipow(std::norm(p.z0), k - j) * ipow(std::norm(p.z1), j);
        },
        rule);
    CHECK(computed == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("banded quadrature is exact across its breakpoints") {
  // f = s on [0, b], s^2 above: exact with a panel boundary at b.
  const double b = 0.3;
  const double breaks[1] = {b};
  const auto rule = geom::make_banded_quadrature(8, 3, breaks);
  const double computed = geom::integrate(
      [&](const SpherePoint& p) {
        const double s = std::norm(p.z1);
        return s <= b ? s : s * s;
      },
      rule);
  CHECK(computed == doctest::Approx(kPi * (b * b / 2 + (1 - b * b * b) / 3)).epsilon(1e-13));
  CHECK_THROWS_AS(geom::make_banded_quadrature(4, 3, std::vector<double>{0.5, 0.2}), ConfigError);
  CHECK_THROWS_AS(geom::make_banded_quadrature(4, 3, std::vector<double>{1.5}), ConfigError);
}

TEST_CASE("integrate rejects non-finite values and names the node") {
  const auto rule = geom::make_quadrature(2, 2);
  CHECK(geom::integrate([](const SpherePoint&) { return 0.0; }, rule) == 0.0);
  try {
    geom::integrate([](const SpherePoint&) { return std::nan(""); }, rule);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("node 0") != std::string::npos);
  }
}

TEST_CASE("doubling the rule barely moves cap indicator integrals") {
  const SpherePoint center = geom::chart_point({0.4, 0.3});
  auto cap_volume = [&](int nr, int na) {
    const auto rule = geom::make_quadrature(nr, na);
    return geom::integrate(
        [&](const SpherePoint& p) { return geom::fs_distance(center, p) < 0.6 ? 1.0 : 0.0; },
        rule);
  };
  const double base = cap_volume(128, 256);
  const double fine = cap_volume(256, 512);
  CHECK(std::abs(fine - base) / base < 1e-3);
}

TEST_CASE("unitary_origin_to maps the origin to the target") {
  SplitMix64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const SpherePoint y = geom::random_point(rng);
    const geom::Unitary u = geom::unitary_origin_to(y);
    CHECK(geom::fs_distance(u.apply(geom::origin_point()), y) < 1e-14);
  }
}
