#include <doctest.h>

#include <cmath>

#include "cp1lab/spectra.hpp"
#include "oracles.hpp"

using namespace cp1lab;
using geom::Complex;
using geom::FSBall;
using geom::SpherePoint;
using regions::MeasureSpec;
using regions::Region;
using spectra::HermitianMatrix;

namespace {

HermitianMatrix random_hermitian(int dim, SplitMix64& rng) {
  HermitianMatrix m;
  m.dim = dim;
  m.entries.assign(std::size_t(dim) * std::size_t(dim), Complex(0.0, 0.0));
  for (int i = 0; i < dim; ++i) {
    m.at(i, i) = Complex(2.0 * rng.gaussian(), 0.0);
    for (int j = i + 1; j < dim; ++j) {
      m.at(i, j) = Complex(rng.gaussian(), rng.gaussian());
      m.at(j, i) = std::conj(m.at(i, j));
    }
  }
  return m;
}

// Equatorial band of volume fraction `fraction`, symmetric in s about 1/2.
Region equatorial_band(double fraction) {
  const double s_lo = (1.0 - fraction) / 2.0;
  const double s_hi = (1.0 + fraction) / 2.0;
  return Region::band(std::asin(std::sqrt(s_lo)), std::asin(std::sqrt(s_hi)));
}

}  // namespace

TEST_CASE("gram over the full volume is the identity") {
  for (int k : {0, 1, 4, 16}) {
    const auto rule = geom::make_quadrature(k + 2, 4 * k + 1);
    const auto g = spectra::gram_matrix(k, MeasureSpec::volume_on(Region::all(), 1.0), rule);
    for (int i = 0; i <= k; ++i) {
      for (int j = 0; j <= k; ++j) {
        const Complex expected = (i == j) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
        CHECK(std::abs(g.at(i, j) - expected) < 1e-11);
      }
    }
  }
}

TEST_CASE("gram of a unit atom is rank one with the kernel-diagonal trace") {
  SplitMix64 rng(64);
  const int k = 4;
  const auto rule = geom::make_quadrature(8, 9);
  const SpherePoint y = geom::random_point(rng);
  const auto g = spectra::gram_matrix(k, MeasureSpec::atoms({{y, 1.0}}), rule);
  CHECK(g.trace() == doctest::Approx(sections::kernel_diagonal(k)).epsilon(1e-12));
  const auto eig = spectra::eigh(g);
  for (int i = 0; i < k; ++i) CHECK(std::abs(eig.eigenvalues[std::size_t(i)]) < 1e-13);
  CHECK(eig.eigenvalues.back() ==
        doctest::Approx(sections::kernel_diagonal(k)).epsilon(1e-12));
}

TEST_CASE("gram over the empty region is zero") {
  const auto rule = geom::make_quadrature(6, 7);
  const auto g = spectra::gram_matrix(3, MeasureSpec::volume_on(Region::empty(), 1.0), rule);
  for (const auto& e : g.entries) CHECK(std::abs(e) == 0.0);
}

TEST_CASE("eigh: identity and embedded real diagonal") {
  HermitianMatrix id;
  id.dim = 4;
  id.entries.assign(16, Complex(0.0, 0.0));
  for (int i = 0; i < 4; ++i) id.at(i, i) = Complex(1.0, 0.0);
  const auto eid = spectra::eigh(id);
  for (double v : eid.eigenvalues) CHECK(v == 1.0);

  HermitianMatrix d;
  d.dim = 3;
  d.entries.assign(9, Complex(0.0, 0.0));
  d.at(0, 0) = Complex(2.0, 0.0);
  d.at(1, 1) = Complex(3.0, 0.0);
  d.at(2, 2) = Complex(1.0, 0.0);
  const auto ed = spectra::eigh(d);
  CHECK(ed.eigenvalues[0] == 1.0);
  CHECK(ed.eigenvalues[1] == 2.0);
  CHECK(ed.eigenvalues[2] == 3.0);
}

TEST_CASE("eigh matches the Sturm-bisection oracle on seeded matrices") {
  SplitMix64 rng(975);
  for (int dim : {2, 3, 5, 8}) {
    for (int trial = 0; trial < 6; ++trial) {
      const HermitianMatrix m = random_hermitian(dim, rng);
      const auto jacobi = spectra::eigh(m);
      const auto sturm = oracles::sturm_eigenvalues(m);
      REQUIRE(int(sturm.size()) == dim);
      for (int i = 0; i < dim; ++i) {
        CHECK(std::abs(jacobi.eigenvalues[std::size_t(i)] - sturm[std::size_t(i)]) < 1e-9);
      }
      // Trace and residual invariants.
      double sum = 0.0;
      for (double v : jacobi.eigenvalues) sum += v;
      CHECK(std::abs(sum - m.trace()) < 1e-9 * dim);
      double norm = 0.0;
      for (const auto& e : m.entries) norm = std::max(norm, std::abs(e));
      CHECK(jacobi.max_offdiag_residual < 1e-11 * std::max(norm, 1e-30));
    }
  }
  HermitianMatrix too_big;
  too_big.dim = 513;
  CHECK_THROWS_AS(spectra::eigh(too_big), ConfigError);
}

TEST_CASE("eigh keeps relative accuracy on graded near-diagonal matrices") {
  HermitianMatrix m;
  m.dim = 3;
  m.entries.assign(9, Complex(0.0, 0.0));
  m.at(0, 0) = Complex(0.5, 0.0);
  m.at(1, 1) = Complex(1e-20, 0.0);
  m.at(2, 2) = Complex(5e-34, 0.0);
  m.at(0, 1) = Complex(1e-28, 0.0);
  m.at(1, 0) = Complex(1e-28, 0.0);
  const auto eig = spectra::eigh(m);
  CHECK(eig.eigenvalues[0] == doctest::Approx(5e-34).epsilon(1e-10));
  CHECK(eig.eigenvalues[1] == doctest::Approx(1e-20).epsilon(1e-10));
  CHECK(eig.eigenvalues[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("norming constants of trivial regions") {
  const int k = 6;
  const auto rule = geom::make_quadrature(k + 2, 4 * k + 1);
  const auto all = spectra::norming_constant(k, Region::all(), rule);
  CHECK(all.norming_constant == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(all.lambda_min >= 0.0);
  CHECK(all.lambda_max <= 1.0 + 2e-3);

  const auto none = spectra::norming_constant(k, Region::empty(), rule);
  CHECK(std::isinf(none.norming_constant));
}

TEST_CASE("norming constant of the half-volume equatorial band, k = 8") {
  // lambda_min = 0.75^9 - 0.25^9 exactly; checked against an independent
  // Rayleigh-quotient minimization from 1e5 seeded random sections.
  const int k = 8;
  const auto rule = geom::make_quadrature(256, 2 * k + 1);
  const Region band = equatorial_band(0.5);
  const auto res = spectra::norming_constant(k, band, rule);

  const auto gram = spectra::gram_matrix(k, MeasureSpec::volume_on(band, 1.0), rule);
  SplitMix64 rng(31337);
  const double oracle_min = oracles::rayleigh_min_eigenvalue(gram, rng, 100'000, 400);
  const double oracle_c = 1.0 / oracle_min;
  CHECK(std::abs(res.norming_constant - oracle_c) / oracle_c < 1e-3);

  const double exact = ipow(0.75, 9) - ipow(0.25, 9);
  CHECK(res.lambda_min == doctest::Approx(exact).epsilon(2e-3));
}

TEST_CASE("carleson constants: volume, atoms, scaling") {
  const int k = 5;
  const auto rule = geom::make_quadrature(k + 2, 4 * k + 1);
  const auto all = spectra::carleson_constant(k, MeasureSpec::volume_on(Region::all(), 1.0), rule);
  CHECK(all.carleson_constant == doctest::Approx(1.0).epsilon(2e-3));

  SplitMix64 rng(8);
  const SpherePoint y = geom::random_point(rng);
  const auto atom = spectra::carleson_constant(k, MeasureSpec::atoms({{y, 1.0}}), rule);
  CHECK(atom.carleson_constant ==
        doctest::Approx(sections::kernel_diagonal(k)).epsilon(1e-12));

  const auto x3 = spectra::carleson_constant(k, MeasureSpec::volume_on(Region::all(), 3.0), rule);
  CHECK(x3.carleson_constant == doctest::Approx(3.0).epsilon(6e-3));
}

TEST_CASE("berezin transform: reproducing identity, atoms, empty") {
  SplitMix64 rng(77);
  for (int k : {1, 8, 32}) {
    const auto rule = geom::make_quadrature(k + 2, 4 * k + 1);
    const MeasureSpec volume = MeasureSpec::volume_on(Region::all(), 1.0);
    for (int i = 0; i < 5; ++i) {
      const SpherePoint z = geom::random_point(rng);
      CHECK(spectra::berezin_transform(k, volume, z, rule) ==
            doctest::Approx(1.0).epsilon(1e-6));
    }
    const SpherePoint z = geom::random_point(rng);
    CHECK(spectra::berezin_transform(k, MeasureSpec::atoms({{z, 1.0}}), z, rule) ==
          doctest::Approx(sections::kernel_diagonal(k)).epsilon(1e-12));
    CHECK(spectra::berezin_transform(k, MeasureSpec::volume_on(Region::empty(), 1.0), z, rule) ==
          0.0);
  }
}

TEST_CASE("berezin_sup is dominated by the Carleson constant") {
  const int k = 8;
  const auto rule = geom::make_quadrature(128, 4 * k + 1);
  const auto probes = regions::probe_grid(200);

  SplitMix64 rng(5150);
  for (int trial = 0; trial < 10; ++trial) {
    MeasureSpec mu = (trial % 2 == 0)
                         ? MeasureSpec::volume_on(
                               Region::random_caps(rng.next(), 20, 0.15 + 0.2 * rng.uniform()),
                               0.5 + rng.uniform())
                         : MeasureSpec::atoms({{geom::random_point(rng), rng.uniform()},
                                               {geom::random_point(rng), rng.uniform()},
                                               {geom::random_point(rng), rng.uniform()}});
    std::vector<SpherePoint> all_probes(probes.begin(), probes.end());
    if (mu.kind() == MeasureSpec::Kind::Atoms) {
      for (const auto& [p, m] : mu.atom_list()) {
        (void)m;
        all_probes.push_back(p);
      }
    }
    const double b = spectra::berezin_sup(k, mu, all_probes, rule);
    const double c = spectra::carleson_constant(k, mu, rule).carleson_constant;
    CHECK(b <= c + 2e-3);
  }

  // Full volume: sup = 1; atom probed at itself: kernel diagonal.
  CHECK(spectra::berezin_sup(k, MeasureSpec::volume_on(Region::all(), 1.0), probes, rule) ==
        doctest::Approx(1.0).epsilon(1e-6));
  SplitMix64 rng2(222);
  const SpherePoint y = geom::random_point(rng2);
  std::vector<SpherePoint> with_y(probes.begin(), probes.end());
  with_y.push_back(y);
  CHECK(spectra::berezin_sup(k, MeasureSpec::atoms({{y, 1.0}}), with_y, rule) ==
        doctest::Approx(sections::kernel_diagonal(k)).epsilon(1e-12));
}

TEST_CASE("ball_mass_sup examples") {
  const auto rule = geom::make_quadrature(256, 256);
  const auto probes = regions::probe_grid(300);
  const int k = 16;
  const double expected = 16.0 * geom::ball_volume(0.25);  // 16 pi sin^2(1/4)
  CHECK(expected == doctest::Approx(3.0766857938919063).epsilon(1e-12));
  CHECK(spectra::ball_mass_sup(k, MeasureSpec::volume_on(Region::all(), 1.0), probes, rule) ==
        doctest::Approx(expected).epsilon(1e-2));
  CHECK(spectra::ball_mass_sup(k, MeasureSpec::volume_on(Region::empty(), 1.0), probes, rule) ==
        0.0);

  SplitMix64 rng(4);
  const SpherePoint y = geom::random_point(rng);
  std::vector<SpherePoint> with_y(probes.begin(), probes.end());
  with_y.push_back(y);
  CHECK(spectra::ball_mass_sup(k, MeasureSpec::atoms({{y, 1.0}}), with_y, rule) ==
        doctest::Approx(double(k)).epsilon(1e-12));
}

TEST_CASE("kernel_lower_bound closed form and uniform floor") {
  // eps -> 0 recovers the normalized diagonal (k+1)/(pi k).
  CHECK(spectra::kernel_lower_bound(7, 0.0) == doctest::Approx(8.0 / (7.0 * kPi)).epsilon(1e-14));

  // k = 16, eps = 0.5 -> (17/(16 pi)) cos^32(0.125), cross-checked by grid
  // minimization of the normalized kernel over the ball.
  const double closed = spectra::kernel_lower_bound(16, 0.5);
  CHECK(closed == doctest::Approx(0.2632215959788095).epsilon(1e-12));
  double grid_min = 1e300;
  const double r = 0.5 / 4.0;
  for (int i = 0; i <= 400; ++i) {
    const double d = r * double(i) / 400.0;
    const SpherePoint w{Complex(std::cos(d), 0.0), Complex(std::sin(d), 0.0)};
    const double v = sections::kernel_pointnorm(16, w, geom::origin_point());
    grid_min = std::min(grid_min, v * v / sections::kernel_diagonal(16) / 16.0);
  }
  CHECK(closed == doctest::Approx(grid_min).epsilon(1e-12));

  for (int k = 1; k <= 64; ++k) {
    CHECK(spectra::kernel_lower_bound(k, 1.0) >= std::exp(-1.0) / kPi);
  }
  CHECK_THROWS_AS(spectra::kernel_lower_bound(1, 2.0), DomainError);
}

TEST_CASE("exceptional mass ratio stays below the Fubini bound") {
  const auto rule = geom::make_quadrature(64, 128);
  SplitMix64 rng(60);

  // Peak section, eps = 0.1, R = 1.
  {
    const int k = 8;
    const SpherePoint y = geom::random_point(rng);
    const auto g = sections::peak_section(k, y);
    CHECK(spectra::exceptional_mass_ratio(k, g, 1.0, 0.1, rule) <= 1.05);
  }
  // Sparse two-mode section at k = 8.
  {
    const int k = 8;
    sections::Section s;
    s.degree = k;
    s.coeffs.assign(9, Complex(0.0, 0.0));
    s.coeffs[0] = Complex(1.0, 0.0);
    s.coeffs[8] = Complex(1.0, 0.0);
    CHECK(spectra::exceptional_mass_ratio(k, s, 2.0, 0.05, rule) <= 1.05);
  }
  // Threshold above the Rayleigh ceiling: the set is everything, ratio 1/eps.
  {
    const int k = 4;
    const auto space = sections::make_space(k);
    const auto s = sections::random_unit_section(space, rng);
    const double eps = double(k + 1);
    const double ratio = spectra::exceptional_mass_ratio(k, s, 1.0, eps, rule);
    CHECK(ratio == doctest::Approx(1.0 / eps).epsilon(1e-6));
    CHECK(ratio <= 1.0);
  }
  // Nested budget guard.
  const auto huge = geom::make_quadrature(512, 512);
  const auto space = sections::make_space(4);
  SplitMix64 rng2(1);
  const auto s = sections::random_unit_section(space, rng2);
  CHECK_THROWS_AS(spectra::exceptional_mass_ratio(4, s, 1.0, 0.1, huge), ConfigError);
}

TEST_CASE("gram additivity and measure-scaling equivariance") {
  const int k = 5;
  const auto rule = geom::make_quadrature(64, 64);
  const Region left = Region::band(0.1, 0.6);
  const Region right = Region::band(0.9, 1.4);

  const auto g_left = spectra::gram_matrix(k, MeasureSpec::volume_on(left, 1.0), rule);
  const auto g_right = spectra::gram_matrix(k, MeasureSpec::volume_on(right, 1.0), rule);
  const auto g_union = spectra::gram_matrix(
      k, MeasureSpec::volume_on(Region::union_of({left, right}), 1.0), rule);
  for (std::size_t i = 0; i < g_union.entries.size(); ++i) {
    CHECK(std::abs(g_union.entries[i] - (g_left.entries[i] + g_right.entries[i])) < 1e-12);
  }

  const auto res1 = spectra::carleson_constant(k, MeasureSpec::volume_on(left, 1.0), rule);
  const auto res7 = spectra::carleson_constant(k, MeasureSpec::volume_on(left, 7.0), rule);
  CHECK(res7.lambda_max == doctest::Approx(7.0 * res1.lambda_max).epsilon(1e-9));
  CHECK(res7.lambda_min == doctest::Approx(7.0 * res1.lambda_min).epsilon(1e-9));
}

TEST_CASE("domination and inclusion monotonicity") {
  const int k = 7;
  const auto rule = geom::make_quadrature(128, 4 * k + 1);
  SplitMix64 rng(13);
  const Region small = Region::cap(FSBall{geom::random_point(rng), 0.7});
  const Region big = Region::union_of({small, equatorial_band(0.3)});
  for (const Region& g : {small, big, Region::all()}) {
    const auto res = spectra::norming_constant(k, g, rule);
    CHECK(res.lambda_min >= -1e-12);
    CHECK(res.lambda_max <= 1.0 + 2e-3);
    CHECK(res.norming_constant >= 1.0 - 2e-3);
  }
  const auto c_small = spectra::norming_constant(k, small, rule);
  const auto c_big = spectra::norming_constant(k, big, rule);
  CHECK(c_small.norming_constant >= c_big.norming_constant - 1e-3 * c_big.norming_constant);
}

TEST_CASE("chain of constants on seeded measures") {
  const auto probes_base = regions::probe_grid(260);
  SplitMix64 rng(31415);
  for (int k : {8, 16}) {
    const auto rule = geom::make_quadrature(128, 4 * k + 1);
    for (int trial = 0; trial < 4; ++trial) {
      MeasureSpec mu =
          (trial % 2 == 0)
              ? MeasureSpec::volume_on(Region::random_caps(rng.next(), 30, 0.2), 1.0)
              : MeasureSpec::atoms({{geom::random_point(rng), 0.5 + rng.uniform()},
                                    {geom::random_point(rng), 0.5 + rng.uniform()}});
      std::vector<SpherePoint> probes(probes_base.begin(), probes_base.end());
      if (mu.kind() == MeasureSpec::Kind::Atoms) {
        for (const auto& [p, m] : mu.atom_list()) {
          (void)m;
          probes.push_back(p);
        }
      }
      const double carleson = spectra::carleson_constant(k, mu, rule).carleson_constant;
      const double berezin = spectra::berezin_sup(k, mu, probes, rule);
      const double ball = spectra::ball_mass_sup(k, mu, probes, rule);
      CHECK(berezin <= carleson + 2e-3);
      // Quantitative (2) => (3) step via the kernel lower bound at eps = 1.
      const double factor = kPi * double(k) /
                            (double(k + 1) * ipow(std::cos(1.0 / std::sqrt(double(k))), 2 * k));
      CHECK(ball <= factor * berezin + 1e-6);
    }
  }
}

TEST_CASE("concentration result serializes to a flat record") {
  const int k = 3;
  const auto rule = geom::make_quadrature(k + 2, 4 * k + 1);
  const auto res = spectra::norming_constant(k, Region::empty(), rule);
  const auto j = spectra::result_to_json(res, 0.0, std::nan(""), rule, 99);
  CHECK(j.at("k") == 3);
  CHECK(j.at("norming_constant") == "inf");
  CHECK(j.at("lambda_min").get<double>() == res.lambda_min);
  CHECK(j.at("quad_radial") == k + 2);
  CHECK(j.at("seed") == 99);
  CHECK(j.contains("berezin_sup"));
  CHECK_FALSE(j.contains("ball_mass_sup"));
  CHECK(j.at("measure_digest").get<std::string>().size() == 16);
}
