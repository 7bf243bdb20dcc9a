#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cp1lab/errors.hpp"
#include "cp1lab/util.hpp"

namespace cp1lab::geom {

using Complex = std::complex<double>;

// A point of CP^1 in normalized homogeneous coordinates: |z0|^2 + |z1|^2 = 1.
// The affine chart value is z1/z0; the chart's infinity is z0 = 0, which this
// representation handles without any special casing.
struct SpherePoint {
  Complex z0{1.0, 0.0};
  Complex z1{0.0, 0.0};

  bool is_infinity() const { return z0 == Complex(0.0, 0.0); }

  // Chart coordinate z1/z0; empty at the chart's infinity.
  std::optional<Complex> chart() const {
    if (is_infinity()) return std::nullopt;
    return z1 / z0;
  }
};

SpherePoint normalize_point(Complex z0, Complex z1);
SpherePoint chart_point(Complex z);
SpherePoint infinity_point();
inline SpherePoint origin_point() { return SpherePoint{}; }

// Hermitian pairing of homogeneous representatives.
inline Complex herm_inner(const SpherePoint& p, const SpherePoint& q) {
  return p.z0 * std::conj(q.z0) + p.z1 * std::conj(q.z1);
}

// Fubini-Study distance, normalized so diam(CP^1) = pi/2.
double fs_distance(const SpherePoint& p, const SpherePoint& q);

// Colatitude: distance to the chart origin.  Equals arcsin(|z1|).
inline double colatitude(const SpherePoint& p) {
  return fs_distance(SpherePoint{}, p);
}

// Volume of a metric ball of radius r; total volume of CP^1 is pi.
double ball_volume(double r);

// Chart-coordinate ball membership |z-w| < tan(r)|1 + z conj(w)|.
// Agrees with fs_distance(z, w) < r for all finite chart points.
bool in_ball_tan(Complex z, Complex w, double r);

struct FSBall {
  SpherePoint center;
  double radius = 0.0;  // radians, in (0, pi/2]
};

FSBall make_ball(const SpherePoint& center, double radius);

// Product quadrature on CP^1: Gauss-Legendre in s = sin^2(colatitude),
// uniform in azimuth.  Weights are volume units and sum to pi.
struct QuadratureRule {
  std::vector<SpherePoint> nodes;
  std::vector<double> weights;
  int radial_order = 0;
  int azimuthal_order = 0;
};

QuadratureRule make_quadrature(int radial_nodes, int azimuthal_nodes);

// Same rule but with the radial Gauss-Legendre panels split at the given
// s-breakpoints (each in (0,1), ascending).  Polynomial integrands that are
// piecewise across a breakpoint integrate exactly; used for cap-aligned
// integration.
QuadratureRule make_banded_quadrature(int radial_nodes_per_panel, int azimuthal_nodes,
                                      std::span<const double> s_breaks);

// Gauss-Legendre nodes/weights on [0, 1]; weights sum to 1.
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

namespace detail {
[[noreturn]] void throw_nonfinite(std::size_t node_index);
}

// Fixed-order compensated summation of f over the rule's nodes.
template <class F>
double integrate(F&& f, const QuadratureRule& rule) {
  KahanSum acc;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v)) detail::throw_nonfinite(i);
    acc.add(rule.weights[i] * v);
  }
  return acc.value();
}

// A 2x2 unitary acting on homogeneous coordinates (an isometry of CP^1).
struct Unitary {
  Complex u00{1.0, 0.0}, u01{0.0, 0.0};
  Complex u10{0.0, 0.0}, u11{1.0, 0.0};

  SpherePoint apply(const SpherePoint& p) const {
    return normalize_point(u00 * p.z0 + u01 * p.z1, u10 * p.z0 + u11 * p.z1);
  }
};

// SU(2) element mapping the chart origin to y.
Unitary unitary_origin_to(const SpherePoint& y);

// Haar-ish random unitary for covariance tests.
Unitary random_unitary(SplitMix64& rng);

// Area-uniform random point (s uniform in [0,1], azimuth uniform).
SpherePoint random_point(SplitMix64& rng);

}  // namespace cp1lab::geom
