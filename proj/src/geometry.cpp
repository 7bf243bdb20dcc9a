#include "cp1lab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cp1lab::geom {

SpherePoint normalize_point(Complex z0, Complex z1) {
  if (!std::isfinite(z0.real()) || !std::isfinite(z0.imag()) || !std::isfinite(z1.real()) ||
      !std::isfinite(z1.imag())) {
    throw DomainError("normalize_point: non-finite homogeneous coordinates");
  }
  const double n2 = std::norm(z0) + std::norm(z1);
  if (n2 == 0.0) throw DomainError("normalize_point: zero vector is not a projective point");
  const double inv = 1.0 / std::sqrt(n2);
  return SpherePoint{z0 * inv, z1 * inv};
}

SpherePoint chart_point(Complex z) { return normalize_point(Complex(1.0, 0.0), z); }

SpherePoint infinity_point() { return SpherePoint{Complex(0.0, 0.0), Complex(1.0, 0.0)}; }

double fs_distance(const SpherePoint& p, const SpherePoint& q) {
  const double m = std::abs(herm_inner(p, q));
  return std::acos(std::clamp(m, 0.0, 1.0));
}

double ball_volume(double r) {
  if (!(r >= 0.0 && r <= kPi / 2)) {
    throw DomainError("ball_volume: radius must lie in [0, pi/2], got " + std::to_string(r));
  }
  const double s = std::sin(r);
  return kPi * s * s;
}

bool in_ball_tan(Complex z, Complex w, double r) {
  return std::abs(z - w) < std::tan(r) * std::abs(1.0 + z * std::conj(w));
}

FSBall make_ball(const SpherePoint& center, double radius) {
  if (!(radius > 0.0 && radius <= kPi / 2)) {
    throw DomainError("ball radius must lie in (0, pi/2], got " + std::to_string(radius));
  }
  return FSBall{center, radius};
}

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(std::size_t(n), 0.0);
  weights.assign(std::size_t(n), 0.0);
  // Newton iteration on P_n over [-1, 1], then map to [0, 1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (double(i) + 0.75) / (double(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / double(j);
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pnm1 = (n == 1) ? 1.0 : p0;
      dp = double(n) * (pnm1 - x * pn) / (1.0 - x * x);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    // One more residual evaluation for the weight.
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / double(j);
      p0 = p1;
      p1 = p2;
    }
    const double pn = (n == 1) ? x : p1;
    const double pnm1 = (n == 1) ? 1.0 : p0;
    dp = double(n) * (pnm1 - x * pn) / (1.0 - x * x);
    nodes[std::size_t(n - 1 - i)] = 0.5 * (x + 1.0);
    weights[std::size_t(n - 1 - i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

void append_panel(QuadratureRule& rule, double s_lo, double s_hi, int radial_nodes,
                  int azimuthal_nodes) {
  std::vector<double> gl_nodes, gl_weights;
  gauss_legendre_01(radial_nodes, gl_nodes, gl_weights);
  const double len = s_hi - s_lo;
  for (int i = 0; i < radial_nodes; ++i) {
    const double s = s_lo + len * gl_nodes[std::size_t(i)];
    const double w = kPi * len * gl_weights[std::size_t(i)] / double(azimuthal_nodes);
    const double c = std::sqrt(1.0 - s);
    const double m = std::sqrt(s);
    for (int j = 0; j < azimuthal_nodes; ++j) {
      const double theta = 2.0 * kPi * double(j) / double(azimuthal_nodes);
      rule.nodes.push_back(
          SpherePoint{Complex(c, 0.0), Complex(m * std::cos(theta), m * std::sin(theta))});
      rule.weights.push_back(w);
    }
  }
}

}  // namespace

QuadratureRule make_quadrature(int radial_nodes, int azimuthal_nodes) {
  if (radial_nodes < 1 || azimuthal_nodes < 1) {
    throw ConfigError("make_quadrature: node counts must be >= 1");
  }
  QuadratureRule rule;
  rule.radial_order = radial_nodes;
  rule.azimuthal_order = azimuthal_nodes;
  rule.nodes.reserve(std::size_t(radial_nodes) * std::size_t(azimuthal_nodes));
  rule.weights.reserve(rule.nodes.capacity());
  append_panel(rule, 0.0, 1.0, radial_nodes, azimuthal_nodes);
  return rule;
}

QuadratureRule make_banded_quadrature(int radial_nodes_per_panel, int azimuthal_nodes,
                                      std::span<const double> s_breaks) {
  if (radial_nodes_per_panel < 1 || azimuthal_nodes < 1) {
    throw ConfigError("make_banded_quadrature: node counts must be >= 1");
  }
  double prev = 0.0;
  for (double b : s_breaks) {
    if (!(b > prev && b < 1.0)) {
      throw ConfigError("make_banded_quadrature: breakpoints must be ascending within (0,1)");
    }
    prev = b;
  }
  QuadratureRule rule;
  rule.radial_order = radial_nodes_per_panel * int(s_breaks.size() + 1);
  rule.azimuthal_order = azimuthal_nodes;
  double lo = 0.0;
  for (double b : s_breaks) {
    append_panel(rule, lo, b, radial_nodes_per_panel, azimuthal_nodes);
    lo = b;
  }
  append_panel(rule, lo, 1.0, radial_nodes_per_panel, azimuthal_nodes);
  return rule;
}

namespace detail {
void throw_nonfinite(std::size_t node_index) {
  throw NumericalError("integrate: non-finite integrand value at node " +
                       std::to_string(node_index));
}
}  // namespace detail

Unitary unitary_origin_to(const SpherePoint& y) {
  // Columns (y0, y1) and (-conj(y1), conj(y0)) are orthonormal, det = 1.
  return Unitary{y.z0, -std::conj(y.z1), y.z1, std::conj(y.z0)};
}

Unitary random_unitary(SplitMix64& rng) {
  const double t = std::asin(std::sqrt(rng.uniform()));
  const double a = 2.0 * kPi * rng.uniform();
  const double b = 2.0 * kPi * rng.uniform();
  const double g = 2.0 * kPi * rng.uniform();
  const Complex ea = std::polar(1.0, a), eb = std::polar(1.0, b), eg = std::polar(1.0, g);
  const double c = std::cos(t), s = std::sin(t);
  return Unitary{eg * (ea * c), eg * (eb * s), eg * (-std::conj(eb) * s), eg * (std::conj(ea) * c)};
}

SpherePoint random_point(SplitMix64& rng) {
  const double s = rng.uniform();
  const double theta = 2.0 * kPi * rng.uniform();
  const double m = std::sqrt(s);
  return SpherePoint{Complex(std::sqrt(1.0 - s), 0.0),
                     Complex(m * std::cos(theta), m * std::sin(theta))};
}

}  // namespace cp1lab::geom
