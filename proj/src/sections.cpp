#include "cp1lab/sections.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cp1lab::sections {

SectionSpace make_space(int k) {
  if (k < 0 || k > 256) {
    throw ConfigError("make_space: degree must lie in [0, 256], got " + std::to_string(k));
  }
  SectionSpace space;
  space.degree = k;
  space.dimension = k + 1;
  space.ortho_norm_sq.resize(std::size_t(k) + 1);
  space.basis_scale.resize(std::size_t(k) + 1);
  for (int j = 0; j <= k; ++j) {
    // log( pi j! (k-j)! / (k+1)! ) = log pi - log(k+1) - log C(k,j)
    const double log_norm = std::log(kPi) - std::log(double(k) + 1.0) - log_choose(k, j);
    space.ortho_norm_sq[std::size_t(j)] = std::exp(log_norm);
    space.basis_scale[std::size_t(j)] = std::exp(-0.5 * log_norm);
  }
  return space;
}

void basis_values(const SectionSpace& space, const SpherePoint& p, std::span<Complex> out) {
  const int k = space.degree;
  if (int(out.size()) != k + 1) throw ShapeError("basis_values: output span has wrong size");
  // out[j] = scale_j * z0^(k-j) * z1^j, built from running powers.
  Complex pow1(1.0, 0.0);
  for (int j = 0; j <= k; ++j) {
    out[std::size_t(j)] = pow1;
    if (j < k) pow1 *= p.z1;
  }
  Complex pow0(1.0, 0.0);
  for (int j = k; j >= 0; --j) {
    out[std::size_t(j)] *= pow0 * space.basis_scale[std::size_t(j)];
    if (j > 0) pow0 *= p.z0;
  }
}

double eval_pointnorm(const SectionSpace& space, const Section& s, const SpherePoint& p,
                      std::span<Complex> scratch) {
  if (s.degree != space.degree || int(s.coeffs.size()) != space.dimension) {
    throw ShapeError("eval_pointnorm: section degree does not match the space");
  }
  const int k = space.degree;
  basis_values(space, p, scratch);
  KahanComplex acc;
  for (int j = 0; j <= k; ++j) acc.add(s.coeffs[std::size_t(j)] * scratch[std::size_t(j)]);
  return std::norm(acc.value());
}

double eval_pointnorm(const SectionSpace& space, const Section& s, const SpherePoint& p) {
  std::vector<Complex> b(std::size_t(space.degree) + 1);
  return eval_pointnorm(space, s, p, b);
}

double kernel_pointnorm(int k, const SpherePoint& p, const SpherePoint& q) {
  if (k < 0) throw ConfigError("kernel_pointnorm: degree must be >= 0");
  const double m = std::clamp(std::abs(geom::herm_inner(p, q)), 0.0, 1.0);
  return kernel_diagonal(k) * ipow(m, k);
}

Section peak_section(int k, const SpherePoint& y) {
  const SectionSpace space = make_space(k);
  std::vector<Complex> b(std::size_t(k) + 1);
  basis_values(space, y, b);
  const double inv_sqrt_diag = 1.0 / std::sqrt(kernel_diagonal(k));
  Section g;
  g.degree = k;
  g.coeffs.resize(std::size_t(k) + 1);
  for (int j = 0; j <= k; ++j) {
    g.coeffs[std::size_t(j)] = std::conj(b[std::size_t(j)]) * inv_sqrt_diag;
  }
  return g;
}

double peak_tail_mass(int k, const SpherePoint& y, double R, const QuadratureRule& rule) {
  if (k < 0) throw ConfigError("peak_tail_mass: degree must be >= 0");
  if (R < 0.0) throw DomainError("peak_tail_mass: R must be >= 0");
  const double r = (R == 0.0) ? 0.0 : R / std::sqrt(double(k));
  if (!(r <= kPi / 2)) {
    throw DomainError("peak_tail_mass: R/sqrt(k) exceeds the diameter pi/2");
  }
  const SectionSpace space = make_space(k);
  const Section g = peak_section(k, y);
  const geom::Unitary to_y = geom::unitary_origin_to(y);

  // Integrate |g|^2 over {s > sin^2 r} in y-centered coordinates; a panel
  // boundary at sin^2 r keeps the integrand polynomial on each panel.
  const double s_break = std::sin(r) * std::sin(r);
  QuadratureRule panel_rule;
  if (s_break > 0.0 && s_break < 1.0) {
    const double breaks[1] = {s_break};
    panel_rule = geom::make_banded_quadrature(rule.radial_order, rule.azimuthal_order, breaks);
  } else {
    panel_rule = geom::make_quadrature(rule.radial_order, rule.azimuthal_order);
  }

  std::vector<Complex> scratch(std::size_t(k) + 1);
  KahanSum acc;
  for (std::size_t i = 0; i < panel_rule.nodes.size(); ++i) {
    const SpherePoint& node = panel_rule.nodes[i];
    if (std::norm(node.z1) <= s_break) continue;  // inside the ball around y
    acc.add(panel_rule.weights[i] * eval_pointnorm(space, g, to_y.apply(node), scratch));
  }
  return acc.value();
}

double reproduce_residual(int k, const Section& s, const SpherePoint& p,
                          const QuadratureRule& rule) {
  if (rule.radial_order < k + 2 || rule.azimuthal_order < 2 * k + 1) {
    throw ConfigError("reproduce_residual: rule is not exact for degree-" + std::to_string(k) +
                      " pairings (need radial >= k+2, azimuthal >= 2k+1)");
  }
  const SectionSpace space = make_space(k);
  if (s.degree != k || int(s.coeffs.size()) != k + 1) {
    throw ShapeError("reproduce_residual: section degree does not match k");
  }

  // Coefficients of the reproduced section: c_j = int <s(y), e_j(y)> dV(y).
  std::vector<KahanComplex> acc(std::size_t(k) + 1);
  std::vector<Complex> b(std::size_t(k) + 1);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    basis_values(space, rule.nodes[i], b);
    KahanComplex sv;
    for (int j = 0; j <= k; ++j) sv.add(s.coeffs[std::size_t(j)] * b[std::size_t(j)]);
    const Complex value = sv.value() * rule.weights[i];
    for (int j = 0; j <= k; ++j) acc[std::size_t(j)].add(value * std::conj(b[std::size_t(j)]));
  }
  Section reproduced;
  reproduced.degree = k;
  reproduced.coeffs.resize(std::size_t(k) + 1);
  for (int j = 0; j <= k; ++j) reproduced.coeffs[std::size_t(j)] = acc[std::size_t(j)].value();

  const double a = std::sqrt(eval_pointnorm(space, s, p));
  const double b2 = std::sqrt(eval_pointnorm(space, reproduced, p));
  return std::abs(a - b2);
}

Section random_unit_section(const SectionSpace& space, SplitMix64& rng) {
  Section s;
  s.degree = space.degree;
  s.coeffs.resize(std::size_t(space.dimension));
  double norm2 = 0.0;
  for (auto& c : s.coeffs) {
    c = Complex(rng.gaussian(), rng.gaussian());
    norm2 += std::norm(c);
  }
  if (norm2 == 0.0) {
    s.coeffs[0] = Complex(1.0, 0.0);
    norm2 = 1.0;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& c : s.coeffs) c *= inv;
  return s;
}

}  // namespace cp1lab::sections
