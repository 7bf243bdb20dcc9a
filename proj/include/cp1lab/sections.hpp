#pragma once

#include <complex>
#include <span>
#include <vector>

#include "cp1lab/geometry.hpp"

namespace cp1lab::sections {

using geom::Complex;
using geom::QuadratureRule;
using geom::SpherePoint;

// The Hilbert space H^0(O(k)) on CP^1: polynomials of degree <= k with the
// Fubini-Study pairing.  dim = k + 1; ||z^j||^2 = pi j! (k-j)! / (k+1)!.
struct SectionSpace {
  int degree = 0;
  int dimension = 1;
  std::vector<double> ortho_norm_sq;  // monomial norms ||z^j||^2
  std::vector<double> basis_scale;    // sqrt((k+1) C(k,j) / pi) = 1/sqrt(ortho_norm_sq[j])
};

SectionSpace make_space(int k);

// A section in coordinates over the orthonormal basis e_j = z^j / ||z^j||.
struct Section {
  int degree = 0;
  std::vector<Complex> coeffs;

  double norm_sq() const {
    double s = 0.0;
    for (const auto& c : coeffs) s += std::norm(c);
    return s;
  }
};

// Orthonormal basis values at the normalized homogeneous representative:
// out[j] = basis_scale[j] * z0^(k-j) * z1^j.  Finite everywhere, including
// the chart's infinity.  Products out[i]*conj(out[j]) are frame-invariant.
void basis_values(const SectionSpace& space, const SpherePoint& p, std::span<Complex> out);

// Pointwise squared norm |s(p)|^2 in the bundle metric.
double eval_pointnorm(const SectionSpace& space, const Section& s, const SpherePoint& p);

// Same, with a caller-provided scratch buffer of size k+1 (hot loops).
double eval_pointnorm(const SectionSpace& space, const Section& s, const SpherePoint& p,
                      std::span<Complex> scratch);

inline double kernel_diagonal(int k) { return double(k + 1) / kPi; }

// |Pi_k(p,q)| = ((k+1)/pi) cos^k d(p,q).
double kernel_pointnorm(int k, const SpherePoint& p, const SpherePoint& q);

// Normalized kernel section g_{k,y} = Pi_k(.,y)/sqrt(|Pi_k(y,y)|); unit norm,
// |g(x)|^2 = |Pi_k(x,y)|^2 / |Pi_k(y,y)|.
Section peak_section(int k, const SpherePoint& y);

// Mass of |g_{k,y}|^2 outside B(y, R/sqrt(k)), by quadrature with the radial
// panel split at the ball boundary.  Closed form: cos^(2k+2)(R/sqrt(k)).
double peak_tail_mass(int k, const SpherePoint& y, double R, const QuadratureRule& rule);

// Residual of the reproducing identity at p: the section is re-expanded from
// its pointwise pairings against the kernel and compared at p.
double reproduce_residual(int k, const Section& s, const SpherePoint& p,
                          const QuadratureRule& rule);

// Seeded unit-norm section with Gaussian coefficients.
Section random_unit_section(const SectionSpace& space, SplitMix64& rng);

}  // namespace cp1lab::sections
