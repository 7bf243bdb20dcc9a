#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "cp1lab/regions.hpp"
#include "cp1lab/sections.hpp"

namespace cp1lab::spectra {

using geom::Complex;
using geom::QuadratureRule;
using geom::SpherePoint;
using regions::MeasureSpec;
using regions::Region;

// Dense Hermitian matrix, row-major.
struct HermitianMatrix {
  int dim = 0;
  std::vector<Complex> entries;

  Complex& at(int i, int j) { return entries[std::size_t(i) * std::size_t(dim) + std::size_t(j)]; }
  const Complex& at(int i, int j) const {
    return entries[std::size_t(i) * std::size_t(dim) + std::size_t(j)];
  }
  double trace() const {
    double t = 0.0;
    for (int i = 0; i < dim; ++i) t += at(i, i).real();
    return t;
  }
};

struct EigenResult {
  std::vector<double> eigenvalues;  // sorted ascending
  double max_offdiag_residual = 0.0;
  int sweeps = 0;
};

// Gram matrix of the orthonormal basis against the measure:
// M[i][j] = int e_i(x) conj(e_j(x)) dmu(x), pointwise pairing in the bundle
// metric via normalized homogeneous evaluation.
HermitianMatrix gram_matrix(int k, const MeasureSpec& mu, const QuadratureRule& rule);

// Full spectrum by cyclic Jacobi rotations with a relative off-diagonal
// threshold, so tiny eigenvalues of graded Gram matrices keep their relative
// accuracy.  Deterministic sweep order; at most 64 sweeps.
EigenResult eigh(const HermitianMatrix& m);

struct ConcentrationResult {
  int k = 0;
  MeasureSpec measure = MeasureSpec::volume_on(Region::empty(), 0.0);
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double norming_constant = 0.0;   // 1/lambda_min, +inf when below the floor
  double carleson_constant = 0.0;  // lambda_max
};

// Smallest eigenvalue lambda_min of the Gram below 1e-12 is reported as
// non-norming: norming_constant = +inf.
ConcentrationResult norming_constant(int k, const Region& g, const QuadratureRule& rule);
ConcentrationResult carleson_constant(int k, const MeasureSpec& mu, const QuadratureRule& rule);

// Berezin transform of mu at z: int |Pi_k(w,z)|^2 / |Pi_k(z,z)| dmu(w).
double berezin_transform(int k, const MeasureSpec& mu, const SpherePoint& z,
                         const QuadratureRule& rule);
double berezin_sup(int k, const MeasureSpec& mu, std::span<const SpherePoint> probes,
                   const QuadratureRule& rule);

// max over probes of k * mu(B(z, 1/sqrt(k))).
double ball_mass_sup(int k, const MeasureSpec& mu, std::span<const SpherePoint> probes,
                     const QuadratureRule& rule);

// mu(B(center, r)).
double measure_ball_mass(const MeasureSpec& mu, const SpherePoint& center, double r,
                         const QuadratureRule& rule);

// M(k, eps) = inf over d <= eps/sqrt(k) of |Pi_k(w,z)|^2/|Pi_k(z,z)| / k
//           = ((k+1)/(pi k)) cos^(2k)(eps/sqrt(k)).
double kernel_lower_bound(int k, double eps);

// Mass ratio of the exceptional set where |s|^2 falls below eps times its
// ball average at scale R/sqrt(k):  int_A |s|^2 dV / (eps ||s||^2).
// Ball averages use a fixed coarse cap rule rotated to each center.
double exceptional_mass_ratio(int k, const sections::Section& s, double R, double eps,
                              const QuadratureRule& rule);

// Flat serialization record (berezin_sup / ball_mass_sup may be NaN = absent).
nlohmann::json result_to_json(const ConcentrationResult& res, double berezin_sup_value,
                              double ball_mass_sup_value, const QuadratureRule& rule,
                              std::uint64_t seed);

std::string measure_digest(const MeasureSpec& mu);

}  // namespace cp1lab::spectra
