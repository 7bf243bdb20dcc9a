#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "cp1lab/spectra.hpp"

namespace cp1lab::fock {

using geom::Complex;
using json = nlohmann::json;

// Degree-truncated Fock space on the plane under the weight e^{-2|z|^2}:
// ||z^j||^2 = pi j! / 2^(j+1).  The truncation is faithful inside the bulk
// disk of radius sqrt(N/2), where |z|^(2N) e^{-2|z|^2} peaks.
struct FockSpace {
  int max_degree = 0;
  std::vector<double> ortho_norm_sq;
  std::vector<double> basis_scale;  // 1/sqrt(ortho_norm_sq[j])
  double bulk_radius = 0.0;
};

FockSpace fock_space(int max_degree);

enum class PlanarKind { Disk, Annulus, Union, Complement, PeriodicHoles };

// Planar measurable sets, implicitly intersected with the bulk disk.
class PlanarRegion {
 public:
  static PlanarRegion disk(Complex center, double radius);
  static PlanarRegion annulus(Complex center, double r_in, double r_out);
  static PlanarRegion union_of(std::vector<PlanarRegion> members);
  static PlanarRegion complement(PlanarRegion inner);
  // Keeps the plane minus disks of hole_radius on a square lattice of the
  // given spacing; the lattice offset derives from the seed (0 = unshifted)
  // unless given explicitly.
  static PlanarRegion periodic_holes(std::uint64_t seed, double spacing, double hole_radius);
  static PlanarRegion periodic_holes_at(Complex offset, double spacing, double hole_radius);

  bool contains(Complex z) const;
  PlanarKind kind() const { return kind_; }

 private:
  PlanarRegion() = default;
  PlanarKind kind_ = PlanarKind::Disk;
  Complex center_{0.0, 0.0};
  double r_in_ = 0.0, r_out_ = 0.0;
  std::vector<PlanarRegion> members_;
  double spacing_ = 0.0, hole_radius_ = 0.0;
  Complex offset_{0.0, 0.0};
};

PlanarRegion build_planar_region(const json& spec);

// Polar product rule on the bulk disk: Gauss-Legendre in u = |z|^2, uniform
// azimuth.  Weights are plane-measure units (no Gaussian factor) and sum to
// the disk area.
struct PolarRule {
  std::vector<Complex> nodes;
  std::vector<double> weights;
  int radial_order = 0;
  int azimuthal_order = 0;
  double bulk_radius = 0.0;
};

PolarRule make_polar_rule(int radial_nodes, int azimuthal_nodes, double bulk_radius);

// M[i][j] = int_g e_i conj(e_j) e^{-2|z|^2} dm, over g intersected with the
// bulk disk.  Requires radial >= N+2 and azimuthal >= 2N+1.
spectra::HermitianMatrix fock_gram(const FockSpace& space, const PlanarRegion& g,
                                   const PolarRule& rule);

struct FockNormingResult {
  double norming_constant = 0.0;  // lambda_min(bulk) / lambda_min(g)
  double lambda_min_bulk = 0.0;
  double lambda_min_region = 0.0;
  double leak = 0.0;  // 1 - lambda_min(bulk), the truncation loss
};

FockNormingResult fock_norming_constant(const FockSpace& space, const PlanarRegion& g,
                                        const PolarRule& rule);

}  // namespace cp1lab::fock
