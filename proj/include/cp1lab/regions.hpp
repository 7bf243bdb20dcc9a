#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cp1lab/geometry.hpp"

namespace cp1lab::regions {

using geom::FSBall;
using geom::QuadratureRule;
using geom::SpherePoint;
using json = nlohmann::json;

enum class RegionKind { All, Empty, Cap, Band, Union, Intersection, Complement, RandomCaps };

// Composable measurable-set description on CP^1.  Immutable; membership is
// strict-inequality everywhere, so boundaries are null sets.
class Region {
 public:
  static Region all();
  static Region empty();
  static Region cap(const FSBall& ball);
  static Region band(double colat_min, double colat_max);
  static Region union_of(std::vector<Region> members);
  static Region intersection_of(std::vector<Region> members);
  static Region complement(Region inner);
  // Expands eagerly and deterministically into `count` caps with area-uniform
  // centers drawn from the seed.
  static Region random_caps(std::uint64_t seed, int count, double radius);

  bool contains(const SpherePoint& p) const;

  RegionKind kind() const { return kind_; }
  const FSBall& ball() const { return ball_; }
  double colat_min() const { return colat_min_; }
  double colat_max() const { return colat_max_; }
  const std::vector<Region>& members() const { return members_; }
  std::uint64_t seed() const { return seed_; }
  int count() const { return count_; }
  double radius() const { return radius_; }

 private:
  Region() = default;
  RegionKind kind_ = RegionKind::Empty;
  FSBall ball_{};
  double colat_min_ = 0.0, colat_max_ = 0.0;
  std::vector<Region> members_;
  std::uint64_t seed_ = 0;
  int count_ = 0;
  double radius_ = 0.0;
};

double region_volume(const Region& g, const QuadratureRule& rule);

struct DensityReport {
  double inf_ratio = 0.0;
  SpherePoint argmin_probe;
  double R = 0.0;
  int k = 0;
  int probe_count = 0;
};

// inf over probes of V(g intersect B(a, R/sqrt(k))) / V(B(a, R/sqrt(k))).
DensityReport relative_density(const Region& g, int k, double R,
                               std::span<const SpherePoint> probes, const QuadratureRule& rule);

// Near-uniform deterministic probe set (Fibonacci spiral in the s coordinate).
std::vector<SpherePoint> probe_grid(int count);

// Probe count giving at least ~8 probes per ball of radius R/sqrt(k).
int default_probe_count(int k, double R);

// JSON <-> Region per the documented schema.  Parse errors carry the path.
Region build_region(const json& spec);
json region_to_json(const Region& g);

// Point serialization: chart coordinates as [re, im], infinity as "inf".
SpherePoint point_from_json(const json& j, const std::string& path);
json point_to_json(const SpherePoint& p);

// A measure on CP^1: either scale * (volume restricted to a region) or a
// finite atomic measure.
class MeasureSpec {
 public:
  enum class Kind { VolumeOn, Atoms };

  static MeasureSpec volume_on(Region region, double scale);
  static MeasureSpec atoms(std::vector<std::pair<SpherePoint, double>> atoms);

  Kind kind() const { return kind_; }
  const Region& region() const { return region_; }
  double scale() const { return scale_; }
  const std::vector<std::pair<SpherePoint, double>>& atom_list() const { return atoms_; }

  double total_mass(const QuadratureRule& rule) const;

 private:
  MeasureSpec() : region_(Region::empty()) {}
  Kind kind_ = Kind::VolumeOn;
  Region region_;
  double scale_ = 0.0;
  std::vector<std::pair<SpherePoint, double>> atoms_;
};

MeasureSpec build_measure(const json& spec);
json measure_to_json(const MeasureSpec& mu);

}  // namespace cp1lab::regions
