#include "cp1lab/regions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cp1lab::regions {

Region Region::all() {
  Region g;
  g.kind_ = RegionKind::All;
  return g;
}

Region Region::empty() {
  Region g;
  g.kind_ = RegionKind::Empty;
  return g;
}

Region Region::cap(const FSBall& ball) {
  if (!(ball.radius > 0.0 && ball.radius <= kPi / 2)) {
    throw DomainError("cap radius must lie in (0, pi/2], got " + std::to_string(ball.radius));
  }
  Region g;
  g.kind_ = RegionKind::Cap;
  g.ball_ = ball;
  return g;
}

Region Region::band(double colat_min, double colat_max) {
  if (!(colat_min >= 0.0 && colat_min < colat_max && colat_max <= kPi / 2)) {
    throw DomainError("band requires 0 <= colat_min < colat_max <= pi/2");
  }
  Region g;
  g.kind_ = RegionKind::Band;
  g.colat_min_ = colat_min;
  g.colat_max_ = colat_max;
  return g;
}

Region Region::union_of(std::vector<Region> members) {
  Region g;
  g.kind_ = RegionKind::Union;
  g.members_ = std::move(members);
  return g;
}

Region Region::intersection_of(std::vector<Region> members) {
  Region g;
  g.kind_ = RegionKind::Intersection;
  g.members_ = std::move(members);
  return g;
}

Region Region::complement(Region inner) {
  Region g;
  g.kind_ = RegionKind::Complement;
  g.members_.push_back(std::move(inner));
  return g;
}

Region Region::random_caps(std::uint64_t seed, int count, double radius) {
  if (count < 0) throw DomainError("random_caps: count must be >= 0");
  if (!(radius > 0.0 && radius <= kPi / 2)) {
    throw DomainError("random_caps: radius must lie in (0, pi/2]");
  }
  Region g;
  g.kind_ = RegionKind::RandomCaps;
  g.seed_ = seed;
  g.count_ = count;
  g.radius_ = radius;
  SplitMix64 rng(seed);
  g.members_.reserve(std::size_t(count));
  for (int i = 0; i < count; ++i) {
    g.members_.push_back(Region::cap(FSBall{geom::random_point(rng), radius}));
  }
  return g;
}

bool Region::contains(const SpherePoint& p) const {
  switch (kind_) {
    case RegionKind::All:
      return true;
    case RegionKind::Empty:
      return false;
    case RegionKind::Cap:
      return geom::fs_distance(ball_.center, p) < ball_.radius;
    case RegionKind::Band: {
      const double t = geom::colatitude(p);
      return colat_min_ < t && t < colat_max_;
    }
    case RegionKind::Union:
    case RegionKind::RandomCaps:
      for (const auto& m : members_) {
        if (m.contains(p)) return true;
      }
      return false;
    case RegionKind::Intersection:
      for (const auto& m : members_) {
        if (!m.contains(p)) return false;
      }
      return true;
    case RegionKind::Complement:
      return !members_.front().contains(p);
  }
  return false;
}

double region_volume(const Region& g, const QuadratureRule& rule) {
  return geom::integrate([&g](const SpherePoint& p) { return g.contains(p) ? 1.0 : 0.0; }, rule);
}

DensityReport relative_density(const Region& g, int k, double R,
                               std::span<const SpherePoint> probes, const QuadratureRule& rule) {
  if (probes.empty()) throw ConfigError("relative_density: probe set must be nonempty");
  if (k < 1) throw ConfigError("relative_density: k must be >= 1");
  const double r = R / std::sqrt(double(k));
  if (!(r > 0.0 && r <= kPi / 2)) {
    throw DomainError("relative_density: R/sqrt(k) must lie in (0, pi/2]");
  }
  const double ball_vol = geom::ball_volume(r);

  // Region membership is probe-independent; evaluate it once per node.
  std::vector<char> in_region(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    in_region[i] = g.contains(rule.nodes[i]) ? 1 : 0;
  }

  DensityReport report;
  report.R = R;
  report.k = k;
  report.probe_count = int(probes.size());
  report.inf_ratio = 2.0;  // above any attainable ratio
  for (const SpherePoint& probe : probes) {
    KahanSum acc;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      if (in_region[i] && geom::fs_distance(rule.nodes[i], probe) < r) {
        acc.add(rule.weights[i]);
      }
    }
    const double ratio = acc.value() / ball_vol;
    if (ratio < report.inf_ratio) {
      report.inf_ratio = ratio;
      report.argmin_probe = probe;
    }
  }
  return report;
}

std::vector<SpherePoint> probe_grid(int count) {
  if (count < 1) throw ConfigError("probe_grid: count must be >= 1");
  std::vector<SpherePoint> pts;
  pts.reserve(std::size_t(count));
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < count; ++i) {
    const double s = (double(i) + 0.5) / double(count);
    const double frac = std::fmod(double(i) * golden, 1.0);
    const double theta = 2.0 * kPi * frac;
    const double m = std::sqrt(s);
    pts.push_back(SpherePoint{geom::Complex(std::sqrt(1.0 - s), 0.0),
                              geom::Complex(m * std::cos(theta), m * std::sin(theta))});
  }
  return pts;
}

int default_probe_count(int k, double R) {
  const double per_ball = 8.0 * double(k) / (R * R);
  return std::max(200, int(std::ceil(per_ball)));
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ParseError(path, msg);
}

double require_number(const json& j, const std::string& path, const char* field) {
  if (!j.contains(field)) fail(path, std::string("missing field '") + field + "'");
  const json& v = j.at(field);
  if (!v.is_number()) fail(path + "/" + field, "expected a number");
  return v.get<double>();
}

std::int64_t require_integer(const json& j, const std::string& path, const char* field) {
  if (!j.contains(field)) fail(path, std::string("missing field '") + field + "'");
  const json& v = j.at(field);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    fail(path + "/" + field, "expected an integer");
  }
  return v.get<std::int64_t>();
}

Region build_region_impl(const json& spec, const std::string& path) {
  if (!spec.is_object()) fail(path, "region spec must be a JSON object");
  if (!spec.contains("type")) fail(path, "missing field 'type'");
  if (!spec.at("type").is_string()) fail(path + "/type", "expected a string");
  const std::string type = spec.at("type").get<std::string>();

  if (type == "all") return Region::all();
  if (type == "empty") return Region::empty();
  if (type == "cap") {
    if (!spec.contains("center")) fail(path, "missing field 'center'");
    const SpherePoint center = point_from_json(spec.at("center"), path + "/center");
    const double radius = require_number(spec, path, "radius");
    return Region::cap(FSBall{center, radius});
  }
  if (type == "band") {
    return Region::band(require_number(spec, path, "colat_min"),
                        require_number(spec, path, "colat_max"));
  }
  if (type == "union" || type == "intersection") {
    if (!spec.contains("members") || !spec.at("members").is_array()) {
      fail(path, "missing array field 'members'");
    }
    std::vector<Region> members;
    const json& arr = spec.at("members");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      members.push_back(build_region_impl(arr[i], path + "/members/" + std::to_string(i)));
    }
    return type == "union" ? Region::union_of(std::move(members))
                           : Region::intersection_of(std::move(members));
  }
  if (type == "complement") {
    if (!spec.contains("of")) fail(path, "missing field 'of'");
    return Region::complement(build_region_impl(spec.at("of"), path + "/of"));
  }
  if (type == "random_caps") {
    const std::int64_t seed = require_integer(spec, path, "seed");
    const std::int64_t count = require_integer(spec, path, "count");
    const double radius = require_number(spec, path, "radius");
    if (count < 0) fail(path + "/count", "count must be >= 0");
    return Region::random_caps(std::uint64_t(seed), int(count), radius);
  }
  fail(path + "/type", "unknown region type '" + type + "'");
}

}  // namespace

SpherePoint point_from_json(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return geom::infinity_point();
    fail(path, "expected [re, im] or the string \"inf\"");
  }
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(path, "expected [re, im] or the string \"inf\"");
  }
  return geom::chart_point(geom::Complex(j[0].get<double>(), j[1].get<double>()));
}

json point_to_json(const SpherePoint& p) {
  if (p.is_infinity()) return json("inf");
  const geom::Complex z = *p.chart();
  return json::array({z.real(), z.imag()});
}

Region build_region(const json& spec) { return build_region_impl(spec, ""); }

json region_to_json(const Region& g) {
  json j;
  switch (g.kind()) {
    case RegionKind::All:
      j["type"] = "all";
      break;
    case RegionKind::Empty:
      j["type"] = "empty";
      break;
    case RegionKind::Cap:
      j["type"] = "cap";
      j["center"] = point_to_json(g.ball().center);
      j["radius"] = g.ball().radius;
      break;
    case RegionKind::Band:
      j["type"] = "band";
      j["colat_min"] = g.colat_min();
      j["colat_max"] = g.colat_max();
      break;
    case RegionKind::Union:
    case RegionKind::Intersection: {
      j["type"] = g.kind() == RegionKind::Union ? "union" : "intersection";
      json arr = json::array();
      for (const auto& m : g.members()) arr.push_back(region_to_json(m));
      j["members"] = std::move(arr);
      break;
    }
    case RegionKind::Complement:
      j["type"] = "complement";
      j["of"] = region_to_json(g.members().front());
      break;
    case RegionKind::RandomCaps:
      j["type"] = "random_caps";
      j["seed"] = g.seed();
      j["count"] = g.count();
      j["radius"] = g.radius();
      break;
  }
  return j;
}

MeasureSpec MeasureSpec::volume_on(Region region, double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw DomainError("volume_on: scale must be finite and >= 0");
  }
  MeasureSpec mu;
  mu.kind_ = Kind::VolumeOn;
  mu.region_ = std::move(region);
  mu.scale_ = scale;
  return mu;
}

MeasureSpec MeasureSpec::atoms(std::vector<std::pair<SpherePoint, double>> atoms) {
  for (const auto& [point, mass] : atoms) {
    (void)point;
    if (!(mass >= 0.0) || !std::isfinite(mass)) {
      throw DomainError("atoms: masses must be finite and >= 0");
    }
  }
  MeasureSpec mu;
  mu.kind_ = Kind::Atoms;
  mu.atoms_ = std::move(atoms);
  return mu;
}

double MeasureSpec::total_mass(const QuadratureRule& rule) const {
  if (kind_ == Kind::Atoms) {
    KahanSum acc;
    for (const auto& [point, mass] : atoms_) {
      (void)point;
      acc.add(mass);
    }
    return acc.value();
  }
  return scale_ * region_volume(region_, rule);
}

MeasureSpec build_measure(const json& spec) {
  const std::string path;
  if (!spec.is_object()) throw ParseError(path, "measure spec must be a JSON object");
  if (!spec.contains("type") || !spec.at("type").is_string()) {
    throw ParseError(path, "missing string field 'type'");
  }
  const std::string type = spec.at("type").get<std::string>();
  if (type == "volume_on") {
    if (!spec.contains("region")) throw ParseError(path, "missing field 'region'");
    const double scale = spec.contains("scale") ? spec.at("scale").get<double>() : 1.0;
    return MeasureSpec::volume_on(build_region(spec.at("region")), scale);
  }
  if (type == "atoms") {
    if (!spec.contains("atoms") || !spec.at("atoms").is_array()) {
      throw ParseError(path, "missing array field 'atoms'");
    }
    std::vector<std::pair<SpherePoint, double>> atoms;
    const json& arr = spec.at("atoms");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string apath = "/atoms/" + std::to_string(i);
      if (!arr[i].is_object() || !arr[i].contains("point") || !arr[i].contains("mass")) {
        throw ParseError(apath, "expected {\"point\": ..., \"mass\": ...}");
      }
      atoms.emplace_back(point_from_json(arr[i].at("point"), apath + "/point"),
                         arr[i].at("mass").get<double>());
    }
    return MeasureSpec::atoms(std::move(atoms));
  }
  throw ParseError("/type", "unknown measure type '" + type + "'");
}

json measure_to_json(const MeasureSpec& mu) {
  json j;
  if (mu.kind() == MeasureSpec::Kind::VolumeOn) {
    j["type"] = "volume_on";
    j["region"] = region_to_json(mu.region());
    j["scale"] = mu.scale();
  } else {
    j["type"] = "atoms";
    json arr = json::array();
    for (const auto& [point, mass] : mu.atom_list()) {
      arr.push_back(json{{"point", point_to_json(point)}, {"mass", mass}});
    }
    j["atoms"] = std::move(arr);
  }
  return j;
}

}  // namespace cp1lab::regions
