#include "cp1lab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cp1lab::spectra {

namespace {

constexpr double kLambdaFloor = 1e-12;

// Accumulates w * b b^dagger into per-entry compensated sums over the full
// matrix; the Hermitian asymmetry check below then covers the assembly.
struct GramAccumulator {
  int dim;
  std::vector<KahanComplex> acc;

  explicit GramAccumulator(int d) : dim(d), acc(std::size_t(d) * std::size_t(d)) {}

  void add(std::span<const Complex> b, double w) {
    for (int i = 0; i < dim; ++i) {
      const Complex bi = b[std::size_t(i)] * w;
      KahanComplex* row = &acc[std::size_t(i) * std::size_t(dim)];
      for (int j = 0; j < dim; ++j) {
        row[j].add(bi * std::conj(b[std::size_t(j)]));
      }
    }
  }

  HermitianMatrix finish() const {
    HermitianMatrix m;
    m.dim = dim;
    m.entries.resize(std::size_t(dim) * std::size_t(dim));
    for (std::size_t i = 0; i < m.entries.size(); ++i) m.entries[i] = acc[i].value();
    // Assembly must be Hermitian to roundoff before exact symmetrization.
    double max_asym = 0.0;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j <= i; ++j) {
        max_asym = std::max(max_asym, std::abs(m.at(i, j) - std::conj(m.at(j, i))));
      }
    }
    if (max_asym >= 1e-12) {
      throw NumericalError("gram_matrix: assembled matrix is not Hermitian, asymmetry " +
                           std::to_string(max_asym));
    }
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < i; ++j) {
        const Complex v = 0.5 * (m.at(i, j) + std::conj(m.at(j, i)));
        m.at(i, j) = v;
        m.at(j, i) = std::conj(v);
      }
      m.at(i, i) = Complex(m.at(i, i).real(), 0.0);
    }
    return m;
  }
};

}  // namespace

HermitianMatrix gram_matrix(int k, const MeasureSpec& mu, const QuadratureRule& rule) {
  const sections::SectionSpace space = sections::make_space(k);
  const int dim = space.dimension;
  GramAccumulator acc(dim);
  std::vector<Complex> b(static_cast<std::size_t>(dim));

  if (mu.kind() == MeasureSpec::Kind::VolumeOn) {
    const Region& g = mu.region();
    const double scale = mu.scale();
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      if (!g.contains(rule.nodes[i])) continue;
      sections::basis_values(space, rule.nodes[i], b);
      acc.add(b, scale * rule.weights[i]);
    }
  } else {
    for (const auto& [point, mass] : mu.atom_list()) {
      sections::basis_values(space, point, b);
      acc.add(b, mass);
    }
  }
  return acc.finish();
}

EigenResult eigh(const HermitianMatrix& m) {
  const int n = m.dim;
  if (n < 1 || n > 512) throw ConfigError("eigh: dimension must lie in [1, 512]");
  HermitianMatrix a = m;

  const double rel_tol = 1e-15;
  constexpr int kMaxSweeps = 64;
  int sweeps = 0;
  bool converged = (n == 1);

  auto threshold = [&](int p, int q) {
    return rel_tol * std::sqrt(std::abs(a.at(p, p).real()) * std::abs(a.at(q, q).real()));
  };

  while (!converged && sweeps < kMaxSweeps) {
    ++sweeps;
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Complex apq = a.at(p, q);
        const double g = std::abs(apq);
        if (g == 0.0 || g <= threshold(p, q)) continue;
        rotated = true;

        const Complex phase = apq / g;
        const double app = a.at(p, p).real();
        const double aqq = a.at(q, q).real();
        const double tau = (aqq - app) / (2.0 * g);
        double t;
        if (tau >= 0.0) {
          t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        } else {
          t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // A <- J^H A J with J = [[c, s*phase_bar...]]; phase folded so the
        // 2x2 block becomes real before the real rotation.
        const Complex sp = s * std::conj(phase);  // multiplies column p updates
        // Right-multiply by J: columns p and q.
        for (int r = 0; r < n; ++r) {
          const Complex arp = a.at(r, p);
          const Complex arq = a.at(r, q);
          a.at(r, p) = c * arp - sp * arq;
          a.at(r, q) = s * arp + c * std::conj(phase) * arq;
        }
        // Left-multiply by J^H: rows p and q.
        for (int col = 0; col < n; ++col) {
          const Complex apc = a.at(p, col);
          const Complex aqc = a.at(q, col);
          a.at(p, col) = c * apc - s * phase * aqc;
          a.at(q, col) = s * apc + c * phase * aqc;
        }
        // Closed forms for the rotated block.
        a.at(p, p) = Complex(app - t * g, 0.0);
        a.at(q, q) = Complex(aqq + t * g, 0.0);
        a.at(p, q) = Complex(0.0, 0.0);
        a.at(q, p) = Complex(0.0, 0.0);
      }
    }
    if (!rotated) converged = true;
  }

  double residual = 0.0;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (p != q) residual = std::max(residual, std::abs(a.at(p, q)));
    }
  }
  if (!converged) {
    throw NumericalError("eigh: no convergence after 64 sweeps, off-diagonal residual " +
                         std::to_string(residual));
  }

  EigenResult result;
  result.eigenvalues.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) result.eigenvalues[std::size_t(i)] = a.at(i, i).real();
  std::sort(result.eigenvalues.begin(), result.eigenvalues.end());
  result.max_offdiag_residual = residual;
  result.sweeps = sweeps;
  return result;
}

namespace {

ConcentrationResult concentration_from(int k, MeasureSpec mu, const QuadratureRule& rule) {
  const HermitianMatrix gram = gram_matrix(k, mu, rule);
  const EigenResult eig = eigh(gram);
  ConcentrationResult res;
  res.k = k;
  res.measure = std::move(mu);
  res.lambda_min = eig.eigenvalues.front();
  res.lambda_max = eig.eigenvalues.back();
  res.carleson_constant = res.lambda_max;
  res.norming_constant = (res.lambda_min <= kLambdaFloor)
                             ? std::numeric_limits<double>::infinity()
                             : 1.0 / res.lambda_min;
  return res;
}

}  // namespace

ConcentrationResult norming_constant(int k, const Region& g, const QuadratureRule& rule) {
  return concentration_from(k, MeasureSpec::volume_on(g, 1.0), rule);
}

ConcentrationResult carleson_constant(int k, const MeasureSpec& mu, const QuadratureRule& rule) {
  return concentration_from(k, mu, rule);
}

double berezin_transform(int k, const MeasureSpec& mu, const SpherePoint& z,
                         const QuadratureRule& rule) {
  // |Pi(w,z)|^2 / |Pi(z,z)| = ((k+1)/pi) |<w,z>|^(2k)
  const double diag = sections::kernel_diagonal(k);
  auto normalized_kernel_sq = [&](const SpherePoint& w) {
    const double m = std::clamp(std::abs(geom::herm_inner(w, z)), 0.0, 1.0);
    return diag * ipow(m * m, k);
  };
  KahanSum acc;
  if (mu.kind() == MeasureSpec::Kind::VolumeOn) {
    const Region& g = mu.region();
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      if (!g.contains(rule.nodes[i])) continue;
      acc.add(mu.scale() * rule.weights[i] * normalized_kernel_sq(rule.nodes[i]));
    }
  } else {
    for (const auto& [point, mass] : mu.atom_list()) {
      acc.add(mass * normalized_kernel_sq(point));
    }
  }
  return acc.value();
}

namespace {

// Flattens a measure against a rule into weighted support points, evaluating
// region membership once instead of once per probe.
std::vector<std::pair<SpherePoint, double>> weighted_support(const MeasureSpec& mu,
                                                             const QuadratureRule& rule) {
  std::vector<std::pair<SpherePoint, double>> support;
  if (mu.kind() == MeasureSpec::Kind::Atoms) {
    support = mu.atom_list();
  } else {
    const Region& g = mu.region();
    support.reserve(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      if (g.contains(rule.nodes[i])) {
        support.emplace_back(rule.nodes[i], mu.scale() * rule.weights[i]);
      }
    }
  }
  return support;
}

}  // namespace

double berezin_sup(int k, const MeasureSpec& mu, std::span<const SpherePoint> probes,
                   const QuadratureRule& rule) {
  if (probes.empty()) throw ConfigError("berezin_sup: probe set must be nonempty");
  const auto support = weighted_support(mu, rule);
  const double diag = sections::kernel_diagonal(k);
  double sup = 0.0;
  for (const SpherePoint& z : probes) {
    KahanSum acc;
    for (const auto& [w, weight] : support) {
      const double m2 = std::clamp(std::norm(geom::herm_inner(w, z)), 0.0, 1.0);
      acc.add(weight * diag * ipow(m2, k));
    }
    sup = std::max(sup, acc.value());
  }
  return sup;
}

double measure_ball_mass(const MeasureSpec& mu, const SpherePoint& center, double r,
                         const QuadratureRule& rule) {
  KahanSum acc;
  if (mu.kind() == MeasureSpec::Kind::VolumeOn) {
    const Region& g = mu.region();
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      if (g.contains(rule.nodes[i]) && geom::fs_distance(rule.nodes[i], center) < r) {
        acc.add(mu.scale() * rule.weights[i]);
      }
    }
  } else {
    for (const auto& [point, mass] : mu.atom_list()) {
      if (geom::fs_distance(point, center) < r) acc.add(mass);
    }
  }
  return acc.value();
}

double ball_mass_sup(int k, const MeasureSpec& mu, std::span<const SpherePoint> probes,
                     const QuadratureRule& rule) {
  if (probes.empty()) throw ConfigError("ball_mass_sup: probe set must be nonempty");
  if (k < 1) throw DomainError("ball_mass_sup: k must be >= 1");
  const double r = 1.0 / std::sqrt(double(k));
  if (!(r <= kPi / 2)) throw DomainError("ball_mass_sup: 1/sqrt(k) exceeds pi/2");
  const auto support = weighted_support(mu, rule);
  double sup = 0.0;
  for (const SpherePoint& z : probes) {
    KahanSum acc;
    for (const auto& [w, weight] : support) {
      if (geom::fs_distance(w, z) < r) acc.add(weight);
    }
    sup = std::max(sup, double(k) * acc.value());
  }
  return sup;
}

double kernel_lower_bound(int k, double eps) {
  if (k < 1) throw DomainError("kernel_lower_bound: k must be >= 1");
  if (eps < 0.0) throw DomainError("kernel_lower_bound: eps must be >= 0");
  const double r = eps / std::sqrt(double(k));
  if (!(r <= kPi / 2)) throw DomainError("kernel_lower_bound: eps/sqrt(k) exceeds pi/2");
  const double c = std::cos(r);
  return (double(k + 1) / (kPi * double(k))) * ipow(c * c, k);
}

double exceptional_mass_ratio(int k, const sections::Section& s, double R, double eps,
                              const QuadratureRule& rule) {
  if (k < 1) throw DomainError("exceptional_mass_ratio: k must be >= 1");
  if (!(eps > 0.0)) throw DomainError("exceptional_mass_ratio: eps must be > 0");
  const double r = R / std::sqrt(double(k));
  if (!(r > 0.0 && r <= kPi / 2)) {
    throw DomainError("exceptional_mass_ratio: R/sqrt(k) must lie in (0, pi/2]");
  }
  const double norm_sq = s.norm_sq();
  if (!(norm_sq > 0.0)) throw DomainError("exceptional_mass_ratio: section must be nonzero");

  // Fixed coarse inner rule on the cap at the origin, rotated to each center.
  constexpr int kInnerRadial = 32;
  constexpr int kInnerAzimuthal = 64;
  const std::size_t inner_nodes = std::size_t(kInnerRadial) * std::size_t(kInnerAzimuthal);
  if (rule.nodes.size() * inner_nodes > 200'000'000ULL) {
    throw ConfigError(
        "exceptional_mass_ratio: nested-integration budget exceeded; use a coarser outer rule");
  }

  const sections::SectionSpace space = sections::make_space(k);
  const double s_r = std::sin(r) * std::sin(r);
  std::vector<double> gl_nodes, gl_weights;
  geom::gauss_legendre_01(kInnerRadial, gl_nodes, gl_weights);

  // Precompute cap nodes in origin-centered coordinates; weights sum to V(B).
  std::vector<SpherePoint> cap_nodes;
  std::vector<double> cap_weights;
  cap_nodes.reserve(inner_nodes);
  cap_weights.reserve(inner_nodes);
  for (int i = 0; i < kInnerRadial; ++i) {
    const double sv = s_r * gl_nodes[std::size_t(i)];
    const double w = kPi * s_r * gl_weights[std::size_t(i)] / double(kInnerAzimuthal);
    const double mag = std::sqrt(sv);
    for (int j = 0; j < kInnerAzimuthal; ++j) {
      const double theta = 2.0 * kPi * double(j) / double(kInnerAzimuthal);
      cap_nodes.push_back(SpherePoint{Complex(std::sqrt(1.0 - sv), 0.0),
                                      Complex(mag * std::cos(theta), mag * std::sin(theta))});
      cap_weights.push_back(w);
    }
  }
  const double ball_vol = geom::ball_volume(r);

  std::vector<Complex> scratch(std::size_t(k) + 1);
  auto ball_average = [&](const SpherePoint& center) {
    // The rotated representative of a unit vector under a unitary is already
    // normalized; skip the renormalizing constructor in this hot loop.
    const geom::Unitary u = geom::unitary_origin_to(center);
    KahanSum acc;
    for (std::size_t i = 0; i < cap_nodes.size(); ++i) {
      const SpherePoint& node = cap_nodes[i];
      const SpherePoint rotated{u.u00 * node.z0 + u.u01 * node.z1,
                                u.u10 * node.z0 + u.u11 * node.z1};
      acc.add(cap_weights[i] * eval_pointnorm(space, s, rotated, scratch));
    }
    return acc.value() / ball_vol;
  };

  KahanSum exceptional_mass;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const SpherePoint& a = rule.nodes[i];
    const double point_value = eval_pointnorm(space, s, a, scratch);
    if (point_value < eps * ball_average(a)) {
      exceptional_mass.add(rule.weights[i] * point_value);
    }
  }
  return exceptional_mass.value() / (eps * norm_sq);
}

std::string measure_digest(const MeasureSpec& mu) {
  return hex64(fnv1a64(regions::measure_to_json(mu).dump()));
}

nlohmann::json result_to_json(const ConcentrationResult& res, double berezin_sup_value,
                              double ball_mass_sup_value, const QuadratureRule& rule,
                              std::uint64_t seed) {
  auto number_or_inf = [](double v) -> nlohmann::json {
    if (std::isinf(v)) return nlohmann::json("inf");
    return nlohmann::json(v);
  };
  nlohmann::json j{{"k", res.k},
                   {"measure_digest", measure_digest(res.measure)},
                   {"lambda_min", number_or_inf(res.lambda_min)},
                   {"lambda_max", number_or_inf(res.lambda_max)},
                   {"norming_constant", number_or_inf(res.norming_constant)},
                   {"carleson_constant", number_or_inf(res.carleson_constant)},
                   {"quad_radial", rule.radial_order},
                   {"quad_azimuthal", rule.azimuthal_order},
                   {"seed", seed}};
  if (!std::isnan(berezin_sup_value)) j["berezin_sup"] = number_or_inf(berezin_sup_value);
  if (!std::isnan(ball_mass_sup_value)) j["ball_mass_sup"] = number_or_inf(ball_mass_sup_value);
  return j;
}

}  // namespace cp1lab::spectra
