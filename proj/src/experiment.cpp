#include "cp1lab/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <sstream>

namespace cp1lab::xp {

namespace {

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds = {"density",  "norming", "carleson",
                                                "berezin",  "peak",    "lemma32",
                                                "lemma34",  "equivalence", "sweep", "fock"};
  return cmds;
}

bool is_known_command(const std::string& c) {
  const auto& cmds = known_commands();
  return std::find(cmds.begin(), cmds.end(), c) != cmds.end();
}

}  // namespace

// ---------------------------------------------------------------------------
// Expression grammar

namespace {

struct ExprParser {
  const std::string& text;
  std::size_t pos = 0;

  explicit ExprParser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(text, msg); }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  double parse_expr() {
    double v = parse_term();
    for (;;) {
      if (consume('+')) {
        v += parse_term();
      } else if (consume('-')) {
        v -= parse_term();
      } else {
        return v;
      }
    }
  }

  double parse_term() {
    double v = parse_factor();
    for (;;) {
      if (consume('*')) {
        v *= parse_factor();
      } else if (consume('/')) {
        const double d = parse_factor();
        if (d == 0.0) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  double parse_factor() {
    skip_ws();
    if (consume('-')) return -parse_factor();
    if (consume('+')) return parse_factor();
    return parse_primary();
  }

  double parse_primary() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of expression");
    if (text.compare(pos, 4, "sqrt") == 0) {
      pos += 4;
      if (!consume('(')) fail("expected '(' after sqrt");
      const double v = parse_expr();
      if (!consume(')')) fail("expected ')'");
      if (v < 0.0) fail("sqrt of a negative value");
      return std::sqrt(v);
    }
    if (consume('(')) {
      const double v = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return v;
    }
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(text.substr(pos), &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos += used;
      return v;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

double eval_expr(const std::string& text) {
  ExprParser parser(text);
  const double v = parser.parse_expr();
  parser.skip_ws();
  if (parser.pos != text.size()) parser.fail("trailing characters");
  if (!std::isfinite(v)) parser.fail("expression is not finite");
  return v;
}

namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  std::size_t at = 0;
  while ((at = s.find(from, at)) != std::string::npos) {
    s.replace(at, from.size(), to);
    at += to.size();
  }
  return s;
}

std::string number_literal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "(%.17g)", v);
  return buf;
}

}  // namespace

json expand_template(const json& doc, int k, std::optional<double> delta) {
  if (doc.is_object()) {
    json out = json::object();
    for (const auto& [key, value] : doc.items()) out[key] = expand_template(value, k, delta);
    return out;
  }
  if (doc.is_array()) {
    json out = json::array();
    for (const auto& value : doc) out.push_back(expand_template(value, k, delta));
    return out;
  }
  if (doc.is_string()) {
    const std::string s = doc.get<std::string>();
    const bool has_k = s.find("{k}") != std::string::npos;
    const bool has_delta = s.find("{delta}") != std::string::npos;
    if (!has_k && !has_delta) return doc;
    if (has_delta && !delta.has_value()) {
      throw ConfigError("template uses {delta} but no delta is configured");
    }
    std::string expr = replace_all(s, "{k}", number_literal(double(k)));
    if (has_delta) expr = replace_all(expr, "{delta}", number_literal(*delta));
    return json(eval_expr(expr));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Config

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig config;

  if (!doc.contains("command") || !doc.at("command").is_string()) {
    throw ConfigError("config requires a string field 'command'");
  }
  config.command = doc.at("command").get<std::string>();
  if (!is_known_command(config.command)) {
    throw ConfigError("unknown command '" + config.command + "'");
  }

  if (doc.contains("k")) {
    const json& kj = doc.at("k");
    if (kj.is_number_integer()) {
      config.k_list = {kj.get<int>()};
    } else if (kj.is_array()) {
      for (const auto& v : kj) {
        if (!v.is_number_integer()) throw ConfigError("'k' must be an integer or integer array");
        config.k_list.push_back(v.get<int>());
      }
    } else {
      throw ConfigError("'k' must be an integer or integer array");
    }
  }
  if (config.k_list.empty()) throw ConfigError("config requires a nonempty 'k' list");

  if (doc.contains("R")) config.R = doc.at("R").get<double>();
  if (doc.contains("eps")) config.eps = doc.at("eps").get<double>();
  if (doc.contains("delta")) config.delta = doc.at("delta").get<double>();
  if (doc.contains("region")) config.region = doc.at("region");
  if (doc.contains("measure")) config.measure = doc.at("measure");
  if (doc.contains("quad")) {
    const json& q = doc.at("quad");
    if (!q.is_object() || !q.contains("radial") || !q.contains("azimuthal")) {
      throw ConfigError("'quad' must be {\"radial\": n, \"azimuthal\": m}");
    }
    config.quad.radial = q.at("radial").get<int>();
    config.quad.azimuthal = q.at("azimuthal").get<int>();
  }
  if (config.quad.radial < 1 || config.quad.azimuthal < 1) {
    throw ConfigError("quadrature orders must be >= 1");
  }
  if (doc.contains("probes")) config.probe_count = doc.at("probes").get<int>();
  if (config.probe_count < 0) throw ConfigError("'probes' must be >= 0");
  if (doc.contains("seed")) config.seed = std::uint64_t(doc.at("seed").get<std::int64_t>());
  if (doc.contains("out")) config.output_path = doc.at("out").get<std::string>();
  if (doc.contains("format")) config.format = doc.at("format").get<std::string>();
  if (config.format != "csv" && config.format != "json") {
    throw ConfigError("'format' must be \"csv\" or \"json\"");
  }
  if (doc.contains("threads")) config.threads = doc.at("threads").get<int>();
  if (config.threads < 1) throw ConfigError("'threads' must be >= 1");
  if (doc.contains("dry_run")) config.dry_run = doc.at("dry_run").get<bool>();

  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    if (!s.is_object() || !s.contains("inner") || !s.contains("param") || !s.contains("values")) {
      throw ConfigError("'sweep' must be {\"inner\": cmd, \"param\": ..., \"values\": [...]}");
    }
    SweepSpec sweep;
    sweep.inner = s.at("inner").get<std::string>();
    sweep.param = s.at("param").get<std::string>();
    if (!is_known_command(sweep.inner) || sweep.inner == "sweep") {
      throw ConfigError("sweep 'inner' must be a non-sweep command");
    }
    if (sweep.param != "R" && sweep.param != "eps" && sweep.param != "delta") {
      throw ConfigError("sweep 'param' must be R, eps, or delta");
    }
    for (const auto& v : s.at("values")) sweep.values.push_back(v.get<double>());
    if (sweep.values.empty()) throw ConfigError("sweep 'values' must be nonempty");
    config.sweep = std::move(sweep);
  }
  if (config.command == "sweep" && !config.sweep) {
    throw ConfigError("command 'sweep' requires a 'sweep' section");
  }

  // Per-command input requirements.
  const std::string& c = config.command;
  const bool needs_region =
      (c == "density" || c == "norming" || c == "fock" ||
       (c == "equivalence" && !config.measure.has_value()));
  const bool needs_measure = (c == "carleson" || c == "berezin");
  if (needs_region && !config.region.has_value()) {
    throw ConfigError("command '" + c + "' requires a 'region'");
  }
  if (needs_measure && !config.measure.has_value()) {
    throw ConfigError("command '" + c + "' requires a 'measure'");
  }
  if (c == "equivalence" && config.region.has_value() && config.measure.has_value()) {
    throw ConfigError("equivalence takes a region or a measure, not both");
  }
  return config;
}

json canonical_json(const ExperimentConfig& config) {
  json j;
  j["command"] = config.command;
  j["k"] = config.k_list;
  j["R"] = config.R;
  j["eps"] = config.eps;
  if (config.delta) j["delta"] = *config.delta;
  if (config.region) j["region"] = *config.region;
  if (config.measure) j["measure"] = *config.measure;
  j["quad"] = json{{"radial", config.quad.radial}, {"azimuthal", config.quad.azimuthal}};
  j["probes"] = config.probe_count;
  j["seed"] = config.seed;
  j["format"] = config.format;
  if (config.sweep) {
    j["sweep"] = json{{"inner", config.sweep->inner},
                      {"param", config.sweep->param},
                      {"values", config.sweep->values}};
  }
  return j;
}

std::string config_digest(const ExperimentConfig& config) {
  return hex64(fnv1a64(canonical_json(config).dump()));
}

// ---------------------------------------------------------------------------
// Runner

namespace {

using geom::QuadratureRule;
using geom::SpherePoint;
using regions::MeasureSpec;
using regions::Region;

std::vector<SpherePoint> probes_for(const ExperimentConfig& config, int k) {
  const int count = config.probe_count > 0 ? config.probe_count
                                           : regions::default_probe_count(k, config.R);
  return regions::probe_grid(count);
}

void append_atoms(std::vector<SpherePoint>& probes, const MeasureSpec& mu) {
  if (mu.kind() != MeasureSpec::Kind::Atoms) return;
  for (const auto& [point, mass] : mu.atom_list()) {
    (void)mass;
    probes.push_back(point);
  }
}

SplitMix64 per_k_rng(std::uint64_t seed, int k) {
  return SplitMix64(seed ^ (0x9E3779B97F4A7C15ULL * std::uint64_t(k + 1)));
}

ResultRow run_one(const ExperimentConfig& config, const std::string& digest,
                  const QuadratureRule& rule, int k) {
  ResultRow row;
  row.command = config.command;
  row.k = k;
  row.seed = config.seed;
  row.quad_radial = config.quad.radial;
  row.quad_azimuthal = config.quad.azimuthal;
  row.config_digest = digest;
  row.delta = config.delta;

  const std::string& c = config.command;
  if (c == "density") {
    row.R = config.R;
    const Region g = regions::build_region(expand_template(*config.region, k, config.delta));
    const auto probes = probes_for(config, k);
    const auto report = regions::relative_density(g, k, config.R, probes, rule);
    row.inf_ratio = report.inf_ratio;
  } else if (c == "norming") {
    const Region g = regions::build_region(expand_template(*config.region, k, config.delta));
    const auto res = spectra::norming_constant(k, g, rule);
    row.lambda_min = res.lambda_min;
    row.lambda_max = res.lambda_max;
    row.norming_constant = res.norming_constant;
    row.carleson_constant = res.carleson_constant;
  } else if (c == "carleson") {
    const MeasureSpec mu = regions::build_measure(expand_template(*config.measure, k, config.delta));
    const auto res = spectra::carleson_constant(k, mu, rule);
    row.lambda_min = res.lambda_min;
    row.lambda_max = res.lambda_max;
    row.carleson_constant = res.carleson_constant;
    row.norming_constant = res.norming_constant;
  } else if (c == "berezin") {
    const MeasureSpec mu = regions::build_measure(expand_template(*config.measure, k, config.delta));
    auto probes = probes_for(config, k);
    append_atoms(probes, mu);
    row.berezin_sup = spectra::berezin_sup(k, mu, probes, rule);
  } else if (c == "peak") {
    row.R = config.R;
    row.tail_mass = sections::peak_tail_mass(k, geom::origin_point(), config.R, rule);
  } else if (c == "lemma32") {
    row.R = config.R;
    row.eps = config.eps;
    const auto space = sections::make_space(k);
    SplitMix64 rng = per_k_rng(config.seed, k);
    const auto section = sections::random_unit_section(space, rng);
    row.inf_ratio = spectra::exceptional_mass_ratio(k, section, config.R, config.eps, rule);
  } else if (c == "lemma34") {
    row.eps = config.eps;
    row.inf_ratio = spectra::kernel_lower_bound(k, config.eps);
  } else if (c == "equivalence") {
    if (config.region) {
      row.R = config.R;
      const Region g = regions::build_region(expand_template(*config.region, k, config.delta));
      const auto res = spectra::norming_constant(k, g, rule);
      row.lambda_min = res.lambda_min;
      row.lambda_max = res.lambda_max;
      row.norming_constant = res.norming_constant;
      row.carleson_constant = res.carleson_constant;
      const auto probes = probes_for(config, k);
      row.inf_ratio = regions::relative_density(g, k, config.R, probes, rule).inf_ratio;
    } else {
      const MeasureSpec mu =
          regions::build_measure(expand_template(*config.measure, k, config.delta));
      const auto res = spectra::carleson_constant(k, mu, rule);
      row.lambda_min = res.lambda_min;
      row.lambda_max = res.lambda_max;
      row.carleson_constant = res.carleson_constant;
      row.norming_constant = res.norming_constant;
      auto probes = probes_for(config, k);
      append_atoms(probes, mu);
      row.berezin_sup = spectra::berezin_sup(k, mu, probes, rule);
      row.ball_mass_sup = spectra::ball_mass_sup(k, mu, probes, rule);
    }
  } else if (c == "fock") {
    const auto space = fock::fock_space(k);
    const auto planar =
        fock::build_planar_region(expand_template(*config.region, k, config.delta));
    const auto polar = fock::make_polar_rule(std::max(config.quad.radial, k + 2),
                                             std::max(config.quad.azimuthal, 2 * k + 1),
                                             space.bulk_radius > 0.0 ? space.bulk_radius : 1.0);
    const auto res = fock::fock_norming_constant(space, planar, polar);
    row.norming_constant = res.norming_constant;
    row.lambda_min = res.lambda_min_region;
    row.leak = res.leak;
  } else {
    throw ConfigError("run: unsupported command '" + c + "'");
  }
  return row;
}

}  // namespace

std::vector<ResultRow> run(const ExperimentConfig& config) {
  if (config.command == "sweep") {
    std::vector<ResultRow> rows;
    for (double value : config.sweep->values) {
      ExperimentConfig inner = config;
      inner.command = config.sweep->inner;
      inner.sweep.reset();
      if (config.sweep->param == "R") {
        inner.R = value;
      } else if (config.sweep->param == "eps") {
        inner.eps = value;
      } else {
        inner.delta = value;
      }
      auto inner_rows = run(inner);
      for (auto& row : inner_rows) {
        if (config.sweep->param == "R") row.R = value;
        if (config.sweep->param == "eps") row.eps = value;
        if (config.sweep->param == "delta") row.delta = value;
      }
      rows.insert(rows.end(), inner_rows.begin(), inner_rows.end());
    }
    return rows;
  }

  const std::string digest = config_digest(config);
  const QuadratureRule rule =
      (config.command == "fock") ? QuadratureRule{}  // fock builds its own polar rule
                                 : geom::make_quadrature(config.quad.radial, config.quad.azimuthal);

  std::vector<ResultRow> rows(config.k_list.size());
  if (config.threads <= 1 || config.k_list.size() <= 1) {
    for (std::size_t i = 0; i < config.k_list.size(); ++i) {
      rows[i] = run_one(config, digest, rule, config.k_list[i]);
    }
  } else {
    // Entries are independent; results land at their config-order index.
    std::vector<std::future<ResultRow>> futures(config.k_list.size());
    std::size_t next = 0;
    while (next < config.k_list.size()) {
      const std::size_t batch =
          std::min<std::size_t>(std::size_t(config.threads), config.k_list.size() - next);
      for (std::size_t b = 0; b < batch; ++b) {
        const int k = config.k_list[next + b];
        futures[next + b] = std::async(std::launch::async, [&config, &digest, &rule, k] {
          return run_one(config, digest, rule, k);
        });
      }
      for (std::size_t b = 0; b < batch; ++b) rows[next + b] = futures[next + b].get();
      next += batch;
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

std::string format_significant(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::string cell(const std::optional<double>& v) {
  return v.has_value() ? format_significant(*v) : std::string();
}

json json_number_or_inf(double v) {
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

void put(json& j, const char* key, const std::optional<double>& v) {
  if (v.has_value()) j[key] = json_number_or_inf(*v);
}

}  // namespace

void write_output(std::span<const ResultRow> rows, std::ostream& out, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    out << kCsvHeader << "\n";
    for (const auto& r : rows) {
      out << r.command << ',' << r.k << ',' << cell(r.R) << ',' << cell(r.eps) << ','
          << cell(r.delta) << ',' << cell(r.inf_ratio) << ',' << cell(r.lambda_min) << ','
          << cell(r.lambda_max) << ',' << cell(r.norming_constant) << ','
          << cell(r.carleson_constant) << ',' << cell(r.berezin_sup) << ','
          << cell(r.ball_mass_sup) << ',' << cell(r.tail_mass) << ',' << cell(r.leak) << ','
          << r.seed << ',' << r.quad_radial << ',' << r.quad_azimuthal << ',' << r.config_digest
          << ',' << r.version << "\n";
    }
  } else {
    json arr = json::array();
    for (const auto& r : rows) {
      json j;
      j["command"] = r.command;
      j["k"] = r.k;
      put(j, "R", r.R);
      put(j, "eps", r.eps);
      put(j, "delta", r.delta);
      put(j, "inf_ratio", r.inf_ratio);
      put(j, "lambda_min", r.lambda_min);
      put(j, "lambda_max", r.lambda_max);
      put(j, "norming_constant", r.norming_constant);
      put(j, "carleson_constant", r.carleson_constant);
      put(j, "berezin_sup", r.berezin_sup);
      put(j, "ball_mass_sup", r.ball_mass_sup);
      put(j, "tail_mass", r.tail_mass);
      put(j, "leak", r.leak);
      j["seed"] = r.seed;
      j["quad_radial"] = r.quad_radial;
      j["quad_azimuthal"] = r.quad_azimuthal;
      j["config_digest"] = r.config_digest;
      j["version"] = r.version;
      arr.push_back(std::move(j));
    }
    out << arr.dump(2) << "\n";
  }
}

void write_output(std::span<const ResultRow> rows, const std::string& path, OutputFormat format) {
  if (path.empty() || path == "-") {
    write_output(rows, std::cout, format);
    if (!std::cout) throw IoError("write_output: failed writing to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_output: cannot open '" + path + "'");
  write_output(rows, out, format);
  out.flush();
  if (!out) throw IoError("write_output: failed writing '" + path + "'");
}

}  // namespace cp1lab::xp
