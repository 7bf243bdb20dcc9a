#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cp1lab/fock.hpp"
#include "cp1lab/spectra.hpp"

namespace cp1lab::xp {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCsvHeader =
    "command,k,R,eps,delta,inf_ratio,lambda_min,lambda_max,norming_constant,"
    "carleson_constant,berezin_sup,ball_mass_sup,tail_mass,leak,seed,quad_radial,"
    "quad_azimuthal,config_digest,version";

struct QuadOrders {
  int radial = 128;
  int azimuthal = 256;
};

struct SweepSpec {
  std::string inner;            // command to run per value
  std::string param;            // "R" | "eps" | "delta"
  std::vector<double> values;
};

// A fully resolved run description.  Identical configs give byte-identical
// output files at thread count 1.
struct ExperimentConfig {
  std::string command;
  std::vector<int> k_list;
  double R = 2.0;
  double eps = 0.1;
  std::optional<double> delta;
  std::optional<json> region;
  std::optional<json> measure;
  QuadOrders quad;
  int probe_count = 0;  // 0 = scale with k
  std::uint64_t seed = 0;
  std::string output_path;  // empty = stdout
  std::string format = "csv";
  int threads = 1;
  bool dry_run = false;
  std::optional<SweepSpec> sweep;
};

// Parses and validates a merged config document.
ExperimentConfig parse_config(const json& doc);

json canonical_json(const ExperimentConfig& config);
std::string config_digest(const ExperimentConfig& config);

// Tiny arithmetic expression grammar for region templates: numbers, the
// substituted tokens {k} and {delta}, + - * /, sqrt, parentheses.
double eval_expr(const std::string& text);

// Walks the document; strings containing {k} or {delta} are substituted and
// evaluated to numbers.
json expand_template(const json& doc, int k, std::optional<double> delta);

struct ResultRow {
  std::string command;
  int k = 0;
  std::optional<double> R, eps, delta;
  std::optional<double> inf_ratio;
  std::optional<double> lambda_min, lambda_max;
  std::optional<double> norming_constant, carleson_constant;
  std::optional<double> berezin_sup, ball_mass_sup;
  std::optional<double> tail_mass, leak;
  std::uint64_t seed = 0;
  int quad_radial = 0;
  int quad_azimuthal = 0;
  std::string config_digest;
  std::string version = kVersion;
};

std::vector<ResultRow> run(const ExperimentConfig& config);

enum class OutputFormat { Csv, Json };

void write_output(std::span<const ResultRow> rows, std::ostream& out, OutputFormat format);
void write_output(std::span<const ResultRow> rows, const std::string& path, OutputFormat format);

std::string format_significant(double v);  // 12 significant digits, "inf" literal

}  // namespace cp1lab::xp
