#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "cp1lab/experiment.hpp"

namespace {

using cp1lab::xp::ExperimentConfig;
using json = nlohmann::json;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cp1lab::ConfigError("cannot open config file '" + path + "'");
  json doc;
  in >> doc;
  return doc;
}

// Inline JSON if the argument starts with '{', otherwise a file path.
json load_json_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return json::parse(arg);
  return load_json_file(arg);
}

std::vector<int> parse_k_list(const std::string& text) {
  std::vector<int> ks;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma - start);
    if (!item.empty()) ks.push_back(std::stoi(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (ks.empty()) throw cp1lab::ConfigError("could not parse k list '" + text + "'");
  return ks;
}

struct CliOptions {
  std::string config_path;
  std::string k_text;
  double R = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  std::string quad_text;
  std::string region_arg;
  std::string measure_arg;
  int probes = -1;
  std::int64_t seed = 0;
  std::string out_path;
  std::string format;
  int threads = 0;
  bool dry_run = false;
};

void add_common_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "JSON config file; flags override its fields");
  cmd->add_option("--k", opt.k_text, "comma-separated degree list, e.g. 4,8,16");
  cmd->add_option("--R", opt.R, "ball-scale parameter R (balls of radius R/sqrt(k))");
  cmd->add_option("--eps", opt.eps, "epsilon parameter");
  cmd->add_option("--delta", opt.delta, "density parameter, substituted for {delta}");
  cmd->add_option("--quad", opt.quad_text, "quadrature orders RADIALxAZIMUTHAL, e.g. 128x256");
  cmd->add_option("--region", opt.region_arg, "region spec: inline JSON or a file path");
  cmd->add_option("--measure", opt.measure_arg, "measure spec: inline JSON or a file path");
  cmd->add_option("--probes", opt.probes, "probe count (0 = scale with k)");
  cmd->add_option("--seed", opt.seed, "seed for all randomized pieces");
  cmd->add_option("--out", opt.out_path, "output path ('-' = stdout)");
  cmd->add_option("--format", opt.format, "csv or json");
  cmd->add_option("--threads", opt.threads, "concurrent k-entries (default 1)");
  cmd->add_flag("--dry-run", opt.dry_run, "validate and print the resolved plan, compute nothing");
}

json merge_config(const CLI::App* cmd, const CliOptions& opt, const std::string& command) {
  json doc = opt.config_path.empty() ? json::object() : load_json_file(opt.config_path);
  doc["command"] = command;
  if (cmd->count("--k") > 0) doc["k"] = parse_k_list(opt.k_text);
  if (cmd->count("--R") > 0) doc["R"] = opt.R;
  if (cmd->count("--eps") > 0) doc["eps"] = opt.eps;
  if (cmd->count("--delta") > 0) doc["delta"] = opt.delta;
  if (cmd->count("--quad") > 0) {
    const auto x = opt.quad_text.find('x');
    if (x == std::string::npos) {
      throw cp1lab::ConfigError("--quad expects RADIALxAZIMUTHAL, e.g. 128x256");
    }
    doc["quad"] = json{{"radial", std::stoi(opt.quad_text.substr(0, x))},
                       {"azimuthal", std::stoi(opt.quad_text.substr(x + 1))}};
  }
  if (cmd->count("--region") > 0) doc["region"] = load_json_arg(opt.region_arg);
  if (cmd->count("--measure") > 0) doc["measure"] = load_json_arg(opt.measure_arg);
  if (cmd->count("--probes") > 0) doc["probes"] = opt.probes;
  if (cmd->count("--seed") > 0) doc["seed"] = opt.seed;
  if (cmd->count("--out") > 0) doc["out"] = opt.out_path;
  if (cmd->count("--format") > 0) doc["format"] = opt.format;
  if (cmd->count("--threads") > 0) doc["threads"] = opt.threads;
  if (opt.dry_run) doc["dry_run"] = true;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cp1lab: norming sets and concentration spectra for polynomial "
               "spaces on the projective line"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"density", "relative density of a region at scale R/sqrt(k)"},
      {"norming", "norming constant 1/lambda_min of a region's concentration operator"},
      {"carleson", "Carleson constant lambda_max of a measure"},
      {"berezin", "sup of the Berezin transform of a measure over a probe grid"},
      {"peak", "peak-section tail mass outside B(origin, R/sqrt(k))"},
      {"lemma32", "exceptional-set mass ratio for seeded random sections"},
      {"lemma34", "kernel lower bound M(k, eps) on the eps/sqrt(k) ball"},
      {"equivalence", "norming/density pairs for a region, or Carleson/Berezin/ball-mass "
                      "triples for a measure"},
      {"sweep", "iterate another command over R, eps, or delta values"},
      {"fock", "truncated Fock-space norming constants for planar regions"}};

  std::vector<CliOptions> options(commands.size());
  std::vector<CLI::App*> apps(commands.size());
  for (std::size_t i = 0; i < commands.size(); ++i) {
    apps[i] = app.add_subcommand(commands[i].first, commands[i].second);
    add_common_options(apps[i], options[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (std::size_t i = 0; i < commands.size(); ++i) {
      if (!apps[i]->parsed()) continue;
      const json doc = merge_config(apps[i], options[i], commands[i].first);
      const ExperimentConfig config = cp1lab::xp::parse_config(doc);
      if (config.dry_run) {
        json plan = cp1lab::xp::canonical_json(config);
        plan["config_digest"] = cp1lab::xp::config_digest(config);
        plan["out"] = config.output_path.empty() ? "-" : config.output_path;
        plan["threads"] = config.threads;
        std::cout << plan.dump(2) << "\n";
        return 0;
      }
      const auto rows = cp1lab::xp::run(config);
      const auto format = config.format == "json" ? cp1lab::xp::OutputFormat::Json
                                                  : cp1lab::xp::OutputFormat::Csv;
      cp1lab::xp::write_output(rows, config.output_path, format);
      return 0;
    }
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const cp1lab::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const cp1lab::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const cp1lab::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
