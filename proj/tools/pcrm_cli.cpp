// pcrm: command-line driver for single runs, (R_s, phi) sweeps, strategy
// comparisons and synthetic workload generation.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcrm/config.hpp"
#include "pcrm/experiment.hpp"
#include "pcrm/io.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Common {
  std::string config;
  std::string workload;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::string strategy;
  int jobs = 1;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad value '") + item + "' in " + what);
    }
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + " is empty");
  return out;
}

std::vector<pcrm::StrategyKind> parse_strategies(const std::string& text) {
  std::vector<pcrm::StrategyKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(pcrm::parse_strategy(item));
  if (out.empty()) throw std::invalid_argument("no strategies given");
  return out;
}

struct Loaded {
  pcrm::ExperimentConfig config;
  std::vector<pcrm::TripRequest> workload;
  std::string digest;
};

Loaded load_inputs(const Common& c) {
  Loaded l;
  if (!c.config.empty()) l.config = pcrm::load_config(c.config);
  if (c.seed) l.config.sim.seed = *c.seed;
  if (c.workload.empty()) throw std::invalid_argument("--workload is required");
  if (!fs::exists(c.workload)) throw std::runtime_error("workload file not found: " + c.workload);
  l.digest = pcrm::digest_hex(pcrm::read_file(c.workload));
  if (!c.config.empty()) {
    // A manifest pins the workload it was produced from.
    const auto j = nlohmann::json::parse(pcrm::read_file(c.config), nullptr, false, true);
    if (j.is_object() && j.contains("workload_digest") &&
        j.at("workload_digest").get<std::string>() != l.digest) {
      throw std::runtime_error("workload digest does not match the manifest");
    }
  }
  auto wl = pcrm::ingest_csv(c.workload, l.config.ingest);
  if (wl.skipped_malformed + wl.skipped_outside > 0) {
    std::cerr << "ingested " << wl.requests.size() << " of " << wl.rows << " rows ("
              << wl.skipped_malformed << " malformed, " << wl.skipped_outside
              << " outside window/bbox)\n";
  }
  l.workload = std::move(wl.requests);
  return l;
}

// Members of a run manifest passed as --config, or null.
nlohmann::json manifest_field(const Common& c, const char* key) {
  if (c.config.empty()) return nullptr;
  const auto j = nlohmann::json::parse(pcrm::read_file(c.config), nullptr, false, true);
  if (!j.is_object() || !j.contains("workload_digest") || !j.contains(key)) return nullptr;
  return j.at(key);
}

std::string join(const nlohmann::json& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    if (v.is_string()) {
      out += v.get<std::string>();
    } else {
      std::ostringstream ss;
      ss.precision(17);
      ss << v.get<double>();
      out += ss.str();
    }
  }
  return out;
}

ordered_json manifest(const char* command, const Common& c, const Loaded& l) {
  ordered_json m;
  m["tool"] = "pcrm";
  m["version"] = kVersion;
  m["command"] = command;
  m["config"] = pcrm::to_json(l.config);
  m["workload"] = c.workload;
  m["workload_digest"] = l.digest;
  return m;
}

void write_manifest(const fs::path& dir, const ordered_json& m) {
  pcrm::write_file_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

fs::path prepare_out(const std::string& out) {
  if (out.empty()) throw std::invalid_argument("--out is required");
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out);
  return dir;
}

int cmd_run(Common c, bool format_given) {
  auto l = load_inputs(c);
  if (auto v = manifest_field(c, "format"); !format_given && v.is_string()) c.format = v.get<std::string>();
  if (!c.strategy.empty()) l.config.sim.strategy.kind = pcrm::parse_strategy(c.strategy);
  if (c.format != "csv" && c.format != "json") throw std::invalid_argument("--format must be csv or json");
  const fs::path dir = prepare_out(c.out);
  const auto result = pcrm::run(l.config.sim, l.workload);
  const auto& zone = l.config.sim.strategy.zone;
  if (c.format == "csv") {
    pcrm::write_file_atomic(dir / "report.csv",
                            pcrm::sweep_csv({{zone.r_s, zone.phi, result.report}}));
  } else {
    ordered_json j = pcrm::to_json(result.report);
    j["config"] = pcrm::to_json(l.config);
    pcrm::write_file_atomic(dir / "report.json", j.dump(2) + "\n");
  }
  pcrm::write_file_atomic(dir / "hourly.csv",
                          pcrm::compare_csv({{l.config.sim.strategy.kind, result.report}}));
  auto m = manifest("run", c, l);
  m["format"] = c.format;
  write_manifest(dir, m);
  std::cout << "served " << result.report.served << "/" << result.report.released
            << "  MSI " << result.report.msi << "  SAI " << result.report.sai << "  ICI(mean) "
            << result.report.ici_mean << "  UI " << result.report.ui << "\n";
  return 0;
}

int cmd_sweep(const Common& c, std::string grid_rs, std::string grid_phi, bool rs_given,
              bool phi_given) {
  auto l = load_inputs(c);
  if (auto v = manifest_field(c, "grid_rs"); !rs_given && v.is_array()) grid_rs = join(v);
  if (auto v = manifest_field(c, "grid_phi"); !phi_given && v.is_array()) grid_phi = join(v);
  const auto rs = parse_list(grid_rs, "--grid-rs");
  const auto phi = parse_list(grid_phi, "--grid-phi");
  const fs::path dir = prepare_out(c.out);
  const auto cells = pcrm::run_sweep(l.config.sim, l.workload, rs, phi, c.jobs);
  pcrm::write_file_atomic(dir / "sweep.csv", pcrm::sweep_csv(cells));
  const auto& best = pcrm::argmax_ui(cells);
  ordered_json b = pcrm::to_json(best.report);
  b = ordered_json{{"r_s", best.r_s}, {"phi", best.phi}, {"report", b}};
  pcrm::write_file_atomic(dir / "best.json", b.dump(2) + "\n");
  auto m = manifest("sweep", c, l);
  m["grid_rs"] = rs;
  m["grid_phi"] = phi;
  write_manifest(dir, m);
  std::cout << "best UI " << best.report.ui << " at R_s=" << best.r_s << " phi=" << best.phi
            << "\n";
  return 0;
}

int cmd_compare(const Common& c) {
  auto l = load_inputs(c);
  std::string names_in = c.strategy.empty() ? "pcrm,ddm,og" : c.strategy;
  if (auto v = manifest_field(c, "strategies"); c.strategy.empty() && v.is_array()) names_in = join(v);
  const auto kinds = parse_strategies(names_in);
  const fs::path dir = prepare_out(c.out);
  const auto runs = pcrm::run_compare(l.config.sim, l.workload, kinds, c.jobs);
  pcrm::write_file_atomic(dir / "compare.csv", pcrm::compare_csv(runs));
  ordered_json totals = ordered_json::object();
  for (const auto& r : runs) totals[std::string(pcrm::to_string(r.kind))] = pcrm::to_json(r.report);
  pcrm::write_file_atomic(dir / "totals.json", totals.dump(2) + "\n");
  auto m = manifest("compare", c, l);
  std::vector<std::string> names;
  for (auto k : kinds) names.emplace_back(pcrm::to_string(k));
  m["strategies"] = names;
  write_manifest(dir, m);
  for (const auto& r : runs) {
    std::cout << pcrm::to_string(r.kind) << ": UI " << r.report.ui << "  MSI " << r.report.msi
              << "  SAI " << r.report.sai << "  ICI(mean) " << r.report.ici_mean << "\n";
  }
  return 0;
}

int cmd_gen(const std::string& spec_path, const std::string& run_config, const std::string& out) {
  if (spec_path.empty()) throw std::invalid_argument("--config (synthetic spec) is required");
  if (out.empty()) throw std::invalid_argument("--out is required");
  const auto spec = pcrm::load_spec(spec_path);
  pcrm::IngestOptions ingest;
  if (!run_config.empty()) ingest = pcrm::load_config(run_config).ingest;
  const auto requests = pcrm::generate(spec);
  pcrm::write_workload_csv(out, requests, ingest);
  std::cout << "wrote " << requests.size() << " requests to " << out << "\n";
  return 0;
}

CLI::Option* add_common(CLI::App* sub, Common& c, bool with_format) {
  sub->add_option("--config", c.config, "config file (JSON) or run manifest")->envname("PCRM_CONFIG");
  sub->add_option("--workload", c.workload, "trip-record CSV")->envname("PCRM_WORKLOAD");
  sub->add_option("--out", c.out, "output directory")->envname("PCRM_OUT");
  sub->add_option("--seed", c.seed, "fleet seed override")->envname("PCRM_SEED");
  if (!with_format) return nullptr;
  return sub->add_option("--format", c.format, "csv or json")->envname("PCRM_FORMAT");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polar-coordinate ride-matching simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  std::string grid_rs = "0.5,0.6,0.7,0.8,0.9,1.0";
  std::string grid_phi = "45,60,75,90";
  std::string run_config;

  auto* run = app.add_subcommand("run", "simulate one configuration");
  auto* format_opt = add_common(run, common, true);
  run->add_option("--strategy", common.strategy, "pcrm, ddm or og")->envname("PCRM_STRATEGY");

  auto* sweep = app.add_subcommand("sweep", "PCRM over an (R_s, phi) grid");
  add_common(sweep, common, false);
  auto* rs_opt = sweep->add_option("--grid-rs", grid_rs, "comma-separated R_s values (km)")
                     ->envname("PCRM_GRID_RS");
  auto* phi_opt = sweep->add_option("--grid-phi", grid_phi, "comma-separated phi values (degrees)")
                      ->envname("PCRM_GRID_PHI");
  sweep->add_option("--jobs", common.jobs, "parallel runs")->envname("PCRM_JOBS");

  auto* compare = app.add_subcommand("compare", "run several strategies on one workload");
  add_common(compare, common, false);
  compare->add_option("--strategy", common.strategy, "comma-separated strategies")
      ->envname("PCRM_STRATEGY");
  compare->add_option("--jobs", common.jobs, "parallel runs")->envname("PCRM_JOBS");

  auto* gen = app.add_subcommand("gen", "write a synthetic workload CSV");
  gen->add_option("--config", common.config, "synthetic workload spec (JSON)")->envname("PCRM_CONFIG");
  gen->add_option("--run-config", run_config, "run config whose ingest settings to target");
  gen->add_option("--out", common.out, "output CSV path")->envname("PCRM_OUT");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(common, format_opt->count() > 0);
    if (sweep->parsed()) {
      return cmd_sweep(common, grid_rs, grid_phi, rs_opt->count() > 0, phi_opt->count() > 0);
    }
    if (compare->parsed()) return cmd_compare(common);
    if (gen->parsed()) return cmd_gen(common.config, run_config, common.out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
