#include "selpol/cache.hpp"
#include "selpol/config.hpp"
#include "selpol/errors.hpp"
#include "selpol/experiments.hpp"
#include "selpol/scenario_io.hpp"
#include "selpol/serialization.hpp"

#include "CLI11.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = "selpol-output";
  std::string levels_path;
  std::vector<std::string> targets;
  std::string contrast;
  int grid_points = 0;
  int threads = 0;
  bool no_cache = false;
  std::string scenario;
};

void warn(const std::string& message) { fmt::print(stderr, "warning: {}\n", message); }

selpol::ScenarioConfig load_config(const Options& opt) {
  selpol::ScenarioConfig config = opt.config_path.empty() ? selpol::config_from_json(json::object())
                                                          : selpol::parse_config(opt.config_path);
  if (opt.grid_points != 0) config.grid.n_points = opt.grid_points;
  if (!opt.targets.empty()) {
    config.targets.clear();
    for (const auto& t : opt.targets) config.targets.push_back(selpol::parse_final_label(json(t), "--target"));
  }
  config.validate();
  return config;
}

selpol::DressedSystem dressed(const selpol::SystemParams& params, const Options& opt) {
  if (opt.no_cache) return selpol::solve_dressed_system(params);
  const selpol::DressedCache cache(selpol::DressedCache::default_directory());
  if (auto hit = cache.load(params)) return *std::move(hit);
  selpol::DressedSystem system = selpol::solve_dressed_system(params);
  try {
    cache.store(system);
  } catch (const selpol::IoError& e) {
    warn(fmt::format("dressed-system cache not updated: {}", e.what()));
  }
  return system;
}

void print_spectrum(const selpol::DressedSystem& system) {
  const auto tracked = system.assignment.tracked();
  const int n_e = static_cast<int>(system.assignment.intermediate.size());
  fmt::print("{:<6} {:>14} {:>10} {:>12} {:>12}\n", "state", "energy", "<n_exc>", "mu(g,.)", "mu(e1,.)");
  for (std::size_t i = 0; i < tracked.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const std::string label = i == 0 ? "g" : (static_cast<int>(i) <= n_e ? fmt::format("e{}", i) : fmt::format("f{}", i - n_e));
    fmt::print("{:<6} {:>14.6f} {:>10.4f} {:>12.6f} {:>12.6f}\n", label, system.spectrum.energies(tracked[i]),
               system.spectrum.excitations(tracked[i]), system.dipoles.entries(0, idx), system.dipoles.entries(1, idx));
  }
}

void print_panels(const selpol::PanelDataset& data, bool with_pulses) {
  fmt::print("gamma_f = {}  grid: {}\n", data.gamma_f, data.grid.describe());
  for (const auto& panel : data.panels) {
    const auto& p = panel.entangled_populations;
    fmt::print("{}: lambda = {:.6f}  populations [", selpol::final_label(panel.target), panel.solution.lambda);
    for (Eigen::Index k = 0; k < p.size(); ++k) fmt::print("{}{:.6f}", k ? ", " : "", p(k));
    fmt::print("]\n");
    if (with_pulses) {
      const double ent = panel.entangled_quadrature(panel.target);
      const double cls = panel.classical_populations(panel.target);
      fmt::print("    r1^2 = {:.6f}  classical target population {:.6f}  entangled/classical = {:.4f}\n",
                 panel.r1_squared(), cls, ent / cls);
    }
  }
}

int run_panels(const std::string& command, const selpol::ScenarioConfig& config, const Options& opt, bool with_pulses) {
  selpol::PanelDataset data;
  if (!opt.levels_path.empty()) {
    data = selpol::run_optimal_panels(config, selpol::read_level_scheme(opt.levels_path));
  } else {
    data = selpol::run_optimal_panels(config, dressed(config.system, opt));
  }
  const fs::path out = opt.out_dir;
  auto manifest = selpol::make_manifest(command, config);
  manifest.grid = selpol::grid_to_json(data.grid);
  manifest.files = selpol::write_panel_outputs(out, config, data, with_pulses);
  selpol::write_manifest(out, manifest);
  print_panels(data, with_pulses);
  fmt::print("wrote {} files to {}\n", manifest.files.size() + 1, out.string());
  return 0;
}

int run_sweep(const std::string& command, selpol::ScenarioConfig config, const Options& opt) {
  if (!config.sweep) config.sweep = selpol::SweepSettings{};
  if (!opt.targets.empty()) config.sweep->target = selpol::parse_final_label(json(opt.targets.front()), "--target");
  if (!opt.contrast.empty()) config.sweep->contrast = selpol::parse_final_label(json(opt.contrast), "--contrast");
  config.validate();
  const auto system = dressed(config.system, opt);
  const auto result = selpol::run_selectivity_sweep(config, system, opt.threads);

  const fs::path out = opt.out_dir;
  auto manifest = selpol::make_manifest(command, config);
  manifest.grid = json{{"kind", selpol::to_string(config.grid.kind)}, {"n_points", config.grid.n_points}};
  manifest.files = selpol::write_sweep_outputs(out, result);
  manifest.findings = result.findings;
  selpol::write_manifest(out, manifest);

  fmt::print("{:>8} {:>12} {:>12} {:>12} {:>10}\n", "gamma_f", "S_selective", "S_classical", "S_indist", "ratio");
  for (const auto& p : result.points) {
    fmt::print("{:>8.4f} {:>12.6f} {:>12.6f} {:>12.6f} {:>10.4f}\n", p.gamma_f, p.s_selective, p.s_classical,
               p.s_indistinctive, p.ratio_selective());
  }
  for (const auto& f : result.findings) warn(f);
  fmt::print("wrote {} files to {}\n", manifest.files.size() + 1, out.string());
  return 0;
}

int run_diagonalize(const selpol::ScenarioConfig& config, const Options& opt) {
  const auto system = dressed(config.system, opt);
  const auto report = selpol::convergence_check(config.system);
  const fs::path out = opt.out_dir;
  selpol::ensure_directory(out);
  json doc = selpol::spectrum_summary(system);
  doc["convergence"] = selpol::to_json(report);
  selpol::write_json_file(out / "spectrum.json", doc);
  auto manifest = selpol::make_manifest("diagonalize", config);
  manifest.files = {"spectrum.json"};
  if (!report.passed()) {
    manifest.findings.push_back(fmt::format("truncation drift {:.3e} exceeds {:.1e}", report.drift(), report.tolerance));
  }
  selpol::write_manifest(out, manifest);

  print_spectrum(system);
  if (!report.passed()) {
    warn(fmt::format("n_max = {} not converged: drift {:.3e} against n_max = {} (tolerance {:.1e})", report.n_max,
                     report.drift(), report.n_max_reference, report.tolerance));
  }
  return 0;
}

int run_levels(const selpol::ScenarioConfig& config, const Options& opt) {
  const auto scheme = selpol::make_level_scheme(dressed(config.system, opt), config.gamma_f, config.gamma_e_ratio);
  const fs::path out = opt.out_dir;
  selpol::ensure_directory(out);
  selpol::write_json_file(out / "levels.json", selpol::to_json(scheme));
  auto manifest = selpol::make_manifest("levels", config);
  manifest.files = {"levels.json"};
  selpol::write_manifest(out, manifest);
  std::cout << selpol::to_json(scheme).dump(2) << '\n';
  return 0;
}

int run_reproduce(Options opt) {
  if (opt.scenario == "fig4") {
    selpol::ScenarioConfig config = selpol::fig4_scenario();
    if (opt.grid_points != 0) config.grid.n_points = opt.grid_points;
    return run_sweep("reproduce fig4", config, opt);
  }
  selpol::ScenarioConfig config = opt.scenario == "fig2" ? selpol::fig2_scenario() : selpol::fig3_scenario();
  if (opt.grid_points != 0) config.grid.n_points = opt.grid_points;
  if (!opt.targets.empty()) {
    config.targets.clear();
    for (const auto& t : opt.targets) config.targets.push_back(selpol::parse_final_label(json(t), "--target"));
  }
  config.validate();
  return run_panels("reproduce " + opt.scenario, config, opt, true);
}

void report_error(const selpol::Error& e) {
  json doc{{"error", e.kind()},
           {"category", std::string(selpol::category_name(e.category()))},
           {"exit_code", e.exit_code()},
           {"message", e.what()}};
  if (const auto* d = dynamic_cast<const selpol::DegenerateTargets*>(&e)) {
    doc["pair"] = {selpol::final_label(d->first()), selpol::final_label(d->second())};
  }
  std::cerr << doc.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective two-photon excitation of bipolariton states in a two-atom cavity"};
  app.set_version_flag("--version", std::string(selpol::tool_version()));
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", opt.config_path, "JSON scenario file")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_flag("--no-cache", opt.no_cache, "Do not read or write the dressed-system cache");
  };
  auto grid_flag = [&](CLI::App* sub) {
    sub->add_option("--grid-points", opt.grid_points, "Quadrature points per frequency axis")
        ->check(CLI::Range(selpol::FrequencyGrid::min_points, 1 << 14));
  };

  auto* diag = app.add_subcommand("diagonalize", "Dressed spectrum, dipoles and truncation check");
  common(diag, true);
  auto* levels = app.add_subcommand("levels", "Level scheme (energies, linewidths, dipoles) for the optimizer");
  common(levels, true);
  auto* optimize = app.add_subcommand("optimize", "Selective superposition for each target");
  auto* classical = app.add_subcommand("classical", "Selective solution plus Schmidt / classical-pulse analysis");
  for (auto* sub : {optimize, classical}) {
    common(sub, true);
    grid_flag(sub);
    sub->add_option("--target", opt.targets, "Target final states (f1..f4); default all")->delimiter(',');
    sub->add_option("--levels", opt.levels_path, "Use this level-scheme JSON instead of the dressed system")
        ->check(CLI::ExistingFile);
  }
  auto* sweep = app.add_subcommand("sweep", "Selectivity against linewidth");
  common(sweep, true);
  grid_flag(sweep);
  sweep->add_option("--target", opt.targets, "Target final state (default f2)")->expected(1);
  sweep->add_option("--contrast", opt.contrast, "Contrast final state (default f3)");
  sweep->add_option("--threads", opt.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  auto* reproduce = app.add_subcommand("reproduce", "Pinned scenarios: fig2 (gamma_f 0.01), fig3 (0.1), fig4 (sweep)");
  common(reproduce, false);
  grid_flag(reproduce);
  reproduce->add_option("scenario", opt.scenario, "fig2 | fig3 | fig4")->required()->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
  reproduce->add_option("--target", opt.targets, "Target final states for fig2/fig3")->delimiter(',');
  reproduce->add_option("--threads", opt.threads, "Worker threads for fig4")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*reproduce) return run_reproduce(opt);
    const auto config = load_config(opt);
    if (*diag) return run_diagonalize(config, opt);
    if (*levels) return run_levels(config, opt);
    if (*optimize) return run_panels("optimize", config, opt, false);
    if (*classical) return run_panels("classical", config, opt, true);
    if (*sweep) return run_sweep("sweep", config, opt);
  } catch (const selpol::Error& e) {
    report_error(e);
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "InternalError"}, {"category", "computation"}, {"exit_code", 3}, {"message", e.what()}}.dump()
              << '\n';
    return 3;
  }
  return 1;
}
