#include "selpol/scenario_io.hpp"

#include "selpol/config.hpp"
#include "selpol/errors.hpp"
#include "selpol/serialization.hpp"

#include <fmt/format.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <system_error>

#ifndef SELPOL_VERSION_STRING
#define SELPOL_VERSION_STRING "unknown"
#endif

namespace selpol {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.precision(17);
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace

const char* tool_version() { return SELPOL_VERSION_STRING; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest make_manifest(const std::string& command, const ScenarioConfig& config) {
  RunManifest m;
  m.command = command;
  m.config_hash = config_hash(config);
  m.tool_version = tool_version();
  m.timestamp = utc_timestamp();
  m.config = config_to_json(config);
  m.tolerances = {
      {"eigen_residual_relative", 1e-9},
      {"eigen_orthonormality", 1e-10},
      {"sign_threshold", 1e-6},
      {"truncation_drift", 1e-6},
      {"overlap_min_eigenvalue", 1e-12},
      {"pencil_positive_relative", 1e-10},
      {"grid_coverage_gammas", 10.0},
  };
  return m;
}

json to_json(const RunManifest& m) {
  return json{{"command", m.command},       {"config_hash", m.config_hash}, {"tool_version", m.tool_version},
              {"timestamp", m.timestamp},   {"config", m.config},           {"grid", m.grid},
              {"tolerances", m.tolerances}, {"files", m.files},             {"findings", m.findings}};
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec ? ec.message() : "not a directory"));
  }
}

void write_json_file(const fs::path& path, const json& doc) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

std::vector<std::string> write_panel_outputs(const fs::path& dir, const ScenarioConfig& config, const PanelDataset& data,
                                             bool with_pulses) {
  ensure_directory(dir);
  std::vector<std::string> files;
  auto add_json = [&](const std::string& name, const json& doc) {
    write_json_file(dir / name, doc);
    files.push_back(name);
  };

  add_json("levels.json", to_json(data.scheme));
  add_json("overlaps.json", to_json(data.overlaps));

  const FrequencyGrid display = display_grid(data.scheme, config.grid);
  for (const auto& panel : data.panels) {
    const std::string label = final_label(panel.target);
    json doc = to_json(panel.solution);
    doc["gamma_f"] = data.gamma_f;
    doc["indistinctive_populations"] = std::vector<double>(panel.indistinctive_populations.data(),
                                                           panel.indistinctive_populations.data() +
                                                               panel.indistinctive_populations.size());
    doc["quadrature_populations"] = std::vector<double>(
        panel.entangled_quadrature.data(), panel.entangled_quadrature.data() + panel.entangled_quadrature.size());
    doc["wavefunction"] = json{{"grid", grid_to_json(data.grid)},
                               {"peaks", to_json(panel.peaks)},
                               {"asymmetry", panel.wavefunction.asymmetry()}};
    if (with_pulses) {
      doc["schmidt"] = to_json(panel.schmidt);
      doc["classical"] = json{{"populations", std::vector<double>(panel.classical_populations.data(),
                                                                  panel.classical_populations.data() +
                                                                      panel.classical_populations.size())},
                              {"peaks", to_json(panel.classical_peaks)}};
    }
    add_json(fmt::format("solution_{}.json", label), doc);

    if (with_pulses) {
      const auto wave_name = fmt::format("wavefunction_{}.csv", label);
      auto out = open_output(dir / wave_name);
      write_wavefunction_csv(out, sample_wavefunction(data.scheme, panel.solution.coefficients, display),
                             fmt::format("entangled two-photon amplitude selecting {}", label));
      finish(out, dir / wave_name);
      files.push_back(wave_name);

      const auto classical_name = fmt::format("classical_{}.csv", label);
      auto cout = open_output(dir / classical_name);
      write_wavefunction_csv(cout, resample_classical(data.scheme, panel.solution.coefficients, panel.schmidt, display),
                             fmt::format("leading Schmidt product (classical pulse pair) for {}", label));
      finish(cout, dir / classical_name);
      files.push_back(classical_name);
    }
  }

  auto out = open_output(dir / "populations.csv");
  write_populations_csv(out, data);
  finish(out, dir / "populations.csv");
  files.push_back("populations.csv");
  return files;
}

std::vector<std::string> write_sweep_outputs(const fs::path& dir, const SweepResult& sweep) {
  ensure_directory(dir);
  auto out = open_output(dir / "sweep.csv");
  write_sweep_csv(out, sweep);
  finish(out, dir / "sweep.csv");
  write_json_file(dir / "sweep.json", to_json(sweep));
  return {"sweep.csv", "sweep.json"};
}

void write_manifest(const fs::path& dir, RunManifest manifest) {
  ensure_directory(dir);
  manifest.files.push_back("manifest.json");
  write_json_file(dir / "manifest.json", to_json(manifest));
}

}  // namespace selpol
