#pragma once

#include "selpol/experiments.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace selpol {

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string tool_version;
  std::string timestamp;  // ISO 8601, UTC
  nlohmann::json config;
  nlohmann::json grid;
  std::map<std::string, double> tolerances;
  std::vector<std::string> files;
  std::vector<std::string> findings;
};

const char* tool_version();
std::string utc_timestamp();

/// Manifest with hash, version, timestamp, config and the numeric
/// tolerances the run was performed with.
RunManifest make_manifest(const std::string& command, const ScenarioConfig& config);

nlohmann::json to_json(const RunManifest& manifest);

/// Creates the directory (and parents). Throws IoError.
void ensure_directory(const std::filesystem::path& dir);
/// Pretty-printed JSON file. Throws IoError.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

/// levels.json, overlaps.json, solution_f{k}.json, populations.csv and, when
/// with_pulses is set, wavefunction_f{k}.csv and classical_f{k}.csv on the
/// uniform display grid. Returns the written file names.
std::vector<std::string> write_panel_outputs(const std::filesystem::path& dir, const ScenarioConfig& config,
                                             const PanelDataset& data, bool with_pulses);

/// sweep.csv plus sweep.json.
std::vector<std::string> write_sweep_outputs(const std::filesystem::path& dir, const SweepResult& sweep);

void write_manifest(const std::filesystem::path& dir, RunManifest manifest);

}  // namespace selpol
