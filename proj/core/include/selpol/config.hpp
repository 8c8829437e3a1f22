#pragma once

#include "selpol/experiments.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace selpol {

/// Reads a JSON scenario file. Omitted fields take the defaults (two atoms at
/// 0.8 and 1.2, couplings 0.14, n_max 15, gamma_f 0.01, gamma_e = gamma_f / 2,
/// all four final states as targets). Throws IoError when the file cannot be
/// read and ValidationError naming the field on schema or physics violations.
ScenarioConfig parse_config(const std::filesystem::path& path);

ScenarioConfig config_from_json(const nlohmann::json& doc);

/// Complete, canonical document (every field present); parse -> serialize is
/// idempotent.
nlohmann::json config_to_json(const ScenarioConfig& config);

nlohmann::json system_params_to_json(const SystemParams& params);
SystemParams system_params_from_json(const nlohmann::json& doc);

/// Lower-case hex SHA-256 of the canonical JSON text.
std::string sha256_hex(const std::string& text);
std::string config_hash(const ScenarioConfig& config);
std::string system_hash(const SystemParams& params);

/// "f3" -> 2. Also accepts 1-based integers.
int parse_final_label(const nlohmann::json& value, const std::string& field);
std::string final_label(int index);

}  // namespace selpol
