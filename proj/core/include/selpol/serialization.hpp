#pragma once

#include "selpol/experiments.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace selpol {

/// Complex numbers travel as [re, im] pairs; matrices as arrays of rows.
nlohmann::json complex_to_json(cplx z);
cplx complex_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const LevelScheme& scheme);
/// Throws ValidationError naming the missing or malformed field.
LevelScheme level_scheme_from_json(const nlohmann::json& doc);
LevelScheme read_level_scheme(const std::filesystem::path& path);

/// Full dressed-stage result: parameters, spectrum, assignment, dipoles.
nlohmann::json to_json(const DressedSystem& system);
DressedSystem dressed_system_from_json(const nlohmann::json& doc);

/// Human-facing subset of the dressed stage (tracked energies, excitation
/// numbers and dipoles) written by `selpol diagonalize`.
nlohmann::json spectrum_summary(const DressedSystem& system);

nlohmann::json to_json(const OverlapMatrix& overlaps);
nlohmann::json to_json(const SelectiveSolution& solution);
SelectiveSolution selective_solution_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ConvergenceReport& report);
nlohmann::json to_json(const SchmidtDecomposition& sd, int n_weights = 8);
nlohmann::json to_json(const std::vector<SpectralPeak>& peaks);
nlohmann::json to_json(const SweepResult& sweep);
nlohmann::json grid_to_json(const FrequencyGrid& grid);

/// Shortest round-trip decimal text of a double.
std::string format_number(double x);

/// Rows "omega1, omega2, re, im, abs2" after '#' metadata lines.
void write_wavefunction_csv(std::ostream& out, const GriddedWavefunction& psi, const std::string& title);

/// One row per (target, state) of every panel.
void write_populations_csv(std::ostream& out, const PanelDataset& data);

void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace selpol
