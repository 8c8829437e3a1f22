#pragma once

#include "selpol/dressed_system.hpp"
#include "selpol/frequency_grid.hpp"
#include "selpol/pulse_analysis.hpp"
#include "selpol/response_kernel.hpp"
#include "selpol/selective_optimizer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace selpol {

struct GridSettings {
  FrequencyGrid::Kind kind = FrequencyGrid::Kind::lorentzian_mapped;
  int n_points = 512;
  /// Uniform: interval ends. Mapped: the band centre +- scale.
  std::optional<double> lo;
  std::optional<double> hi;
  /// Points per axis of the uniform grid used for CSV exports.
  int export_points = 256;

  bool operator==(const GridSettings&) const = default;
};

struct SweepSettings {
  double gamma_f_min = 0.01;
  double gamma_f_max = 0.10;
  double step = 0.005;
  int target = 1;    // f2
  int contrast = 2;  // f3

  std::vector<double> values() const;
  bool operator==(const SweepSettings&) const = default;
};

struct ScenarioConfig {
  SystemParams system;
  double gamma_f = 0.01;
  double gamma_e_ratio = 0.5;
  std::vector<int> targets{0, 1, 2, 3};
  GridSettings grid;
  std::optional<SweepSettings> sweep;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

/// Analysis grid for a scheme: explicit bounds when given, otherwise the
/// automatic choice for the configured kind. A uniform grid that misses
/// resonances is widened past the positive-frequency clip.
FrequencyGrid analysis_grid(const LevelScheme& scheme, const GridSettings& settings);

/// Uniform grid used for plot-ready exports.
FrequencyGrid display_grid(const LevelScheme& scheme, const GridSettings& settings);

struct TargetPanel {
  int target = 0;
  SelectiveSolution solution;
  Eigen::VectorXd entangled_populations;   // closed form |(M v)_k|^2
  Eigen::VectorXd entangled_quadrature;    // same state, grid quadrature
  Eigen::VectorXd indistinctive_populations;
  GriddedWavefunction wavefunction;
  SchmidtDecomposition schmidt;
  GriddedWavefunction classical;
  Eigen::VectorXd classical_populations;   // grid quadrature
  std::vector<SpectralPeak> peaks;
  std::vector<SpectralPeak> classical_peaks;

  double r1_squared() const { return schmidt.weights(0) * schmidt.weights(0); }
};

struct PanelDataset {
  double gamma_f = 0.0;
  LevelScheme scheme;
  OverlapMatrix overlaps;
  FrequencyGrid grid;
  std::vector<TargetPanel> panels;
};

/// Selective solution, populations, wavefunction, Schmidt decomposition and
/// classical pulse for every configured target.
PanelDataset run_optimal_panels(const ScenarioConfig& config, const DressedSystem& system);
PanelDataset run_optimal_panels(const ScenarioConfig& config, const LevelScheme& scheme);

/// One target on a prepared scheme / table (shared by panels and sweep).
TargetPanel analyse_target(const OverlapMatrix& overlaps, const ResponseTable& table, int target);

struct SweepPoint {
  double gamma_f = 0.0;
  double s_selective = 0.0;
  double s_classical = 0.0;
  double s_indistinctive = 0.0;
  double r1_squared = 0.0;
  Eigen::VectorXd p_selective;
  Eigen::VectorXd p_classical;
  Eigen::VectorXd p_indistinctive;

  double ratio_selective() const { return s_selective / s_indistinctive; }
  double ratio_classical() const { return s_classical / s_indistinctive; }
};

struct SweepResult {
  SweepSettings settings;
  std::vector<SweepPoint> points;
  /// Empirical checks that failed (e.g. selective below indistinctive).
  std::vector<std::string> findings;
};

SweepPoint run_sweep_point(const LevelScheme& scheme, const GridSettings& grid, int target, int contrast);

/// Rebuilds the level scheme for every gamma_f of the sweep (gamma_e =
/// ratio * gamma_f) on the shared dressed system. Points run on up to
/// `threads` workers (0: hardware concurrency); results are ordered by gamma.
SweepResult run_selectivity_sweep(const ScenarioConfig& config, const DressedSystem& system, int threads = 0);

/// Pinned presets behind `selpol reproduce fig2 / fig3 / fig4`.
ScenarioConfig fig2_scenario();
ScenarioConfig fig3_scenario();
ScenarioConfig fig4_scenario();

}  // namespace selpol
