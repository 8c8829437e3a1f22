#include "selpol/experiments.hpp"

#include "selpol/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace selpol {

std::vector<double> SweepSettings::values() const {
  const auto n = static_cast<int>(std::floor((gamma_f_max - gamma_f_min) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(gamma_f_min + i * step);
  return out;
}

void ScenarioConfig::validate() const {
  system.validate();
  if (!(gamma_f > 0.0) || !std::isfinite(gamma_f)) throw ValidationError(fmt::format("gamma_f: must be > 0, got {}", gamma_f));
  if (!(gamma_e_ratio > 0.0) || !std::isfinite(gamma_e_ratio)) {
    throw ValidationError(fmt::format("gamma_e_ratio: must be > 0, got {}", gamma_e_ratio));
  }
  const int n_f = manifold_size(system.n_atoms(), 2);
  if (targets.empty()) throw ValidationError("targets: at least one target is required");
  for (int t : targets) {
    if (t < 0 || t >= n_f) throw ValidationError(fmt::format("targets: f{} does not exist (n_f = {})", t + 1, n_f));
  }
  if (grid.n_points < FrequencyGrid::min_points) {
    throw ValidationError(fmt::format("grid.n_points: must be >= {}", FrequencyGrid::min_points));
  }
  if (grid.export_points < 2) throw ValidationError("grid.export_points: must be >= 2");
  if (grid.lo.has_value() != grid.hi.has_value()) throw ValidationError("grid.lo/grid.hi: give both or neither");
  if (grid.lo && !(*grid.hi > *grid.lo)) throw ValidationError("grid.lo/grid.hi: need lo < hi");
  if (sweep) {
    if (!(sweep->gamma_f_min > 0.0)) throw ValidationError("sweep.gamma_f_min: must be > 0");
    if (!(sweep->gamma_f_max >= sweep->gamma_f_min)) throw ValidationError("sweep.gamma_f_max: must be >= gamma_f_min");
    if (!(sweep->step > 0.0)) throw ValidationError("sweep.step: must be > 0");
    if (sweep->target < 0 || sweep->target >= n_f) throw ValidationError("sweep.target: out of range");
    if (sweep->contrast < 0 || sweep->contrast >= n_f || sweep->contrast == sweep->target) {
      throw ValidationError("sweep.contrast: out of range or equal to sweep.target");
    }
  }
}

FrequencyGrid analysis_grid(const LevelScheme& scheme, const GridSettings& settings) {
  if (settings.kind == FrequencyGrid::Kind::lorentzian_mapped) {
    if (settings.lo) {
      return FrequencyGrid::lorentzian_mapped(0.5 * (*settings.lo + *settings.hi), 0.5 * (*settings.hi - *settings.lo),
                                              settings.n_points);
    }
    return quadrature_grid(scheme, settings.n_points);
  }
  if (settings.lo) return FrequencyGrid::uniform(*settings.lo, *settings.hi, settings.n_points);
  FrequencyGrid grid = default_grid(scheme, settings.n_points);
  if (uncovered_resonances(scheme, grid).empty()) return grid;
  const auto res = resonance_frequencies(scheme);
  const auto [lo_it, hi_it] = std::minmax_element(res.begin(), res.end());
  const double margin = 20.0 * scheme.max_gamma();
  return FrequencyGrid::uniform(*lo_it - margin, *hi_it + margin, settings.n_points);
}

FrequencyGrid display_grid(const LevelScheme& scheme, const GridSettings& settings) {
  if (settings.kind == FrequencyGrid::Kind::uniform && settings.lo) {
    return FrequencyGrid::uniform(*settings.lo, *settings.hi, std::max(settings.export_points, FrequencyGrid::min_points));
  }
  return default_grid(scheme, std::max(settings.export_points, FrequencyGrid::min_points));
}

TargetPanel analyse_target(const OverlapMatrix& overlaps, const ResponseTable& table, int target) {
  TargetPanel panel;
  panel.target = target;
  panel.solution = solve_selective(overlaps, target);
  panel.entangled_populations = panel.solution.populations;
  panel.indistinctive_populations = indistinctive_populations(overlaps.m, target);
  panel.wavefunction = sample_wavefunction(table, panel.solution.coefficients);
  panel.entangled_quadrature = populations_of(table, panel.wavefunction);
  panel.schmidt = schmidt(panel.wavefunction);
  panel.classical = classical_pulse(panel.schmidt);
  panel.classical_populations = populations_of(table, panel.classical);
  panel.peaks = find_peaks(panel.wavefunction);
  panel.classical_peaks = find_peaks(panel.classical);
  return panel;
}

PanelDataset run_optimal_panels(const ScenarioConfig& config, const LevelScheme& scheme) {
  PanelDataset data;
  data.gamma_f = scheme.gamma_f.maxCoeff();
  data.scheme = scheme;
  data.overlaps = overlap_matrix(scheme);
  data.grid = analysis_grid(scheme, config.grid);
  const ResponseTable table = ResponseTable::build(scheme, data.grid);
  for (int target : config.targets) {
    if (target < 0 || target >= scheme.n_f()) {
      throw ValidationError(fmt::format("targets: f{} does not exist (n_f = {})", target + 1, scheme.n_f()));
    }
    data.panels.push_back(analyse_target(data.overlaps, table, target));
  }
  return data;
}

PanelDataset run_optimal_panels(const ScenarioConfig& config, const DressedSystem& system) {
  config.validate();
  return run_optimal_panels(config, make_level_scheme(system, config.gamma_f, config.gamma_e_ratio));
}

SweepPoint run_sweep_point(const LevelScheme& scheme, const GridSettings& grid, int target, int contrast) {
  const OverlapMatrix overlaps = overlap_matrix(scheme);
  const ResponseTable table = ResponseTable::build(scheme, analysis_grid(scheme, grid));
  const SelectiveSolution solution = solve_selective(overlaps, target);
  const GriddedWavefunction psi = sample_wavefunction(table, solution.coefficients);
  const SchmidtDecomposition sd = schmidt(psi);
  const GriddedWavefunction classical = classical_pulse(sd);

  SweepPoint point;
  point.gamma_f = scheme.gamma_f.maxCoeff();
  point.p_selective = solution.populations;
  point.p_classical = populations_of(table, classical);
  point.p_indistinctive = indistinctive_populations(overlaps.m, target);
  point.s_selective = selectivity(point.p_selective, target, contrast);
  point.s_classical = selectivity(point.p_classical, target, contrast);
  point.s_indistinctive = selectivity(point.p_indistinctive, target, contrast);
  point.r1_squared = sd.weights(0) * sd.weights(0);
  return point;
}

SweepResult run_selectivity_sweep(const ScenarioConfig& config, const DressedSystem& system, int threads) {
  config.validate();
  SweepResult result;
  result.settings = config.sweep.value_or(SweepSettings{});
  const auto gammas = result.settings.values();
  result.points.resize(gammas.size());

  const LevelScheme base = make_level_scheme(system, config.gamma_f, config.gamma_e_ratio);
  const int target = result.settings.target;
  const int contrast = result.settings.contrast;

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < gammas.size(); i = next++) {
      try {
        const LevelScheme scheme = base.with_linewidths(config.gamma_e_ratio * gammas[i], gammas[i]);
        result.points[i] = run_sweep_point(scheme, config.grid, target, contrast);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  const auto n_workers = static_cast<std::size_t>(
      std::min<std::size_t>(threads > 0 ? static_cast<std::size_t>(threads) : hw, gammas.size()));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& p : result.points) {
    if (p.ratio_selective() < 1.0) {
      result.findings.push_back(fmt::format(
          "gamma_f = {:.4f}: selective selectivity {:.6f} below indistinctive {:.6f}", p.gamma_f, p.s_selective,
          p.s_indistinctive));
    }
  }
  for (std::size_t i = 1; i < result.points.size(); ++i) {
    const auto& a = result.points[i - 1];
    const auto& b = result.points[i];
    if (b.s_selective > a.s_selective || b.s_classical > a.s_classical || b.s_indistinctive > a.s_indistinctive) {
      result.findings.push_back(fmt::format("selectivity increases between gamma_f = {:.4f} and {:.4f}", a.gamma_f, b.gamma_f));
    }
  }
  return result;
}

ScenarioConfig fig2_scenario() {
  ScenarioConfig config;
  config.gamma_f = 0.01;
  return config;
}

ScenarioConfig fig3_scenario() {
  ScenarioConfig config;
  config.gamma_f = 0.1;
  return config;
}

ScenarioConfig fig4_scenario() {
  ScenarioConfig config;
  config.sweep = SweepSettings{};
  return config;
}

}  // namespace selpol
