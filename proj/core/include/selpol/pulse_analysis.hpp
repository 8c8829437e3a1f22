#pragma once

#include "selpol/frequency_grid.hpp"
#include "selpol/response_kernel.hpp"

#include <Eigen/Dense>

#include <vector>

namespace selpol {

/// Two-photon amplitude Phi(w1_a, w2_b) on grid x grid. Normalized when
/// sum_ab |Phi_ab|^2 w_a w_b = 1.
struct GriddedWavefunction {
  FrequencyGrid grid;
  Eigen::MatrixXcd amplitudes;

  double norm_squared() const;
  void normalize();
  /// max |Phi_ab - Phi_ba|.
  double asymmetry() const;
};

/// Phi = sum_r weights[r] modes_1[r](w1) modes_2[r](w2); the modes are
/// orthonormal in the grid-weighted inner product and stored as columns.
struct SchmidtDecomposition {
  FrequencyGrid grid;
  Eigen::VectorXd weights;  // descending
  Eigen::MatrixXcd modes_1;
  Eigen::MatrixXcd modes_2;

  /// Sum of squared weights (1 for normalized input).
  double total_weight() const { return weights.squaredNorm(); }
  /// 1 / sum r^4, the effective number of Schmidt modes.
  double schmidt_number() const;
};

/// Precomputed T_fk on a grid plus the norms N_fk; sampling and population
/// evaluation both reuse it.
struct ResponseTable {
  FrequencyGrid grid;
  std::vector<Eigen::MatrixXcd> responses;
  Eigen::VectorXd norms;

  /// Checks coverage and samples every final level.
  static ResponseTable build(const LevelScheme& scheme, const FrequencyGrid& grid);
};

/// Phi = sum_j c_j conj(T_fj) / sqrt(N_fj), grid-normalized.
GriddedWavefunction sample_wavefunction(const ResponseTable& table, const Eigen::VectorXcd& coefficients);
GriddedWavefunction sample_wavefunction(const LevelScheme& scheme, const Eigen::VectorXcd& coefficients,
                                        const FrequencyGrid& grid);

/// Singular value decomposition of sqrt(w_a) Phi_ab sqrt(w_b). Each mode pair
/// is rephased so that the largest-magnitude entry of modes_1 is real
/// positive.
SchmidtDecomposition schmidt(const GriddedWavefunction& psi);

/// Leading Schmidt product modes_1[0](w1) modes_2[0](w2).
GriddedWavefunction classical_pulse(const SchmidtDecomposition& sd);

/// |sum_ab T_fk(a, b) Phi_ab w_a w_b|^2 / N_fk.
double population_of(const ResponseTable& table, int k, const GriddedWavefunction& psi);
double population_of(const LevelScheme& scheme, int k, const GriddedWavefunction& psi);
Eigen::VectorXd populations_of(const ResponseTable& table, const GriddedWavefunction& psi);

struct SpectralPeak {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double intensity = 0.0;  // |Phi|^2
};

/// Strict local maxima of |Phi|^2 (8-neighbourhood), strongest first.
/// Peaks below min_relative x global maximum are dropped.
std::vector<SpectralPeak> find_peaks(const GriddedWavefunction& psi, std::size_t max_peaks = 8,
                                     double min_relative = 1e-3);

/// Evaluates a Schmidt mode pair product at arbitrary frequencies by
/// projecting the source wavefunction (Nystrom extension); used to export
/// pulses on a display grid different from the analysis grid.
GriddedWavefunction resample_classical(const LevelScheme& scheme, const Eigen::VectorXcd& coefficients,
                                       const SchmidtDecomposition& sd, const FrequencyGrid& display);

}  // namespace selpol
