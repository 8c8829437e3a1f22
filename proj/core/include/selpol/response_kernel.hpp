#pragma once

#include "selpol/frequency_grid.hpp"
#include "selpol/level_scheme.hpp"

#include <Eigen/Dense>

#include <vector>

namespace selpol {

/// Working units: hbar = E0 = omega0 = 1, so the field prefactors reduce to
/// signs.

/// 1 / (omega - omega_s + i gamma_s).
cplx lorentzian(double omega, double omega_s, double gamma_s);

/// Two-photon matter response T_f(w1, w2) for final level k at t = 0:
/// -sum_j mu_ge[j] mu_ef[j][k] (L_ej(w1) + L_ej(w2)) L_fk(w1 + w2).
cplx response(const LevelScheme& scheme, int k, double omega1, double omega2);

/// Closed-form overlap <T_fj|T_fk> of the (unnormalized) response states.
cplx overlap(const LevelScheme& scheme, int j, int k);

/// All overlaps, exactly Hermitian.
Eigen::MatrixXcd overlap_sums(const LevelScheme& scheme);

/// N_fk = Re <T_fk|T_fk>. Throws InternalConsistency if not positive.
double norm(const LevelScheme& scheme, int k);

/// Same quantity through the reduced real form: pairwise m < n terms plus
/// the diagonal terms 2 pi^2 (mu_ge mu_ef)^2 / (gamma_e gamma_f).
double norm_reduced_form(const LevelScheme& scheme, int k);

/// Gram matrix of the normalized response states.
struct OverlapMatrix {
  Eigen::MatrixXcd sigma;  // unnormalized overlaps
  Eigen::MatrixXcd m;      // unit diagonal, Hermitian, positive definite
  Eigen::VectorXd norms;

  int size() const { return static_cast<int>(m.rows()); }
};

/// Throws DegenerateTargets naming the most collinear pair when M is not
/// numerically positive definite.
OverlapMatrix overlap_matrix(const LevelScheme& scheme);

/// Builds an OverlapMatrix from a raw Gram matrix (tests, external input).
OverlapMatrix overlap_matrix_from(const Eigen::MatrixXcd& m);

/// T_fk sampled on grid x grid, one matrix per final level;
/// table[k](a, b) = T_fk(nodes[a], nodes[b]).
std::vector<Eigen::MatrixXcd> sample_responses(const LevelScheme& scheme, const FrequencyGrid& grid);

/// Quadrature of <T_fj|T_fk> = iint T_fj(w1, w2) conj(T_fk(w1, w2)) on the
/// grid's tensor-product weights. Independent of the closed form.
cplx quadrature_overlap_oracle(const LevelScheme& scheme, int j, int k, const FrequencyGrid& grid);

/// Same for all pairs at once (one sampling pass).
Eigen::MatrixXcd quadrature_overlaps(const LevelScheme& scheme, const FrequencyGrid& grid);

}  // namespace selpol
