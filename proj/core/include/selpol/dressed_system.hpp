#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace selpol {

/// Physical inputs of the N-atom + single-mode cavity Hamiltonian, including
/// the counter-rotating coupling terms. Energies are in units of the cavity
/// frequency.
struct SystemParams {
  std::vector<double> atom_frequencies{0.8, 1.2};
  double cavity_frequency = 1.0;
  std::vector<double> couplings{0.14, 0.14};
  int n_max = 15;
  std::size_t max_dimension = 4096;

  int n_atoms() const { return static_cast<int>(atom_frequencies.size()); }
  std::size_t dimension() const;

  /// Throws ValidationError / DimensionOverflow.
  void validate() const;

  bool operator==(const SystemParams&) const = default;
};

/// Product-basis label |atoms; photons>, atoms written as a g/e string with
/// atom 1 first (e.g. "ge" = atom 1 ground, atom 2 excited).
struct BasisLabel {
  std::string atoms;
  int photons = 0;
  int excitations() const;

  bool operator==(const BasisLabel&) const = default;
};

/// Product basis in atomic-configuration-major, photon-number-minor order.
std::vector<BasisLabel> product_basis(const SystemParams& params);

struct DressedSpectrum {
  Eigen::VectorXd energies;       // ascending
  Eigen::MatrixXd eigenvectors;   // columns, orthonormal
  std::vector<BasisLabel> basis;
  Eigen::VectorXd excitations;    // <sum sigma^+ sigma + b^+ b> per eigenstate
};

struct ManifoldAssignment {
  int ground = 0;
  std::vector<int> intermediate;
  std::vector<int> final;

  /// Tracked states in the canonical order g, e_1.., f_1..
  std::vector<int> tracked() const;
};

/// Dipole elements sum_n <r| sigma_n^+ + sigma_n |s> over the tracked states,
/// indexed in ManifoldAssignment::tracked() order.
struct DipoleMatrix {
  Eigen::MatrixXd entries;
};

Eigen::MatrixXd build_hamiltonian(const SystemParams& params);

/// Collective dipole operator sum_n (sigma_n^+ + sigma_n) in the product basis.
Eigen::MatrixXd dipole_operator(const SystemParams& params);

/// Total excitation number operator, diagonal in the product basis.
Eigen::VectorXd excitation_number(const SystemParams& params);

/// Full eigendecomposition of a symmetric matrix. The returned spectrum has
/// empty basis/excitations; use diagonalize(SystemParams) for those.
DressedSpectrum diagonalize(const Eigen::MatrixXd& hamiltonian);
DressedSpectrum diagonalize(const SystemParams& params);

/// Number of states in the m-excitation manifold of the uncoupled system,
/// for m in {0, 1, 2}.
int manifold_size(int n_atoms, int manifold);

ManifoldAssignment classify_manifolds(const DressedSpectrum& spectrum, int n_atoms);

/// Flips eigenvector signs of the tracked states so that mu(g, e_j) >= 0 and
/// mu(e_1, f_k) >= 0. Elements below 1e-6 fall back to the largest-magnitude
/// dipole into the manifold (finals) or the largest eigenvector component
/// (ground and intermediates).
void apply_sign_convention(DressedSpectrum& spectrum, const ManifoldAssignment& assignment,
                           const Eigen::MatrixXd& dipole_op);

/// Evaluates the dipole matrix with the spectrum's eigenvectors as given.
DipoleMatrix dipole_matrix(const DressedSpectrum& spectrum, const ManifoldAssignment& assignment,
                           const Eigen::MatrixXd& dipole_op);

/// Everything downstream needs from the dressed stage.
struct DressedSystem {
  SystemParams params;
  DressedSpectrum spectrum;
  ManifoldAssignment assignment;
  DipoleMatrix dipoles;

  /// Tracked energies (g, e.., f..) in absolute units, i.e. not shifted.
  Eigen::VectorXd tracked_energies() const;
};

/// build_hamiltonian -> diagonalize -> classify -> sign convention -> dipoles.
DressedSystem solve_dressed_system(const SystemParams& params);

struct ConvergenceReport {
  int n_max = 0;
  int n_max_reference = 0;
  double energy_drift = 0.0;
  double dipole_drift = 0.0;
  double tolerance = 1e-6;

  double drift() const { return energy_drift > dipole_drift ? energy_drift : dipole_drift; }
  bool passed() const { return drift() < tolerance; }
};

/// Compares tracked energies and dipoles at n_max and n_max + extra_photons.
ConvergenceReport convergence_check(const SystemParams& params, int extra_photons = 5);

}  // namespace selpol
