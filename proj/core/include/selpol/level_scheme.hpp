#pragma once

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <vector>

namespace selpol {

struct DressedSystem;

using cplx = std::complex<double>;

/// Spectroscopic reduction of the matter system: one ground state at zero
/// energy, n_e intermediate and n_f final levels with energies, inverse
/// lifetimes and real dipole products along the field polarization.
struct LevelScheme {
  Eigen::VectorXd omega_e;
  Eigen::VectorXd omega_f;
  Eigen::VectorXd gamma_e;
  Eigen::VectorXd gamma_f;
  Eigen::VectorXd mu_ge;  // n_e
  Eigen::MatrixXd mu_ef;  // n_e x n_f

  int n_e() const { return static_cast<int>(omega_e.size()); }
  int n_f() const { return static_cast<int>(omega_f.size()); }

  /// Complex poles z = omega - i gamma.
  cplx pole_e(int j) const { return {omega_e(j), -gamma_e(j)}; }
  cplx pole_f(int k) const { return {omega_f(k), -gamma_f(k)}; }

  double max_gamma() const;
  double min_gamma() const;

  /// Throws ValidationError on inconsistent sizes, non-positive energies or
  /// non-positive linewidths.
  void validate() const;

  /// Same scheme with every linewidth set to (gamma_e, gamma_f).
  LevelScheme with_linewidths(double gamma_e, double gamma_f) const;

  /// Final levels reordered: result.f(k) = this->f(order[k]).
  LevelScheme permute_finals(const std::vector<int>& order) const;
};

/// Reduces a dressed system to a level scheme with the origin at the ground
/// energy. Intermediate linewidths are gamma_e_ratio * gamma_f.
LevelScheme make_level_scheme(const DressedSystem& system, double gamma_f, double gamma_e_ratio = 0.5);

}  // namespace selpol
