#pragma once

#include "selpol/response_kernel.hpp"

#include <Eigen/Dense>

namespace selpol {

/// Optimal superposition of the normalized response states for exciting one
/// target final state while penalizing every other state in the manifold.
struct SelectiveSolution {
  int target = 0;
  /// Achieved functional value p[target] - sum_{k != target} p[k].
  double lambda = 0.0;
  /// Coefficients on the normalized response states, with v^dagger M v = 1.
  /// Global phase fixed so that (M v)[target] is real and positive.
  Eigen::VectorXcd coefficients;
  /// p[k] = |(M v)_k|^2, in units of N_fk.
  Eigen::VectorXd populations;
  /// Full spectrum of the transformed pencil, ascending.
  Eigen::VectorXd pencil_eigenvalues;
  /// True when the triangular factor was replaced by the eigen square root.
  bool used_eigen_sqrt = false;
};

/// Solves D M v = lambda v on the manifold, D = +1 at target and -1 elsewhere,
/// through a square-root factor M = S S^dagger and the Hermitian matrix
/// S^dagger D S, which has exactly one positive eigenvalue.
///
/// Throws DegenerateTargets when M is not positive definite and
/// InertiaViolation when the positive eigenvalue is not unique.
SelectiveSolution solve_selective(const OverlapMatrix& overlaps, int target);
SelectiveSolution solve_selective(const Eigen::MatrixXcd& m, int target);

/// p[k] = |(M v)_k|^2.
Eigen::VectorXd populations(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& coefficients);

/// Functional value sum_k D_kk p[k] for arbitrary coefficients normalized in
/// the M metric.
double selective_functional(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& coefficients, int target);

/// Populations excited by the single-target optimal state for target j:
/// p[k] = |M_kj|^2.
Eigen::VectorXd indistinctive_populations(const Eigen::MatrixXcd& m, int target);

/// |p[a] - p[b]| / (p[a] + p[b]). Throws ValidationError when both vanish.
double selectivity(const Eigen::VectorXd& populations, int a, int b);

}  // namespace selpol
