#include "selpol/selective_optimizer.hpp"

#include "selpol/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace selpol {

namespace {

constexpr double kTriangularPivotFloor = 1e-12;
constexpr double kPositiveRelTolerance = 1e-10;

struct SquareRoot {
  Eigen::MatrixXcd factor;  // M = S S^dagger
  bool from_eigen = false;
};

SquareRoot square_root(const Eigen::MatrixXcd& m) {
  Eigen::LLT<Eigen::MatrixXcd> llt(m);
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXcd l = llt.matrixL();
    if (l.diagonal().real().minCoeff() >= kTriangularPivotFloor) return {l, false};
  }
  // Symmetric square root M^(1/2); tolerates pivots the triangular factor loses.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m);
  if (eig.info() != Eigen::Success || eig.eigenvalues()(0) <= 0.0) {
    throw DegenerateTargets(
        fmt::format("overlap matrix is not positive definite (smallest eigenvalue {:.3e})",
                    eig.info() == Eigen::Success ? eig.eigenvalues()(0) : 0.0),
        -1, -1);
  }
  const Eigen::VectorXd root = eig.eigenvalues().cwiseSqrt();
  return {eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint(), true};
}

}  // namespace

SelectiveSolution solve_selective(const Eigen::MatrixXcd& m, int target) {
  const auto n = m.rows();
  if (m.cols() != n || n == 0) throw ValidationError("solve_selective: M must be square and non-empty");
  if (target < 0 || target >= n) {
    throw ValidationError(fmt::format("solve_selective: target index {} out of range [0, {})", target, n));
  }

  const SquareRoot root = square_root(m);
  const Eigen::MatrixXcd& s = root.factor;

  Eigen::VectorXd d = Eigen::VectorXd::Constant(n, -1.0);
  d(target) = 1.0;
  Eigen::MatrixXcd pencil = s.adjoint() * d.asDiagonal() * s;
  pencil = 0.5 * (pencil + pencil.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(pencil);
  if (eig.info() != Eigen::Success) throw ComputationError("solve_selective: Hermitian eigensolver failed");

  const Eigen::VectorXd& values = eig.eigenvalues();
  const double threshold = kPositiveRelTolerance * values.cwiseAbs().maxCoeff();
  int positive = 0;
  for (Eigen::Index i = 0; i < n; ++i) positive += values(i) > threshold ? 1 : 0;
  if (positive != 1) {
    throw InertiaViolation(fmt::format(
        "transformed pencil has {} positive eigenvalues (expected exactly 1 by congruence with D); "
        "eigenvalues range [{:.6e}, {:.6e}]",
        positive, values(0), values(n - 1)));
  }

  // v = S^-dagger w, then w^dagger w = 1 gives v^dagger M v = 1.
  const Eigen::VectorXcd w = eig.eigenvectors().col(n - 1);
  Eigen::VectorXcd v = s.adjoint().fullPivLu().solve(w);
  const double metric = (v.adjoint() * m * v)(0, 0).real();
  v /= std::sqrt(metric);

  const Eigen::VectorXcd amplitudes = m * v;
  const cplx anchor = amplitudes(target);
  if (std::abs(anchor) > 0.0) v *= std::conj(anchor) / std::abs(anchor);

  SelectiveSolution out;
  out.target = target;
  out.lambda = values(n - 1);
  out.coefficients = std::move(v);
  out.populations = populations(m, out.coefficients);
  out.pencil_eigenvalues = values;
  out.used_eigen_sqrt = root.from_eigen;
  return out;
}

SelectiveSolution solve_selective(const OverlapMatrix& overlaps, int target) {
  return solve_selective(overlaps.m, target);
}

Eigen::VectorXd populations(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& coefficients) {
  return (m * coefficients).cwiseAbs2();
}

double selective_functional(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& coefficients, int target) {
  const Eigen::VectorXd p = populations(m, coefficients);
  return 2.0 * p(target) - p.sum();
}

Eigen::VectorXd indistinctive_populations(const Eigen::MatrixXcd& m, int target) {
  if (target < 0 || target >= m.cols()) {
    throw ValidationError(fmt::format("indistinctive_populations: target index {} out of range", target));
  }
  return m.col(target).cwiseAbs2();
}

double selectivity(const Eigen::VectorXd& p, int a, int b) {
  if (a < 0 || b < 0 || a >= p.size() || b >= p.size()) throw ValidationError("selectivity: index out of range");
  const double total = p(a) + p(b);
  if (!(total > 0.0)) {
    throw ValidationError(fmt::format("selectivity undefined: populations of f{} and f{} both vanish", a + 1, b + 1));
  }
  return std::abs(p(a) - p(b)) / total;
}

}  // namespace selpol
