#include "selpol/response_kernel.hpp"

#include "selpol/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace selpol {

namespace {

constexpr double pi2 = std::numbers::pi * std::numbers::pi;

void check_final_index(const LevelScheme& scheme, int k) {
  if (k < 0 || k >= scheme.n_f()) {
    throw ValidationError(fmt::format("final-state index {} out of range [0, {})", k, scheme.n_f()));
  }
}

}  // namespace

cplx lorentzian(double omega, double omega_s, double gamma_s) {
  return 1.0 / cplx(omega - omega_s, gamma_s);
}

cplx response(const LevelScheme& scheme, int k, double omega1, double omega2) {
  check_final_index(scheme, k);
  cplx paths{0.0, 0.0};
  for (int j = 0; j < scheme.n_e(); ++j) {
    const double weight = scheme.mu_ge(j) * scheme.mu_ef(j, k);
    paths += weight * (lorentzian(omega1, scheme.omega_e(j), scheme.gamma_e(j)) +
                       lorentzian(omega2, scheme.omega_e(j), scheme.gamma_e(j)));
  }
  return -paths * lorentzian(omega1 + omega2, scheme.omega_f(k), scheme.gamma_f(k));
}

cplx overlap(const LevelScheme& scheme, int j, int k) {
  check_final_index(scheme, j);
  check_final_index(scheme, k);
  const cplx final_denominator = scheme.pole_f(j) - std::conj(scheme.pole_f(k));
  cplx sum{0.0, 0.0};
  for (int m = 0; m < scheme.n_e(); ++m) {
    const double a_m = scheme.mu_ge(m) * scheme.mu_ef(m, j);
    for (int n = 0; n < scheme.n_e(); ++n) {
      const double a_n = scheme.mu_ge(n) * scheme.mu_ef(n, k);
      sum += a_m * a_n / ((scheme.pole_e(m) - std::conj(scheme.pole_e(n))) * final_denominator);
    }
  }
  return -8.0 * pi2 * sum;
}

Eigen::MatrixXcd overlap_sums(const LevelScheme& scheme) {
  const int n = scheme.n_f();
  Eigen::MatrixXcd sigma(n, n);
  for (int j = 0; j < n; ++j) {
    sigma(j, j) = cplx(overlap(scheme, j, j).real(), 0.0);
    for (int k = j + 1; k < n; ++k) {
      sigma(j, k) = overlap(scheme, j, k);
      sigma(k, j) = std::conj(sigma(j, k));
    }
  }
  return sigma;
}

double norm(const LevelScheme& scheme, int k) {
  const double value = overlap(scheme, k, k).real();
  if (!(value > 0.0)) {
    throw InternalConsistency(fmt::format("normalization of f{} is {:.6e}, expected > 0", k + 1, value));
  }
  return value;
}

double norm_reduced_form(const LevelScheme& scheme, int k) {
  check_final_index(scheme, k);
  const double gf = scheme.gamma_f(k);
  double diagonal = 0.0;
  double pairs = 0.0;
  for (int m = 0; m < scheme.n_e(); ++m) {
    const double a_m = scheme.mu_ge(m) * scheme.mu_ef(m, k);
    diagonal += 2.0 * pi2 * a_m * a_m / (scheme.gamma_e(m) * gf);
    for (int n = m + 1; n < scheme.n_e(); ++n) {
      const double a_n = scheme.mu_ge(n) * scheme.mu_ef(n, k);
      const double detuning = scheme.omega_e(m) - scheme.omega_e(n);
      const double width = scheme.gamma_e(m) + scheme.gamma_e(n);
      pairs += a_m * a_n * width / (detuning * detuning + width * width);
    }
  }
  return diagonal + 8.0 * pi2 / gf * pairs;
}

OverlapMatrix overlap_matrix_from(const Eigen::MatrixXcd& raw) {
  const auto n = raw.rows();
  if (raw.cols() != n || n == 0) throw ValidationError("overlap matrix must be square and non-empty");

  OverlapMatrix out;
  out.sigma = raw;
  out.norms.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.norms(k) = raw(k, k).real();
    if (!(out.norms(k) > 0.0)) {
      throw InternalConsistency(fmt::format("normalization of f{} is {:.6e}, expected > 0", k + 1, out.norms(k)));
    }
  }
  out.m.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.m(j, j) = 1.0;
    for (Eigen::Index k = j + 1; k < n; ++k) {
      out.m(j, k) = raw(j, k) / std::sqrt(out.norms(j) * out.norms(k));
      out.m(k, j) = std::conj(out.m(j, k));
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(out.m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success || solver.eigenvalues()(0) <= 1e-12) {
    Eigen::Index a = 0;
    Eigen::Index b = n > 1 ? 1 : 0;
    double largest = -1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = j + 1; k < n; ++k) {
        if (std::abs(out.m(j, k)) > largest) {
          largest = std::abs(out.m(j, k));
          a = j;
          b = k;
        }
      }
    }
    throw DegenerateTargets(
        fmt::format("overlap matrix is not positive definite (smallest eigenvalue {:.3e}); final states f{} and f{} "
                    "have indistinguishable response states (|M| = {:.12f})",
                    solver.info() == Eigen::Success ? solver.eigenvalues()(0) : 0.0, a + 1, b + 1, largest),
        static_cast<int>(a), static_cast<int>(b));
  }
  return out;
}

OverlapMatrix overlap_matrix(const LevelScheme& scheme) {
  scheme.validate();
  return overlap_matrix_from(overlap_sums(scheme));
}

std::vector<Eigen::MatrixXcd> sample_responses(const LevelScheme& scheme, const FrequencyGrid& grid) {
  const int n = grid.size();
  const auto& x = grid.nodes();

  // lorentz_e(j, a) = L_ej(x_a)
  Eigen::MatrixXcd lorentz_e(scheme.n_e(), n);
  for (int j = 0; j < scheme.n_e(); ++j) {
    for (int a = 0; a < n; ++a) lorentz_e(j, a) = lorentzian(x(a), scheme.omega_e(j), scheme.gamma_e(j));
  }

  std::vector<Eigen::MatrixXcd> table;
  table.reserve(static_cast<std::size_t>(scheme.n_f()));
  for (int k = 0; k < scheme.n_f(); ++k) {
    Eigen::VectorXcd single(n);  // sum_j mu_ge mu_ef L_ej(x_a)
    single.setZero();
    for (int j = 0; j < scheme.n_e(); ++j) single += (scheme.mu_ge(j) * scheme.mu_ef(j, k)) * lorentz_e.row(j).transpose();

    Eigen::MatrixXcd t(n, n);
    for (int b = 0; b < n; ++b) {
      for (int a = b; a < n; ++a) {
        const cplx value =
            -(single(a) + single(b)) * lorentzian(x(a) + x(b), scheme.omega_f(k), scheme.gamma_f(k));
        t(a, b) = value;
        t(b, a) = value;
      }
    }
    table.push_back(std::move(t));
  }
  return table;
}

Eigen::MatrixXcd quadrature_overlaps(const LevelScheme& scheme, const FrequencyGrid& grid) {
  require_coverage(scheme, grid);
  const auto table = sample_responses(scheme, grid);
  const Eigen::VectorXd root_w = grid.weights().cwiseSqrt();
  const Eigen::MatrixXd weight = root_w * root_w.transpose();

  std::vector<Eigen::MatrixXcd> weighted;
  weighted.reserve(table.size());
  for (const auto& t : table) weighted.push_back(t.cwiseProduct(weight));

  const int nf = scheme.n_f();
  Eigen::MatrixXcd q(nf, nf);
  for (int j = 0; j < nf; ++j) {
    for (int k = 0; k < nf; ++k) q(j, k) = weighted[static_cast<std::size_t>(j)].cwiseProduct(weighted[static_cast<std::size_t>(k)].conjugate()).sum();
  }
  return q;
}

cplx quadrature_overlap_oracle(const LevelScheme& scheme, int j, int k, const FrequencyGrid& grid) {
  check_final_index(scheme, j);
  check_final_index(scheme, k);
  require_coverage(scheme, grid);
  const int n = grid.size();
  const auto& x = grid.nodes();
  const auto& w = grid.weights();
  cplx sum{0.0, 0.0};
  for (int a = 0; a < n; ++a) {
    cplx row{0.0, 0.0};
    for (int b = 0; b < n; ++b) {
      row += w(b) * response(scheme, j, x(a), x(b)) * std::conj(response(scheme, k, x(a), x(b)));
    }
    sum += w(a) * row;
  }
  return sum;
}

}  // namespace selpol
