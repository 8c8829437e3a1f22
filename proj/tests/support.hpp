#pragma once

#include "selpol/dressed_system.hpp"
#include "selpol/level_scheme.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace selpol::testing {

inline constexpr double pi = 3.14159265358979323846;

/// Default two-atom system, solved once per test binary.
inline const DressedSystem& reference_system() {
  static const DressedSystem system = solve_dressed_system(SystemParams{});
  return system;
}

inline LevelScheme reference_scheme(double gamma_f, double gamma_e_ratio = 0.5) {
  return make_level_scheme(reference_system(), gamma_f, gamma_e_ratio);
}

/// Ground -> one intermediate -> one final, all dipoles 1.
inline LevelScheme single_path_scheme(double omega_e = 1.0, double omega_f = 2.0, double gamma_e = 0.02,
                                      double gamma_f = 0.05) {
  LevelScheme s;
  s.omega_e = Eigen::VectorXd::Constant(1, omega_e);
  s.omega_f = Eigen::VectorXd::Constant(1, omega_f);
  s.gamma_e = Eigen::VectorXd::Constant(1, gamma_e);
  s.gamma_f = Eigen::VectorXd::Constant(1, gamma_f);
  s.mu_ge = Eigen::VectorXd::Ones(1);
  s.mu_ef = Eigen::MatrixXd::Ones(1, 1);
  return s;
}

inline Eigen::MatrixXcd random_complex(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd a(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) a(r, c) = {normal(rng), normal(rng)};
  return a;
}

/// Random Hermitian positive-definite matrix with unit diagonal.
inline Eigen::MatrixXcd random_overlap(std::mt19937_64& rng, int n, double ridge = 0.05) {
  const Eigen::MatrixXcd a = random_complex(rng, n, n + 2);
  Eigen::MatrixXcd g = a * a.adjoint() + ridge * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::VectorXd d = g.diagonal().real().cwiseSqrt().cwiseInverse();
  g = d.asDiagonal() * g * d.asDiagonal();
  return 0.5 * (g + g.adjoint());
}

/// Random level scheme with distinct finals and no vanishing dipoles.
inline LevelScheme random_scheme(std::mt19937_64& rng, int n_e, int n_f) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LevelScheme s;
  s.omega_e.resize(n_e);
  s.gamma_e.resize(n_e);
  s.mu_ge.resize(n_e);
  for (int j = 0; j < n_e; ++j) {
    s.omega_e(j) = 0.7 + 0.6 * u(rng);
    s.gamma_e(j) = 0.01 + 0.03 * u(rng);
    s.mu_ge(j) = (u(rng) < 0.5 ? -1.0 : 1.0) * (0.3 + u(rng));
  }
  s.omega_f.resize(n_f);
  s.gamma_f.resize(n_f);
  for (int k = 0; k < n_f; ++k) {
    s.omega_f(k) = 1.6 + 0.8 * (k + u(rng)) / n_f;
    s.gamma_f(k) = 0.02 + 0.06 * u(rng);
  }
  s.mu_ef.resize(n_e, n_f);
  for (int j = 0; j < n_e; ++j)
    for (int k = 0; k < n_f; ++k) s.mu_ef(j, k) = (u(rng) < 0.5 ? -1.0 : 1.0) * (0.2 + u(rng));
  return s;
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

struct LineRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

struct Peak {
  double position;
  double width;
};

/// Nodes/weights for the whole real line, clustered on every peak. The line
/// is cut at the peak positions and at midpoints between them; each piece is
/// integrated in theta with omega = peak +- width tan(theta), so a Lorentzian
/// of that width is uniform in theta.
inline LineRule peaked_rule(std::vector<Peak> peaks, int panels = 24, int order = 8) {
  std::vector<double> x, w;
  gauss_legendre(order, x, w);
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.position < b.position; });
  LineRule rule;
  // Integrates over omega = p + dir * width * tan(theta), theta in [0, theta_max].
  auto piece = [&](double p, double dir, double width, double theta_max) {
    const double h = theta_max / panels;
    for (int q = 0; q < panels; ++q) {
      const double mid = (q + 0.5) * h;
      for (int i = 0; i < order; ++i) {
        const double theta = mid + 0.5 * h * x[i];
        const double c = std::cos(theta);
        rule.nodes.push_back(p + dir * width * std::tan(theta));
        rule.weights.push_back(0.5 * h * w[i] * width / (c * c));
      }
    }
  };
  piece(peaks.front().position, -1.0, peaks.front().width, 0.5 * pi);
  for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
    const double half = 0.5 * (peaks[i + 1].position - peaks[i].position);
    if (half <= 0.0) continue;
    piece(peaks[i].position, 1.0, peaks[i].width, std::atan(half / peaks[i].width));
    piece(peaks[i + 1].position, -1.0, peaks[i + 1].width, std::atan(half / peaks[i + 1].width));
  }
  piece(peaks.back().position, 1.0, peaks.back().width, 0.5 * pi);
  return rule;
}

/// Independent reference for the response-state inner products
/// iint T_j(w1, w2) conj(T_k(w1, w2)) dw1 dw2, evaluated in the coordinates
/// (w1, u = w1 + w2) where the final-state Lorentzian depends on u only. The
/// w1 rule is rebuilt for every u around the peaks at omega_e and u - omega_e.
inline Eigen::MatrixXcd reference_overlaps(const LevelScheme& s, int panels = 24) {
  using C = std::complex<double>;
  const int n_e = s.n_e(), n_f = s.n_f();
  auto lor = [](double w, double ws, double g) { return C(1.0, 0.0) / C(w - ws, g); };

  std::vector<Peak> final_peaks;
  for (int k = 0; k < n_f; ++k) final_peaks.push_back({s.omega_f(k), s.gamma_f(k)});
  const LineRule ru = peaked_rule(final_peaks, panels);

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_f, n_f);
  Eigen::MatrixXcd inner(n_e, n_e);
  Eigen::VectorXcd path(n_e);
  for (std::size_t b = 0; b < ru.nodes.size(); ++b) {
    const double u = ru.nodes[b];
    std::vector<Peak> peaks;
    for (int m = 0; m < n_e; ++m) {
      peaks.push_back({s.omega_e(m), s.gamma_e(m)});
      peaks.push_back({u - s.omega_e(m), s.gamma_e(m)});
    }
    const LineRule r1 = peaked_rule(peaks, panels);
    inner.setZero();
    for (std::size_t a = 0; a < r1.nodes.size(); ++a) {
      const double w1 = r1.nodes[a];
      for (int m = 0; m < n_e; ++m) path(m) = lor(w1, s.omega_e(m), s.gamma_e(m)) + lor(u - w1, s.omega_e(m), s.gamma_e(m));
      inner.noalias() += r1.weights[a] * path * path.adjoint();
    }
    for (int j = 0; j < n_f; ++j) {
      for (int k = 0; k < n_f; ++k) {
        C acc = 0.0;
        for (int m = 0; m < n_e; ++m)
          for (int n = 0; n < n_e; ++n) acc += s.mu_ge(m) * s.mu_ef(m, j) * s.mu_ge(n) * s.mu_ef(n, k) * inner(m, n);
        out(j, k) += ru.weights[b] * acc * lor(u, s.omega_f(j), s.gamma_f(j)) *
                     std::conj(lor(u, s.omega_f(k), s.gamma_f(k)));
      }
    }
  }
  return out;
}

}  // namespace selpol::testing
