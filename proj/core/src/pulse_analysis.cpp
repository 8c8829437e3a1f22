#include "selpol/pulse_analysis.hpp"

#include "selpol/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace selpol {

namespace {

Eigen::MatrixXcd conj_response_sum(const ResponseTable& table, const Eigen::VectorXcd& coefficients) {
  if (coefficients.size() != static_cast<Eigen::Index>(table.responses.size())) {
    throw ValidationError(fmt::format("expected {} coefficients, got {}", table.responses.size(), coefficients.size()));
  }
  const int n = table.grid.size();
  Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t j = 0; j < table.responses.size(); ++j) {
    const cplx c = coefficients(static_cast<Eigen::Index>(j)) / std::sqrt(table.norms(static_cast<Eigen::Index>(j)));
    if (c == cplx(0.0, 0.0)) continue;
    phi += c * table.responses[j].conjugate();
  }
  return phi;
}

/// Phi(x_a, y_b) for arbitrary axes (not necessarily symmetric), unnormalized.
Eigen::MatrixXcd evaluate_cross(const LevelScheme& scheme, const Eigen::VectorXcd& coefficients,
                                const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::VectorXd norms(scheme.n_f());
  for (int k = 0; k < scheme.n_f(); ++k) norms(k) = norm(scheme, k);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(x.size(), y.size());
  for (Eigen::Index b = 0; b < y.size(); ++b) {
    for (Eigen::Index a = 0; a < x.size(); ++a) {
      cplx value{0.0, 0.0};
      for (int k = 0; k < scheme.n_f(); ++k) {
        if (coefficients(k) == cplx(0.0, 0.0)) continue;
        value += coefficients(k) * std::conj(response(scheme, k, x(a), y(b))) / std::sqrt(norms(k));
      }
      out(a, b) = value;
    }
  }
  return out;
}

}  // namespace

double GriddedWavefunction::norm_squared() const {
  const auto& w = grid.weights();
  return w.dot(amplitudes.cwiseAbs2() * w);
}

void GriddedWavefunction::normalize() {
  const double n2 = norm_squared();
  if (!(n2 > 0.0)) throw ComputationError("cannot normalize a vanishing wavefunction");
  amplitudes /= std::sqrt(n2);
}

double GriddedWavefunction::asymmetry() const {
  return (amplitudes - amplitudes.transpose()).cwiseAbs().maxCoeff();
}

double SchmidtDecomposition::schmidt_number() const {
  const double r4 = weights.array().pow(4).sum();
  return r4 > 0.0 ? 1.0 / r4 : 0.0;
}

ResponseTable ResponseTable::build(const LevelScheme& scheme, const FrequencyGrid& grid) {
  scheme.validate();
  require_coverage(scheme, grid);
  ResponseTable table{grid, sample_responses(scheme, grid), Eigen::VectorXd(scheme.n_f())};
  for (int k = 0; k < scheme.n_f(); ++k) table.norms(k) = norm(scheme, k);
  return table;
}

GriddedWavefunction sample_wavefunction(const ResponseTable& table, const Eigen::VectorXcd& coefficients) {
  GriddedWavefunction psi{table.grid, conj_response_sum(table, coefficients)};
  psi.normalize();
  return psi;
}

GriddedWavefunction sample_wavefunction(const LevelScheme& scheme, const Eigen::VectorXcd& coefficients,
                                        const FrequencyGrid& grid) {
  return sample_wavefunction(ResponseTable::build(scheme, grid), coefficients);
}

SchmidtDecomposition schmidt(const GriddedWavefunction& psi) {
  const Eigen::VectorXd root_w = psi.grid.weights().cwiseSqrt();
  const Eigen::MatrixXcd scaled = root_w.asDiagonal() * psi.amplitudes * root_w.asDiagonal();

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw ComputationError("Schmidt decomposition: SVD failed");

  SchmidtDecomposition sd{psi.grid, svd.singularValues(), Eigen::MatrixXcd(), Eigen::MatrixXcd()};
  const Eigen::VectorXd inv_root_w = root_w.cwiseInverse();
  sd.modes_1 = inv_root_w.asDiagonal() * svd.matrixU();
  sd.modes_2 = inv_root_w.asDiagonal() * svd.matrixV().conjugate();

  for (Eigen::Index r = 0; r < sd.modes_1.cols(); ++r) {
    Eigen::Index arg = 0;
    sd.modes_1.col(r).cwiseAbs().maxCoeff(&arg);
    const cplx entry = sd.modes_1(arg, r);
    if (std::abs(entry) == 0.0) continue;
    const cplx phase = entry / std::abs(entry);
    sd.modes_1.col(r) *= std::conj(phase);
    sd.modes_2.col(r) *= phase;
  }
  return sd;
}

GriddedWavefunction classical_pulse(const SchmidtDecomposition& sd) {
  if (sd.modes_1.cols() == 0) throw ValidationError("classical_pulse: empty Schmidt decomposition");
  return GriddedWavefunction{sd.grid, sd.modes_1.col(0) * sd.modes_2.col(0).transpose()};
}

double population_of(const ResponseTable& table, int k, const GriddedWavefunction& psi) {
  if (k < 0 || k >= static_cast<int>(table.responses.size())) {
    throw ValidationError(fmt::format("population_of: final index {} out of range", k));
  }
  if (!(psi.grid == table.grid)) throw ValidationError("population_of: wavefunction and response table grids differ");
  const auto& w = psi.grid.weights();
  const cplx amplitude = w.dot(table.responses[static_cast<std::size_t>(k)].cwiseProduct(psi.amplitudes) * w);
  return std::norm(amplitude) / table.norms(k);
}

double population_of(const LevelScheme& scheme, int k, const GriddedWavefunction& psi) {
  return population_of(ResponseTable::build(scheme, psi.grid), k, psi);
}

Eigen::VectorXd populations_of(const ResponseTable& table, const GriddedWavefunction& psi) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(table.responses.size()));
  for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = population_of(table, static_cast<int>(k), psi);
  return p;
}

std::vector<SpectralPeak> find_peaks(const GriddedWavefunction& psi, std::size_t max_peaks, double min_relative) {
  const Eigen::MatrixXd intensity = psi.amplitudes.cwiseAbs2();
  const double floor = min_relative * intensity.maxCoeff();
  const auto n = intensity.rows();
  const auto& x = psi.grid.nodes();

  std::vector<SpectralPeak> peaks;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const double v = intensity(a, b);
      if (v < floor) continue;
      bool is_max = true;
      for (int da = -1; da <= 1 && is_max; ++da) {
        for (int db = -1; db <= 1; ++db) {
          if (da == 0 && db == 0) continue;
          const auto aa = a + da;
          const auto bb = b + db;
          if (aa < 0 || bb < 0 || aa >= n || bb >= n) continue;
          if (intensity(aa, bb) >= v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({x(a), x(b), v});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const SpectralPeak& l, const SpectralPeak& r) {
    if (l.intensity != r.intensity) return l.intensity > r.intensity;
    if (l.omega1 != r.omega1) return l.omega1 < r.omega1;
    return l.omega2 < r.omega2;
  });
  if (peaks.size() > max_peaks) peaks.resize(max_peaks);
  return peaks;
}

GriddedWavefunction resample_classical(const LevelScheme& scheme, const Eigen::VectorXcd& coefficients,
                                       const SchmidtDecomposition& sd, const FrequencyGrid& display) {
  const auto& w = sd.grid.weights();
  const auto& nodes = sd.grid.nodes();
  // phi_1(x) ~ sum_b Phi(x, w_b) conj(psi_1(w_b)) w_b, up to a positive factor.
  const Eigen::MatrixXcd left = evaluate_cross(scheme, coefficients, display.nodes(), nodes);
  const Eigen::VectorXcd mode_1 = left * sd.modes_2.col(0).conjugate().cwiseProduct(w.cast<cplx>());
  const Eigen::MatrixXcd right = evaluate_cross(scheme, coefficients, nodes, display.nodes());
  const Eigen::VectorXcd mode_2 = right.transpose() * sd.modes_1.col(0).conjugate().cwiseProduct(w.cast<cplx>());

  GriddedWavefunction out{display, mode_1 * mode_2.transpose()};
  out.normalize();
  return out;
}

}  // namespace selpol
