#include "selpol/dressed_system.hpp"

#include "selpol/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace selpol {

namespace {

bool atom_excited(std::size_t config, int atom, int n_atoms) {
  return ((config >> (n_atoms - 1 - atom)) & 1U) != 0U;
}

double sign_threshold() { return 1e-6; }

void make_largest_component_positive(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0.0) v = -v;
}

}  // namespace

std::size_t SystemParams::dimension() const {
  if (atom_frequencies.empty() || n_atoms() > 30 || n_max < 0) return 0;
  return (std::size_t{1} << n_atoms()) * static_cast<std::size_t>(n_max + 1);
}

void SystemParams::validate() const {
  if (atom_frequencies.empty()) throw ValidationError("atom_frequencies: at least one atom is required");
  if (couplings.size() != atom_frequencies.size()) {
    throw ValidationError(fmt::format("couplings: expected {} entries (one per atom), got {}",
                                      atom_frequencies.size(), couplings.size()));
  }
  for (double w : atom_frequencies) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("atom_frequencies: all entries must be > 0");
  }
  if (!(cavity_frequency > 0.0) || !std::isfinite(cavity_frequency)) {
    throw ValidationError("cavity_frequency: must be > 0");
  }
  for (double g : couplings) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw ValidationError("couplings: all entries must be >= 0");
  }
  // The double-excitation manifold needs photon numbers up to two.
  if (n_max < 2) throw ValidationError(fmt::format("n_max: must be >= 2, got {}", n_max));
  if (n_atoms() > 20) throw DimensionOverflow(fmt::format("n_atoms = {} is not supported", n_atoms()));
  if (dimension() > max_dimension) {
    throw DimensionOverflow(fmt::format("Hilbert space dimension {} = 2^{} x {} exceeds the cap {}",
                                        dimension(), n_atoms(), n_max + 1, max_dimension));
  }
}

int BasisLabel::excitations() const {
  return photons + static_cast<int>(std::count(atoms.begin(), atoms.end(), 'e'));
}

std::vector<BasisLabel> product_basis(const SystemParams& params) {
  const int n_atoms = params.n_atoms();
  const std::size_t n_configs = std::size_t{1} << n_atoms;
  std::vector<BasisLabel> basis;
  basis.reserve(params.dimension());
  for (std::size_t c = 0; c < n_configs; ++c) {
    std::string atoms(static_cast<std::size_t>(n_atoms), 'g');
    for (int a = 0; a < n_atoms; ++a) {
      if (atom_excited(c, a, n_atoms)) atoms[static_cast<std::size_t>(a)] = 'e';
    }
    for (int m = 0; m <= params.n_max; ++m) basis.push_back({atoms, m});
  }
  return basis;
}

Eigen::MatrixXd build_hamiltonian(const SystemParams& params) {
  params.validate();
  const int n_atoms = params.n_atoms();
  const int n_fock = params.n_max + 1;
  const auto dim = static_cast<Eigen::Index>(params.dimension());
  const std::size_t n_configs = std::size_t{1} << n_atoms;

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t c = 0; c < n_configs; ++c) {
    double atomic = 0.0;
    for (int a = 0; a < n_atoms; ++a) {
      if (atom_excited(c, a, n_atoms)) atomic += params.atom_frequencies[static_cast<std::size_t>(a)];
    }
    for (int m = 0; m < n_fock; ++m) {
      const auto i = static_cast<Eigen::Index>(c * n_fock + m);
      h(i, i) = atomic + params.cavity_frequency * m;
    }
  }

  // g_n (sigma_n^+ + sigma_n)(b + b^+): flip atom n, change photon number by one.
  for (std::size_t c = 0; c < n_configs; ++c) {
    for (int a = 0; a < n_atoms; ++a) {
      const double g = params.couplings[static_cast<std::size_t>(a)];
      if (g == 0.0) continue;
      const std::size_t flipped = c ^ (std::size_t{1} << (n_atoms - 1 - a));
      for (int m = 0; m + 1 < n_fock; ++m) {
        const auto i = static_cast<Eigen::Index>(c * n_fock + m);
        const auto j = static_cast<Eigen::Index>(flipped * n_fock + m + 1);
        const double element = g * std::sqrt(static_cast<double>(m + 1));
        h(j, i) += element;
        h(i, j) += element;
      }
    }
  }
  return h;
}

Eigen::MatrixXd dipole_operator(const SystemParams& params) {
  const int n_atoms = params.n_atoms();
  const int n_fock = params.n_max + 1;
  const auto dim = static_cast<Eigen::Index>(params.dimension());
  const std::size_t n_configs = std::size_t{1} << n_atoms;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t c = 0; c < n_configs; ++c) {
    for (int a = 0; a < n_atoms; ++a) {
      const std::size_t flipped = c ^ (std::size_t{1} << (n_atoms - 1 - a));
      for (int m = 0; m < n_fock; ++m) {
        d(static_cast<Eigen::Index>(flipped * n_fock + m), static_cast<Eigen::Index>(c * n_fock + m)) += 1.0;
      }
    }
  }
  return d;
}

Eigen::VectorXd excitation_number(const SystemParams& params) {
  const auto basis = product_basis(params);
  Eigen::VectorXd x(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) x(static_cast<Eigen::Index>(i)) = basis[i].excitations();
  return x;
}

DressedSpectrum diagonalize(const Eigen::MatrixXd& hamiltonian) {
  if (hamiltonian.rows() != hamiltonian.cols() || hamiltonian.rows() == 0) {
    throw ValidationError("diagonalize: matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, hamiltonian.cwiseAbs().maxCoeff());
  const double asymmetry = (hamiltonian - hamiltonian.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > 1e-12 * scale) {
    throw ValidationError(fmt::format("diagonalize: matrix is not symmetric (max |H - H^T| = {:.3e})", asymmetry));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  if (solver.info() != Eigen::Success) {
    throw EigenSolverFailure(fmt::format(
        "symmetric eigensolver did not converge: dimension {}, implicit QR limit {} sweeps per eigenvalue "
        "({} total), info code {}",
        hamiltonian.rows(), Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>::m_maxIterations,
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>::m_maxIterations * hamiltonian.rows(),
        static_cast<int>(solver.info())));
  }

  DressedSpectrum spectrum;
  spectrum.energies = solver.eigenvalues();
  spectrum.eigenvectors = solver.eigenvectors();

  const auto n = spectrum.energies.size();
  const double radius = std::max(1.0, spectrum.energies.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto v = spectrum.eigenvectors.col(k);
    const double residual = (hamiltonian * v - spectrum.energies(k) * v).norm();
    if (residual > 1e-9 * radius) {
      throw EigenSolverFailure(fmt::format("eigenpair {} residual {:.3e} exceeds bound", k, residual));
    }
  }
  const double ortho =
      (spectrum.eigenvectors.transpose() * spectrum.eigenvectors - Eigen::MatrixXd::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();
  if (ortho > 1e-10) {
    throw EigenSolverFailure(fmt::format("eigenvectors not orthonormal (max deviation {:.3e})", ortho));
  }
  return spectrum;
}

DressedSpectrum diagonalize(const SystemParams& params) {
  DressedSpectrum spectrum = diagonalize(build_hamiltonian(params));
  spectrum.basis = product_basis(params);
  const Eigen::VectorXd x = excitation_number(params);
  spectrum.excitations = (spectrum.eigenvectors.array().square().colwise() * x.array()).colwise().sum().transpose();
  return spectrum;
}

int manifold_size(int n_atoms, int manifold) {
  // Configurations with k excited atoms and (manifold - k) photons.
  int count = 0;
  long binom = 1;
  for (int k = 0; k <= std::min(n_atoms, manifold); ++k) {
    count += static_cast<int>(binom);
    binom = binom * (n_atoms - k) / (k + 1);
  }
  return count;
}

std::vector<int> ManifoldAssignment::tracked() const {
  std::vector<int> out{ground};
  out.insert(out.end(), intermediate.begin(), intermediate.end());
  out.insert(out.end(), final.begin(), final.end());
  return out;
}

ManifoldAssignment classify_manifolds(const DressedSpectrum& spectrum, int n_atoms) {
  const int sizes[3] = {manifold_size(n_atoms, 0), manifold_size(n_atoms, 1), manifold_size(n_atoms, 2)};
  const int n_tracked = sizes[0] + sizes[1] + sizes[2];
  if (spectrum.excitations.size() < n_tracked) {
    throw ManifoldAmbiguity(fmt::format("spectrum has {} states, need at least {} to classify",
                                        spectrum.excitations.size(), n_tracked));
  }

  std::vector<int> rounded(static_cast<std::size_t>(n_tracked));
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < n_tracked; ++i) {
    rounded[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(spectrum.excitations(i)));
  }

  ManifoldAssignment out;
  bool ordered = true;
  int expected_manifold = 0;
  int seen_in_manifold = 0;
  for (int i = 0; i < n_tracked; ++i) {
    while (expected_manifold < 3 && seen_in_manifold == sizes[expected_manifold]) {
      ++expected_manifold;
      seen_in_manifold = 0;
    }
    const int m = rounded[static_cast<std::size_t>(i)];
    if (m >= 0 && m <= 2) ++counts[m];
    if (m != expected_manifold) ordered = false;
    ++seen_in_manifold;
    if (m == 0) out.ground = i;
    if (m == 1) out.intermediate.push_back(i);
    if (m == 2) out.final.push_back(i);
  }

  if (!ordered || counts[0] != sizes[0] || counts[1] != sizes[1] || counts[2] != sizes[2]) {
    std::string values;
    for (int i = 0; i < n_tracked; ++i) {
      values += fmt::format("{}{:.3f}", i == 0 ? "" : ", ", spectrum.excitations(i));
    }
    throw ManifoldAmbiguity(fmt::format(
        "lowest {} dressed states do not split into manifolds of sizes ({}, {}, {}); "
        "excitation expectations: [{}] (coupling too strong for this classification)",
        n_tracked, sizes[0], sizes[1], sizes[2], values));
  }
  return out;
}

void apply_sign_convention(DressedSpectrum& spectrum, const ManifoldAssignment& assignment,
                           const Eigen::MatrixXd& dipole_op) {
  auto& vecs = spectrum.eigenvectors;
  auto mu = [&](int r, int s) { return vecs.col(r).dot(dipole_op * vecs.col(s)); };

  make_largest_component_positive(vecs.col(assignment.ground));

  for (int e : assignment.intermediate) {
    const double value = mu(assignment.ground, e);
    if (std::abs(value) >= sign_threshold()) {
      if (value < 0.0) vecs.col(e) *= -1.0;
    } else {
      make_largest_component_positive(vecs.col(e));
    }
  }

  const int e1 = assignment.intermediate.front();
  for (int f : assignment.final) {
    const double value = mu(e1, f);
    if (std::abs(value) >= sign_threshold()) {
      if (value < 0.0) vecs.col(f) *= -1.0;
      continue;
    }
    double best = 0.0;
    for (int e : assignment.intermediate) {
      const double candidate = mu(e, f);
      if (std::abs(candidate) > std::abs(best)) best = candidate;
    }
    if (std::abs(best) >= sign_threshold()) {
      if (best < 0.0) vecs.col(f) *= -1.0;
    } else {
      make_largest_component_positive(vecs.col(f));
    }
  }
}

DipoleMatrix dipole_matrix(const DressedSpectrum& spectrum, const ManifoldAssignment& assignment,
                           const Eigen::MatrixXd& dipole_op) {
  const auto tracked = assignment.tracked();
  const auto n = static_cast<Eigen::Index>(tracked.size());
  Eigen::MatrixXd v(spectrum.eigenvectors.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) v.col(i) = spectrum.eigenvectors.col(tracked[static_cast<std::size_t>(i)]);
  const Eigen::MatrixXd raw = v.transpose() * dipole_op * v;
  return DipoleMatrix{0.5 * (raw + raw.transpose())};
}

Eigen::VectorXd DressedSystem::tracked_energies() const {
  const auto tracked = assignment.tracked();
  Eigen::VectorXd out(static_cast<Eigen::Index>(tracked.size()));
  for (std::size_t i = 0; i < tracked.size(); ++i) out(static_cast<Eigen::Index>(i)) = spectrum.energies(tracked[i]);
  return out;
}

DressedSystem solve_dressed_system(const SystemParams& params) {
  DressedSystem out;
  out.params = params;
  out.spectrum = diagonalize(params);
  out.assignment = classify_manifolds(out.spectrum, params.n_atoms());
  const Eigen::MatrixXd d = dipole_operator(params);
  apply_sign_convention(out.spectrum, out.assignment, d);
  out.dipoles = dipole_matrix(out.spectrum, out.assignment, d);
  return out;
}

ConvergenceReport convergence_check(const SystemParams& params, int extra_photons) {
  SystemParams reference = params;
  reference.n_max = params.n_max + extra_photons;
  reference.max_dimension = std::max(params.max_dimension, reference.dimension());

  const DressedSystem coarse = solve_dressed_system(params);
  const DressedSystem fine = solve_dressed_system(reference);

  ConvergenceReport report;
  report.n_max = params.n_max;
  report.n_max_reference = reference.n_max;
  report.energy_drift = (coarse.tracked_energies() - fine.tracked_energies()).cwiseAbs().maxCoeff();
  report.dipole_drift = (coarse.dipoles.entries - fine.dipoles.entries).cwiseAbs().maxCoeff();
  return report;
}

}  // namespace selpol
