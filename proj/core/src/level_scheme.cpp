#include "selpol/level_scheme.hpp"

#include "selpol/dressed_system.hpp"
#include "selpol/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace selpol {

double LevelScheme::max_gamma() const {
  return std::max(gamma_e.size() ? gamma_e.maxCoeff() : 0.0, gamma_f.size() ? gamma_f.maxCoeff() : 0.0);
}

double LevelScheme::min_gamma() const {
  double out = std::numeric_limits<double>::infinity();
  if (gamma_e.size()) out = std::min(out, gamma_e.minCoeff());
  if (gamma_f.size()) out = std::min(out, gamma_f.minCoeff());
  return out;
}

void LevelScheme::validate() const {
  if (n_e() == 0 || n_f() == 0) throw ValidationError("level scheme: need at least one intermediate and one final level");
  if (gamma_e.size() != n_e()) throw ValidationError("level scheme: gamma_e must have one entry per intermediate level");
  if (gamma_f.size() != n_f()) throw ValidationError("level scheme: gamma_f must have one entry per final level");
  if (mu_ge.size() != n_e()) throw ValidationError("level scheme: mu_ge must have one entry per intermediate level");
  if (mu_ef.rows() != n_e() || mu_ef.cols() != n_f()) {
    throw ValidationError(fmt::format("level scheme: mu_ef must be {} x {}", n_e(), n_f()));
  }
  auto all_positive = [](const Eigen::VectorXd& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0 && std::isfinite(x); });
  };
  if (!all_positive(omega_e) || !all_positive(omega_f)) {
    throw ValidationError("level scheme: energies must be positive relative to the ground state");
  }
  if (!all_positive(gamma_e) || !all_positive(gamma_f)) {
    throw ValidationError("level scheme: linewidths must be > 0");
  }
  if (!mu_ge.allFinite() || !mu_ef.allFinite()) throw ValidationError("level scheme: dipoles must be finite");
}

LevelScheme LevelScheme::with_linewidths(double ge, double gf) const {
  LevelScheme out = *this;
  out.gamma_e.setConstant(ge);
  out.gamma_f.setConstant(gf);
  return out;
}

LevelScheme LevelScheme::permute_finals(const std::vector<int>& order) const {
  if (static_cast<int>(order.size()) != n_f()) throw ValidationError("permute_finals: order must list every final level");
  LevelScheme out = *this;
  for (int k = 0; k < n_f(); ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    out.omega_f(k) = omega_f(src);
    out.gamma_f(k) = gamma_f(src);
    out.mu_ef.col(k) = mu_ef.col(src);
  }
  return out;
}

LevelScheme make_level_scheme(const DressedSystem& system, double gamma_f, double gamma_e_ratio) {
  if (!(gamma_f > 0.0)) throw ValidationError("gamma_f: must be > 0");
  if (!(gamma_e_ratio > 0.0)) throw ValidationError("gamma_e_ratio: must be > 0");

  const auto& a = system.assignment;
  const auto& mu = system.dipoles.entries;  // tracked order: g, e.., f..
  const int n_e = static_cast<int>(a.intermediate.size());
  const int n_f = static_cast<int>(a.final.size());
  const double e_ground = system.spectrum.energies(a.ground);

  LevelScheme s;
  s.omega_e.resize(n_e);
  s.omega_f.resize(n_f);
  s.mu_ge.resize(n_e);
  s.mu_ef.resize(n_e, n_f);
  for (int j = 0; j < n_e; ++j) {
    s.omega_e(j) = system.spectrum.energies(a.intermediate[static_cast<std::size_t>(j)]) - e_ground;
    s.mu_ge(j) = mu(0, 1 + j);
    for (int k = 0; k < n_f; ++k) s.mu_ef(j, k) = mu(1 + j, 1 + n_e + k);
  }
  for (int k = 0; k < n_f; ++k) s.omega_f(k) = system.spectrum.energies(a.final[static_cast<std::size_t>(k)]) - e_ground;
  s.gamma_e = Eigen::VectorXd::Constant(n_e, gamma_e_ratio * gamma_f);
  s.gamma_f = Eigen::VectorXd::Constant(n_f, gamma_f);
  s.validate();
  return s;
}

}  // namespace selpol
