#include "selpol/frequency_grid.hpp"

#include "selpol/errors.hpp"
#include "selpol/level_scheme.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace selpol {

FrequencyGrid FrequencyGrid::uniform(double lo, double hi, int n_points) {
  if (n_points < min_points) {
    throw ValidationError(fmt::format("grid: n_points must be >= {}, got {}", min_points, n_points));
  }
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ValidationError(fmt::format("grid: need lo < hi, got [{}, {}]", lo, hi));
  }
  FrequencyGrid g;
  g.kind_ = Kind::uniform;
  g.lo_ = lo;
  g.hi_ = hi;
  g.spacing_ = (hi - lo) / (n_points - 1);
  g.nodes_ = Eigen::VectorXd::LinSpaced(n_points, lo, hi);
  g.weights_ = Eigen::VectorXd::Constant(n_points, g.spacing_);
  return g;
}

FrequencyGrid FrequencyGrid::lorentzian_mapped(double center, double scale, int n_points) {
  if (n_points < min_points) {
    throw ValidationError(fmt::format("grid: n_points must be >= {}, got {}", min_points, n_points));
  }
  if (!(scale > 0.0) || !std::isfinite(center) || !std::isfinite(scale)) {
    throw ValidationError("grid: mapped grid needs a finite center and scale > 0");
  }
  FrequencyGrid g;
  g.kind_ = Kind::lorentzian_mapped;
  g.lo_ = center - scale;
  g.hi_ = center + scale;
  g.spacing_ = scale;
  g.nodes_.resize(n_points);
  g.weights_.resize(n_points);
  const double dtheta = std::numbers::pi / n_points;
  for (int i = 0; i < n_points; ++i) {
    const double theta = -0.5 * std::numbers::pi + (i + 0.5) * dtheta;
    const double c = std::cos(theta);
    g.nodes_(i) = center + scale * std::tan(theta);
    g.weights_(i) = scale * dtheta / (c * c);
  }
  return g;
}

bool FrequencyGrid::covers(double omega, double margin) const {
  return omega - margin >= nodes_(0) && omega + margin <= nodes_(nodes_.size() - 1);
}

std::string FrequencyGrid::describe() const {
  if (kind_ == Kind::uniform) {
    return fmt::format("uniform [{:.6g}, {:.6g}] x {} (spacing {:.6g})", lo_, hi_, size(), spacing_);
  }
  return fmt::format("lorentzian-mapped center {:.6g} scale {:.6g} x {}", center(), spacing_, size());
}

bool FrequencyGrid::operator==(const FrequencyGrid& other) const {
  return kind_ == other.kind_ && lo_ == other.lo_ && hi_ == other.hi_ && size() == other.size();
}

const char* to_string(FrequencyGrid::Kind kind) {
  return kind == FrequencyGrid::Kind::uniform ? "uniform" : "lorentzian_mapped";
}

std::vector<double> resonance_frequencies(const LevelScheme& scheme) {
  std::vector<double> out;
  for (int j = 0; j < scheme.n_e(); ++j) out.push_back(scheme.omega_e(j));
  for (int k = 0; k < scheme.n_f(); ++k) {
    for (int j = 0; j < scheme.n_e(); ++j) out.push_back(scheme.omega_f(k) - scheme.omega_e(j));
    out.push_back(0.5 * scheme.omega_f(k));
  }
  return out;
}

std::vector<std::string> uncovered_resonances(const LevelScheme& scheme, const FrequencyGrid& grid,
                                              double margin_factor) {
  const double margin = margin_factor * scheme.max_gamma();
  std::vector<std::string> missing;
  for (int j = 0; j < scheme.n_e(); ++j) {
    if (!grid.covers(scheme.omega_e(j), margin)) {
      missing.push_back(fmt::format("omega_e{} = {:.6g}", j + 1, scheme.omega_e(j)));
    }
  }
  for (int k = 0; k < scheme.n_f(); ++k) {
    for (int j = 0; j < scheme.n_e(); ++j) {
      const double w = scheme.omega_f(k) - scheme.omega_e(j);
      if (!grid.covers(w, margin)) missing.push_back(fmt::format("omega_f{} - omega_e{} = {:.6g}", k + 1, j + 1, w));
    }
    const double half = 0.5 * scheme.omega_f(k);
    if (!grid.covers(half, margin)) missing.push_back(fmt::format("omega_f{} / 2 = {:.6g}", k + 1, half));
  }
  return missing;
}

void require_coverage(const LevelScheme& scheme, const FrequencyGrid& grid, double margin_factor) {
  const auto missing = uncovered_resonances(scheme, grid, margin_factor);
  if (missing.empty()) return;
  std::string list;
  for (const auto& m : missing) list += (list.empty() ? "" : "; ") + m;
  throw GridCoverage(fmt::format("grid {} does not cover resonances with margin {} x max gamma: {}",
                                 grid.describe(), margin_factor, list));
}

FrequencyGrid default_grid(const LevelScheme& scheme, int n_points) {
  const auto res = resonance_frequencies(scheme);
  const auto [lo_it, hi_it] = std::minmax_element(res.begin(), res.end());
  const double margin = 20.0 * scheme.max_gamma();
  const double lo = std::max(0.0, *lo_it - margin);
  const double hi = *hi_it + margin;
  return FrequencyGrid::uniform(lo, hi, n_points);
}

FrequencyGrid quadrature_grid(const LevelScheme& scheme, int n_points) {
  const auto res = resonance_frequencies(scheme);
  const auto [lo_it, hi_it] = std::minmax_element(res.begin(), res.end());
  const double center = 0.5 * (*lo_it + *hi_it);
  const double half_width = 0.5 * (*hi_it - *lo_it);
  const double scale = std::max(0.5 * half_width, 4.0 * scheme.max_gamma());
  return FrequencyGrid::lorentzian_mapped(center, scale, n_points);
}

}  // namespace selpol
