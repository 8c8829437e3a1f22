#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace selpol {

struct LevelScheme;

/// One frequency axis with quadrature weights; two-photon quantities live on
/// the tensor product of an axis with itself.
///
/// Two node layouts are supported:
///  - uniform: n equidistant nodes on [lo, hi], every weight equal to the
///    spacing (interior-point trapezoid);
///  - lorentzian-mapped: omega = center + scale * tan(theta) with theta on a
///    midpoint grid over (-pi/2, pi/2). This covers the whole real axis, so
///    Lorentzian tails are not truncated, while keeping the node density
///    highest around the resonance band.
class FrequencyGrid {
 public:
  enum class Kind { uniform, lorentzian_mapped };

  static constexpr int min_points = 64;

  /// Empty grid; assign from one of the factories before use.
  FrequencyGrid() = default;

  static FrequencyGrid uniform(double lo, double hi, int n_points);
  static FrequencyGrid lorentzian_mapped(double center, double scale, int n_points);

  Kind kind() const { return kind_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Uniform: the interval ends. Mapped: the centre +- scale band.
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// Uniform: node spacing. Mapped: the tan() scale.
  double spacing() const { return spacing_; }
  double center() const { return 0.5 * (lo_ + hi_); }

  /// True when omega +- margin lies inside the sampled domain.
  bool covers(double omega, double margin) const;

  std::string describe() const;

  bool operator==(const FrequencyGrid& other) const;

 private:
  Kind kind_ = Kind::uniform;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double spacing_ = 0.0;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
};

const char* to_string(FrequencyGrid::Kind kind);

/// Single-photon frequencies at which two-photon amplitudes peak: every
/// omega_e, every omega_f - omega_e and every omega_f / 2.
std::vector<double> resonance_frequencies(const LevelScheme& scheme);

/// Resonances not covered with a margin of margin_factor * max gamma.
std::vector<std::string> uncovered_resonances(const LevelScheme& scheme, const FrequencyGrid& grid,
                                              double margin_factor = 10.0);

/// Throws GridCoverage listing every uncovered resonance.
void require_coverage(const LevelScheme& scheme, const FrequencyGrid& grid, double margin_factor = 10.0);

/// Uniform grid spanning the resonance band +- 20 max gamma, clipped to
/// positive frequencies.
FrequencyGrid default_grid(const LevelScheme& scheme, int n_points = 512);

/// Lorentzian-mapped grid centred on the resonance band, used for every
/// quadrature that is compared against closed forms.
FrequencyGrid quadrature_grid(const LevelScheme& scheme, int n_points = 512);

}  // namespace selpol
