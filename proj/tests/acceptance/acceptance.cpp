// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include "support.hpp"

#include "selpol/experiments.hpp"

#include <fmt/format.h>

#include <chrono>
#include <functional>
#include <string>

using namespace selpol;
using namespace selpol::testing;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

double max_relative(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < a.rows(); ++j)
    for (Eigen::Index k = 0; k < a.cols(); ++k) worst = std::max(worst, std::abs(a(j, k) - b(j, k)) / std::abs(b(j, k)));
  return worst;
}

Verdict spectrum_table() {
  const auto start = Clock::now();
  const DressedSystem system = solve_dressed_system(SystemParams{});
  const double runtime = seconds_since(start);
  const double energies[] = {-0.0204, 0.698, 0.979, 1.262, 1.580, 1.969, 2.000, 2.370};
  const double ge[] = {1.0856, 0.0016, 0.9393};
  const double ef[3][4] = {{0.8913, 0.4752, 0.7048, 0.1252}, {0.7570, -0.0795, -0.0734, 0.6879}, {-0.2048, 0.5152, 0.7059, -0.7792}};
  const Eigen::VectorXd e = system.tracked_energies();
  const Eigen::MatrixXd& mu = system.dipoles.entries;
  double energy_err = 0.0, dipole_err = 0.0;
  for (int i = 0; i < 8; ++i) energy_err = std::max(energy_err, std::abs(e(i) - energies[i]));
  for (int j = 0; j < 3; ++j) {
    dipole_err = std::max(dipole_err, std::abs(mu(0, 1 + j) - ge[j]));
    for (int k = 0; k < 4; ++k) dipole_err = std::max(dipole_err, std::abs(mu(1 + j, 4 + k) - ef[j][k]));
  }
  const bool pass = energy_err <= 0.005 && dipole_err <= 0.005 && runtime < 1.0;
  return {pass, fmt::format("max |dE| = {:.2e}, max |dmu| = {:.2e} (tol 5e-3), {:.3f} s (limit 1 s)", energy_err,
                            dipole_err, runtime)};
}

Verdict overlap_oracle() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string uniform_note;
  for (double gf : {0.01, 0.1}) {
    const LevelScheme s = reference_scheme(gf);
    const Eigen::MatrixXcd sigma = overlap_sums(s);
    worst = std::max(worst, max_relative(quadrature_overlaps(s, analysis_grid(s, GridSettings{})), sigma));
    GridSettings uniform;
    uniform.kind = FrequencyGrid::Kind::uniform;
    uniform_note += fmt::format(" uniform@{}: {:.1e}", gf, max_relative(quadrature_overlaps(s, analysis_grid(s, uniform)), sigma));
  }
  const double runtime = seconds_since(start);
  const bool pass = worst < 0.01 && runtime < 60.0;
  return {pass, fmt::format("max relative error {:.2e} on the 512^2 lorentzian-mapped default grid (tol 1e-2); uniform-grid diagnostics:{}, {:.1f} s", worst,
                            uniform_note, runtime)};
}

Verdict factor_two() {
  const PanelDataset data = run_optimal_panels([] {
    ScenarioConfig c = fig2_scenario();
    c.targets = {0};
    return c;
  }(), reference_system());
  const TargetPanel& p = data.panels.at(0);
  const double ratio = p.entangled_populations(0) / p.classical_populations(0);
  const double r1 = p.r1_squared();
  const double product = ratio * r1;
  const bool in_band = ratio >= 1.7 && ratio <= 2.3;
  const bool schmidt = std::abs(product - 1.0) <= 0.02;
  return {in_band && schmidt,
          fmt::format("P_ent/P_cl = {:.4f} (band [1.7, 2.3]: {}), r1^2 = {:.4f}, ratio * r1^2 = {:.4f} (within 2%: {})",
                      ratio, in_band ? "yes" : "no", r1, product, schmidt ? "yes" : "no")};
}

Verdict selectivity_point() {
  const LevelScheme s = reference_scheme(0.05);
  const SweepPoint p = run_sweep_point(s, GridSettings{}, 1, 2);
  const bool pass = p.s_selective >= 0.20 && p.s_selective <= 0.30 && p.s_selective > p.s_indistinctive;
  return {pass, fmt::format("S_selective = {:.6f} (band [0.20, 0.30]), S_indistinctive = {:.6f}", p.s_selective,
                            p.s_indistinctive)};
}

Verdict sweep_shape() {
  const auto start = Clock::now();
  ScenarioConfig config;
  config.sweep = SweepSettings{};
  const SweepResult r = run_selectivity_sweep(config, reference_system(), 0);
  const double runtime = seconds_since(start);
  bool monotone = true;
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    const auto& a = r.points[i - 1];
    const auto& b = r.points[i];
    monotone &= b.s_selective < a.s_selective && b.s_classical < a.s_classical && b.s_indistinctive < a.s_indistinctive &&
                b.ratio_selective() > a.ratio_selective();
  }
  const bool pass = monotone && r.points.size() == 19 && runtime < 600.0;
  return {pass, fmt::format("{} points, monotone: {}, ratio {:.3f} -> {:.3f}, {:.1f} s (limit 600 s)", r.points.size(),
                            monotone ? "yes" : "no", r.points.front().ratio_selective(),
                            r.points.back().ratio_selective(), runtime)};
}

Verdict optimizer_maximality() {
  std::mt19937_64 rng(20240601);
  double worst_excess = -1e300;  // max over cases of (best probe - lambda)
  double worst_gap = 0.0;        // max over cases of (lambda - best probe)
  bool pass = true;
  for (int n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::MatrixXcd m = random_overlap(rng, n);
      for (int t = 0; t < n; ++t) {
        const SelectiveSolution s = solve_selective(m, t);
        double best = -1e300;
        for (int i = 0; i < 10000; ++i) {
          Eigen::VectorXcd v = random_complex(rng, n, 1);
          v /= std::sqrt((v.adjoint() * m * v)(0, 0).real());
          best = std::max(best, selective_functional(m, v, t));
        }
        worst_excess = std::max(worst_excess, best - s.lambda);
        worst_gap = std::max(worst_gap, std::max(0.0, s.lambda - best));
        pass &= best <= s.lambda + 1e-12;
      }
    }
  }
  double analytic = 0.0;
  for (double a : {0.0, 0.3, 0.6, 0.9, 0.99}) {
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, a, a, 1.0;
    analytic = std::max(analytic, std::abs(solve_selective(m, 0).lambda - std::sqrt(1.0 - a * a)));
  }
  pass &= analytic <= 1e-10;
  return {pass, fmt::format("max(best probe - lambda) = {:.2e} (tol 1e-12), max(lambda - best probe) = {:.2e}, "
                            "2x2 analytic error {:.1e} (tol 1e-10)",
                            worst_excess, worst_gap, analytic)};
}

Eigen::MatrixXd all_populations(const LevelScheme& s, Eigen::VectorXd* s_values) {
  const OverlapMatrix o = overlap_matrix(s);
  Eigen::MatrixXd out(s.n_f(), s.n_f());
  s_values->resize(s.n_f());
  for (int t = 0; t < s.n_f(); ++t) {
    out.row(t) = solve_selective(o, t).populations.transpose();
    (*s_values)(t) = selectivity(out.row(t).transpose(), t, (t + 1) % s.n_f());
  }
  return out;
}

Verdict invariances() {
  std::mt19937_64 rng(77);
  double drift = 0.0;
  for (double gf : {0.01, 0.05, 0.1}) {
    const LevelScheme base = reference_scheme(gf);
    Eigen::VectorXd s_ref, s_new;
    const Eigen::MatrixXd p_ref = all_populations(base, &s_ref);
    auto compare = [&](const Eigen::MatrixXd& p, const Eigen::VectorXd& sv) {
      drift = std::max({drift, (p - p_ref).cwiseAbs().maxCoeff(), (sv - s_ref).cwiseAbs().maxCoeff()});
    };

    // Eigenvector sign flips, dipoles recomputed without the convention.
    for (int trial = 0; trial < 8; ++trial) {
      DressedSystem flipped = reference_system();
      std::bernoulli_distribution coin(0.5);
      for (int idx : flipped.assignment.tracked())
        if (coin(rng)) flipped.spectrum.eigenvectors.col(idx) *= -1.0;
      flipped.dipoles = dipole_matrix(flipped.spectrum, flipped.assignment, dipole_operator(flipped.params));
      compare(all_populations(make_level_scheme(flipped, gf), &s_new), s_new);
    }
    // Global dipole rescale.
    LevelScheme loud = base;
    loud.mu_ge *= 2.7;
    loud.mu_ef *= 2.7;
    compare(all_populations(loud, &s_new), s_new);
    // Relabeling, mapped back to the original order.
    const std::vector<int> order{3, 1, 0, 2};
    const Eigen::MatrixXd p_perm = all_populations(base.permute_finals(order), &s_new);
    Eigen::MatrixXd back(4, 4);
    for (int t = 0; t < 4; ++t)
      for (int k = 0; k < 4; ++k) back(order[t], order[k]) = p_perm(t, k);
    drift = std::max(drift, (back - p_ref).cwiseAbs().maxCoeff());
  }

  double weight_err = 0.0, asymmetry = 0.0;
  for (double gf : {0.01, 0.1}) {
    ScenarioConfig c = gf < 0.05 ? fig2_scenario() : fig3_scenario();
    const PanelDataset data = run_optimal_panels(c, reference_system());
    for (const auto& p : data.panels) {
      weight_err = std::max(weight_err, std::abs(p.schmidt.total_weight() - 1.0));
      asymmetry = std::max(asymmetry, p.wavefunction.asymmetry() / p.wavefunction.amplitudes.cwiseAbs().maxCoeff());
    }
  }
  const bool pass = drift <= 1e-10 && weight_err <= 1e-8 && asymmetry <= 1e-10;
  return {pass, fmt::format("population/S drift {:.1e} (tol 1e-10), |sum r^2 - 1| {:.1e} (tol 1e-8), "
                            "relative transpose asymmetry {:.1e} (tol 1e-10)",
                            drift, weight_err, asymmetry)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"dressed spectrum and dipole table", spectrum_table},
      {"closed-form overlaps vs 2D quadrature", overlap_oracle},
      {"entangled vs classical population for f1", factor_two},
      {"f2 selectivity at gamma_f = 0.05", selectivity_point},
      {"selectivity sweep shape", sweep_shape},
      {"selective solver maximality", optimizer_maximality},
      {"invariance suite", invariances},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = Clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    failures += v.pass ? 0 : 1;
    fmt::print("{} criterion {}: {}: {} [{:.2f} s]\n", v.pass ? "PASS" : "FAIL", index, name, v.detail, seconds_since(start));
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
