#include "selpol/serialization.hpp"

#include "selpol/config.hpp"
#include "selpol/errors.hpp"

#include <fmt/format.h>

#include <fstream>
#include <ostream>

namespace selpol {

using nlohmann::json;

namespace {

const json& field(const json& doc, const std::string& key, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key)) throw ValidationError(fmt::format("{}: missing field '{}'", where, key));
  return doc.at(key);
}

json vector_to_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_from_json(const json& doc, const std::string& name) {
  if (!doc.is_array()) throw ValidationError(fmt::format("field '{}': expected an array of numbers", name));
  Eigen::VectorXd v(static_cast<Eigen::Index>(doc.size()));
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number()) throw ValidationError(fmt::format("field '{}': expected an array of numbers", name));
    v(static_cast<Eigen::Index>(i)) = doc[i].get<double>();
  }
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& doc, const std::string& name) {
  if (!doc.is_array() || doc.empty()) throw ValidationError(fmt::format("field '{}': expected an array of rows", name));
  const auto rows = static_cast<Eigen::Index>(doc.size());
  const auto cols = static_cast<Eigen::Index>(doc[0].is_array() ? doc[0].size() : 0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::VectorXd row = vector_from_json(doc[static_cast<std::size_t>(r)], name);
    if (row.size() != cols) throw ValidationError(fmt::format("field '{}': ragged rows", name));
    m.row(r) = row.transpose();
  }
  return m;
}

json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

json complex_vector_to_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

std::vector<int> ints_from_json(const json& doc, const std::string& name) {
  if (!doc.is_array()) throw ValidationError(fmt::format("field '{}': expected an array of integers", name));
  std::vector<int> out;
  for (const auto& x : doc) {
    if (!x.is_number_integer()) throw ValidationError(fmt::format("field '{}': expected an array of integers", name));
    out.push_back(x.get<int>());
  }
  return out;
}

std::string state_label(const DressedSystem& system, int tracked_index) {
  const int n_e = static_cast<int>(system.assignment.intermediate.size());
  if (tracked_index == 0) return "g";
  if (tracked_index <= n_e) return fmt::format("e{}", tracked_index);
  return fmt::format("f{}", tracked_index - n_e);
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& doc) {
  if (!doc.is_array() || doc.size() != 2 || !doc[0].is_number() || !doc[1].is_number()) {
    throw ValidationError("complex number: expected [re, im]");
  }
  return {doc[0].get<double>(), doc[1].get<double>()};
}

json to_json(const LevelScheme& s) {
  return json{{"n_e", s.n_e()},
              {"n_f", s.n_f()},
              {"omega_e", vector_to_json(s.omega_e)},
              {"omega_f", vector_to_json(s.omega_f)},
              {"gamma_e", vector_to_json(s.gamma_e)},
              {"gamma_f", vector_to_json(s.gamma_f)},
              {"mu_ge", vector_to_json(s.mu_ge)},
              {"mu_ef", matrix_to_json(s.mu_ef)}};
}

LevelScheme level_scheme_from_json(const json& doc) {
  const std::string where = "level scheme";
  LevelScheme s;
  s.omega_e = vector_from_json(field(doc, "omega_e", where), "omega_e");
  s.omega_f = vector_from_json(field(doc, "omega_f", where), "omega_f");
  s.gamma_e = vector_from_json(field(doc, "gamma_e", where), "gamma_e");
  s.gamma_f = vector_from_json(field(doc, "gamma_f", where), "gamma_f");
  s.mu_ge = vector_from_json(field(doc, "mu_ge", where), "mu_ge");
  s.mu_ef = matrix_from_json(field(doc, "mu_ef", where), "mu_ef");
  s.validate();
  return s;
}

LevelScheme read_level_scheme(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open level scheme '{}'", path.string()));
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("level scheme '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return level_scheme_from_json(doc);
}

json to_json(const DressedSystem& system) {
  const auto& sp = system.spectrum;
  json basis = json::array();
  for (const auto& b : sp.basis) basis.push_back(json{{"atoms", b.atoms}, {"photons", b.photons}});
  const Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(sp.eigenvectors.data(), sp.eigenvectors.size());
  return json{
      {"format", "selpol-dressed-1"},
      {"params", system_params_to_json(system.params)},
      {"energies", vector_to_json(sp.energies)},
      {"excitations", vector_to_json(sp.excitations)},
      {"eigenvectors", json{{"rows", sp.eigenvectors.rows()}, {"cols", sp.eigenvectors.cols()},
                            {"column_major", vector_to_json(flat)}}},
      {"basis", basis},
      {"assignment", json{{"ground", system.assignment.ground},
                          {"intermediate", system.assignment.intermediate},
                          {"final", system.assignment.final}}},
      {"dipoles", matrix_to_json(system.dipoles.entries)},
  };
}

DressedSystem dressed_system_from_json(const json& doc) {
  const std::string where = "dressed system";
  if (field(doc, "format", where) != "selpol-dressed-1") throw ValidationError("dressed system: unsupported format");
  DressedSystem s;
  s.params = system_params_from_json(field(doc, "params", where));
  s.spectrum.energies = vector_from_json(field(doc, "energies", where), "energies");
  s.spectrum.excitations = vector_from_json(field(doc, "excitations", where), "excitations");
  const auto& ev = field(doc, "eigenvectors", where);
  const auto rows = field(ev, "rows", "eigenvectors").get<Eigen::Index>();
  const auto cols = field(ev, "cols", "eigenvectors").get<Eigen::Index>();
  const Eigen::VectorXd flat = vector_from_json(field(ev, "column_major", "eigenvectors"), "eigenvectors");
  if (flat.size() != rows * cols) throw ValidationError("field 'eigenvectors': size mismatch");
  s.spectrum.eigenvectors = Eigen::Map<const Eigen::MatrixXd>(flat.data(), rows, cols);
  for (const auto& b : field(doc, "basis", where)) {
    s.spectrum.basis.push_back(BasisLabel{field(b, "atoms", "basis").get<std::string>(),
                                          field(b, "photons", "basis").get<int>()});
  }
  const auto& a = field(doc, "assignment", where);
  s.assignment.ground = field(a, "ground", "assignment").get<int>();
  s.assignment.intermediate = ints_from_json(field(a, "intermediate", "assignment"), "assignment.intermediate");
  s.assignment.final = ints_from_json(field(a, "final", "assignment"), "assignment.final");
  s.dipoles.entries = matrix_from_json(field(doc, "dipoles", where), "dipoles");
  const auto n_tracked = static_cast<Eigen::Index>(s.assignment.tracked().size());
  if (s.dipoles.entries.rows() != n_tracked || s.dipoles.entries.cols() != n_tracked) {
    throw ValidationError("dressed system: dipole matrix does not match the tracked states");
  }
  return s;
}

json spectrum_summary(const DressedSystem& system) {
  const auto tracked = system.assignment.tracked();
  json states = json::array();
  for (std::size_t i = 0; i < tracked.size(); ++i) {
    const int idx = tracked[i];
    states.push_back(json{{"label", state_label(system, static_cast<int>(i))},
                          {"eigen_index", idx},
                          {"energy", system.spectrum.energies(idx)},
                          {"excitation", system.spectrum.excitations(idx)}});
  }
  json labels = json::array();
  for (std::size_t i = 0; i < tracked.size(); ++i) labels.push_back(state_label(system, static_cast<int>(i)));
  return json{{"params", system_params_to_json(system.params)},
              {"dimension", system.spectrum.energies.size()},
              {"states", states},
              {"dipole_labels", labels},
              {"dipoles", matrix_to_json(system.dipoles.entries)}};
}

json to_json(const OverlapMatrix& o) {
  return json{{"size", o.size()},
              {"norms", vector_to_json(o.norms)},
              {"sigma", complex_matrix_to_json(o.sigma)},
              {"m", complex_matrix_to_json(o.m)}};
}

json to_json(const SelectiveSolution& s) {
  return json{{"target", final_label(s.target)},
              {"lambda", s.lambda},
              {"coefficients", complex_vector_to_json(s.coefficients)},
              {"populations", vector_to_json(s.populations)},
              {"pencil_eigenvalues", vector_to_json(s.pencil_eigenvalues)},
              {"used_eigen_sqrt", s.used_eigen_sqrt}};
}

SelectiveSolution selective_solution_from_json(const json& doc) {
  const std::string where = "selective solution";
  SelectiveSolution s;
  s.target = parse_final_label(field(doc, "target", where), "target");
  s.lambda = field(doc, "lambda", where).get<double>();
  const auto& c = field(doc, "coefficients", where);
  s.coefficients.resize(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) s.coefficients(static_cast<Eigen::Index>(i)) = complex_from_json(c[i]);
  s.populations = vector_from_json(field(doc, "populations", where), "populations");
  s.pencil_eigenvalues = vector_from_json(field(doc, "pencil_eigenvalues", where), "pencil_eigenvalues");
  if (doc.contains("used_eigen_sqrt")) s.used_eigen_sqrt = doc.at("used_eigen_sqrt").get<bool>();
  return s;
}

json to_json(const ConvergenceReport& r) {
  return json{{"n_max", r.n_max},
              {"n_max_reference", r.n_max_reference},
              {"energy_drift", r.energy_drift},
              {"dipole_drift", r.dipole_drift},
              {"tolerance", r.tolerance},
              {"passed", r.passed()}};
}

json to_json(const SchmidtDecomposition& sd, int n_weights) {
  const auto n = std::min<Eigen::Index>(n_weights, sd.weights.size());
  return json{{"weights", vector_to_json(sd.weights.head(n))},
              {"r1_squared", sd.weights(0) * sd.weights(0)},
              {"schmidt_number", sd.schmidt_number()},
              {"total_weight", sd.total_weight()}};
}

json to_json(const std::vector<SpectralPeak>& peaks) {
  json out = json::array();
  for (const auto& p : peaks) out.push_back(json{{"omega1", p.omega1}, {"omega2", p.omega2}, {"intensity", p.intensity}});
  return out;
}

json grid_to_json(const FrequencyGrid& grid) {
  return json{{"kind", to_string(grid.kind())},
              {"n_points", grid.size()},
              {"lo", grid.lo()},
              {"hi", grid.hi()},
              {"spacing", grid.spacing()},
              {"description", grid.describe()}};
}

json to_json(const SweepResult& sweep) {
  json points = json::array();
  for (const auto& p : sweep.points) {
    points.push_back(json{{"gamma_f", p.gamma_f},
                          {"s_selective", p.s_selective},
                          {"s_classical", p.s_classical},
                          {"s_indistinctive", p.s_indistinctive},
                          {"ratio_selective", p.ratio_selective()},
                          {"ratio_classical", p.ratio_classical()},
                          {"r1_squared", p.r1_squared},
                          {"p_selective", vector_to_json(p.p_selective)},
                          {"p_classical", vector_to_json(p.p_classical)},
                          {"p_indistinctive", vector_to_json(p.p_indistinctive)}});
  }
  return json{{"target", final_label(sweep.settings.target)},
              {"contrast", final_label(sweep.settings.contrast)},
              {"points", points},
              {"findings", sweep.findings}};
}

std::string format_number(double x) { return fmt::format("{}", x); }

void write_wavefunction_csv(std::ostream& out, const GriddedWavefunction& psi, const std::string& title) {
  const auto& nodes = psi.grid.nodes();
  out << "# " << title << '\n';
  out << "# grid: " << psi.grid.describe() << '\n';
  out << "# norm_squared: " << format_number(psi.norm_squared()) << '\n';
  out << "# columns: omega1, omega2, re_phi, im_phi, abs2_phi\n";
  for (Eigen::Index a = 0; a < nodes.size(); ++a) {
    for (Eigen::Index b = 0; b < nodes.size(); ++b) {
      const cplx z = psi.amplitudes(a, b);
      out << format_number(nodes(a)) << ',' << format_number(nodes(b)) << ',' << format_number(z.real()) << ','
          << format_number(z.imag()) << ',' << format_number(std::norm(z)) << '\n';
    }
  }
}

void write_populations_csv(std::ostream& out, const PanelDataset& data) {
  out << "# final-state populations in units of the response norms, gamma_f = " << format_number(data.gamma_f) << '\n';
  out << "# columns: target, state, entangled, entangled_quadrature, classical, indistinctive\n";
  for (const auto& panel : data.panels) {
    for (Eigen::Index k = 0; k < panel.entangled_populations.size(); ++k) {
      out << final_label(panel.target) << ',' << final_label(static_cast<int>(k)) << ','
          << format_number(panel.entangled_populations(k)) << ',' << format_number(panel.entangled_quadrature(k))
          << ',' << format_number(panel.classical_populations(k)) << ','
          << format_number(panel.indistinctive_populations(k)) << '\n';
    }
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "# selectivity of " << final_label(sweep.settings.target) << " against "
      << final_label(sweep.settings.contrast) << '\n';
  out << "# columns: gamma_f, s_selective, s_classical, s_indistinctive, ratio_selective, ratio_classical, "
         "r1_squared\n";
  for (const auto& p : sweep.points) {
    out << format_number(p.gamma_f) << ',' << format_number(p.s_selective) << ',' << format_number(p.s_classical)
        << ',' << format_number(p.s_indistinctive) << ',' << format_number(p.ratio_selective()) << ','
        << format_number(p.ratio_classical()) << ',' << format_number(p.r1_squared) << '\n';
  }
}

}  // namespace selpol
