#include "selpol/config.hpp"

#include "selpol/errors.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

namespace selpol {

using nlohmann::json;

namespace {

void reject_unknown(const json& doc, const std::set<std::string>& known, const std::string& prefix) {
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw ValidationError(fmt::format("unknown field '{}{}'", prefix, key));
  }
}

double get_number(const json& doc, const std::string& key, const std::string& field, double fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_number()) throw ValidationError(fmt::format("field '{}': expected a number", field));
  return v.get<double>();
}

int get_int(const json& doc, const std::string& key, const std::string& field, int fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_number_integer()) throw ValidationError(fmt::format("field '{}': expected an integer", field));
  return v.get<int>();
}

std::vector<double> get_numbers(const json& doc, const std::string& key, std::vector<double> fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_array()) throw ValidationError(fmt::format("field '{}': expected an array of numbers", key));
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ValidationError(fmt::format("field '{}': expected an array of numbers", key));
    out.push_back(x.get<double>());
  }
  return out;
}

const std::set<std::string> kSystemKeys = {"atom_frequencies", "cavity_frequency", "couplings", "n_max",
                                           "max_dimension", "n_atoms"};

}  // namespace

int parse_final_label(const json& value, const std::string& field) {
  if (value.is_number_integer()) {
    const int one_based = value.get<int>();
    if (one_based < 1) throw ValidationError(fmt::format("field '{}': final-state labels start at 1", field));
    return one_based - 1;
  }
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s.size() >= 2 && (s[0] == 'f' || s[0] == 'F')) {
      try {
        std::size_t used = 0;
        const int one_based = std::stoi(s.substr(1), &used);
        if (used == s.size() - 1 && one_based >= 1) return one_based - 1;
      } catch (const std::exception&) {
      }
    }
  }
  throw ValidationError(fmt::format("field '{}': expected a final-state label like \"f2\"", field));
}

std::string final_label(int index) { return fmt::format("f{}", index + 1); }

SystemParams system_params_from_json(const json& doc) {
  SystemParams p;
  p.atom_frequencies = get_numbers(doc, "atom_frequencies", p.atom_frequencies);
  p.couplings = get_numbers(doc, "couplings", p.couplings);
  p.cavity_frequency = get_number(doc, "cavity_frequency", "cavity_frequency", p.cavity_frequency);
  if (p.cavity_frequency != 1.0) {
    throw ValidationError("field 'cavity_frequency': fixed at 1.0 (it is the energy unit)");
  }
  p.n_max = get_int(doc, "n_max", "n_max", p.n_max);
  if (doc.contains("max_dimension")) {
    const int cap = get_int(doc, "max_dimension", "max_dimension", 0);
    if (cap <= 0) throw ValidationError("field 'max_dimension': must be > 0");
    p.max_dimension = static_cast<std::size_t>(cap);
  }
  if (doc.contains("n_atoms") && get_int(doc, "n_atoms", "n_atoms", 0) != p.n_atoms()) {
    throw ValidationError(fmt::format("field 'n_atoms': {} does not match {} atom frequencies",
                                      doc.at("n_atoms").dump(), p.n_atoms()));
  }
  return p;
}

json system_params_to_json(const SystemParams& p) {
  return json{{"atom_frequencies", p.atom_frequencies},
              {"cavity_frequency", p.cavity_frequency},
              {"couplings", p.couplings},
              {"n_max", p.n_max},
              {"max_dimension", p.max_dimension},
              {"n_atoms", p.n_atoms()}};
}

ScenarioConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("config: top level must be a JSON object");
  std::set<std::string> known = kSystemKeys;
  known.insert({"gamma_f", "gamma_e_ratio", "targets", "grid", "sweep"});
  reject_unknown(doc, known, "");

  ScenarioConfig c;
  c.system = system_params_from_json(doc);
  c.gamma_f = get_number(doc, "gamma_f", "gamma_f", c.gamma_f);
  c.gamma_e_ratio = get_number(doc, "gamma_e_ratio", "gamma_e_ratio", c.gamma_e_ratio);

  if (doc.contains("targets")) {
    const auto& t = doc.at("targets");
    if (!t.is_array()) throw ValidationError("field 'targets': expected an array of labels");
    c.targets.clear();
    for (const auto& label : t) c.targets.push_back(parse_final_label(label, "targets"));
  }

  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    if (!g.is_object()) throw ValidationError("field 'grid': expected an object");
    reject_unknown(g, {"kind", "n_points", "lo", "hi", "export_points"}, "grid.");
    if (g.contains("kind")) {
      const auto& kind = g.at("kind");
      if (kind == "uniform") {
        c.grid.kind = FrequencyGrid::Kind::uniform;
      } else if (kind == "lorentzian_mapped" || kind == "mapped") {
        c.grid.kind = FrequencyGrid::Kind::lorentzian_mapped;
      } else {
        throw ValidationError("field 'grid.kind': expected \"uniform\" or \"lorentzian_mapped\"");
      }
    }
    c.grid.n_points = get_int(g, "n_points", "grid.n_points", c.grid.n_points);
    c.grid.export_points = get_int(g, "export_points", "grid.export_points", c.grid.export_points);
    if (g.contains("lo")) c.grid.lo = get_number(g, "lo", "grid.lo", 0.0);
    if (g.contains("hi")) c.grid.hi = get_number(g, "hi", "grid.hi", 0.0);
  }

  if (doc.contains("sweep") && !doc.at("sweep").is_null()) {
    const auto& s = doc.at("sweep");
    if (!s.is_object()) throw ValidationError("field 'sweep': expected an object");
    reject_unknown(s, {"gamma_f_min", "gamma_f_max", "step", "target", "contrast"}, "sweep.");
    SweepSettings sw;
    sw.gamma_f_min = get_number(s, "gamma_f_min", "sweep.gamma_f_min", sw.gamma_f_min);
    sw.gamma_f_max = get_number(s, "gamma_f_max", "sweep.gamma_f_max", sw.gamma_f_max);
    sw.step = get_number(s, "step", "sweep.step", sw.step);
    if (s.contains("target")) sw.target = parse_final_label(s.at("target"), "sweep.target");
    if (s.contains("contrast")) sw.contrast = parse_final_label(s.at("contrast"), "sweep.contrast");
    c.sweep = sw;
  }

  c.validate();
  return c;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config file '{}'", path.string()));
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("config '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return config_from_json(doc);
}

json config_to_json(const ScenarioConfig& c) {
  json doc = system_params_to_json(c.system);
  doc["gamma_f"] = c.gamma_f;
  doc["gamma_e_ratio"] = c.gamma_e_ratio;
  json targets = json::array();
  for (int t : c.targets) targets.push_back(final_label(t));
  doc["targets"] = targets;

  json grid{{"kind", c.grid.kind == FrequencyGrid::Kind::uniform ? "uniform" : "lorentzian_mapped"},
            {"n_points", c.grid.n_points},
            {"export_points", c.grid.export_points}};
  if (c.grid.lo) grid["lo"] = *c.grid.lo;
  if (c.grid.hi) grid["hi"] = *c.grid.hi;
  doc["grid"] = grid;

  if (c.sweep) {
    doc["sweep"] = json{{"gamma_f_min", c.sweep->gamma_f_min},
                        {"gamma_f_max", c.sweep->gamma_f_max},
                        {"step", c.sweep->step},
                        {"target", final_label(c.sweep->target)},
                        {"contrast", final_label(c.sweep->contrast)}};
  } else {
    doc["sweep"] = nullptr;
  }
  return doc;
}

std::string sha256_hex(const std::string& text) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), text.data(), text.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw ComputationError("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string config_hash(const ScenarioConfig& config) { return sha256_hex(config_to_json(config).dump()); }

std::string system_hash(const SystemParams& params) { return sha256_hex(system_params_to_json(params).dump()); }

}  // namespace selpol
