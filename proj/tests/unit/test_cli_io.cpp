#include "support.hpp"

#include "selpol/cache.hpp"
#include "selpol/config.hpp"
#include "selpol/errors.hpp"
#include "selpol/scenario_io.hpp"
#include "selpol/serialization.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace selpol;
using namespace selpol::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("selpol-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& work) {
  const fs::path out = work / "stdout.txt";
  const fs::path err = work / "stderr.txt";
  const std::string cmd = "SELPOL_CACHE_DIR='" + (work / "cache").string() + "' '" SELPOL_CLI_PATH "' " + args + " > '" +
                          out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::vector<std::vector<double>> read_csv(const fs::path& path, std::vector<std::string>* comments = nullptr) {
  std::ifstream in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (comments) comments->push_back(line);
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("empty config gives the defaults") {
  const ScenarioConfig c = config_from_json(json::object());
  CHECK(c == ScenarioConfig{});
  CHECK(c.system.atom_frequencies == std::vector<double>{0.8, 1.2});
  CHECK(c.system.couplings == std::vector<double>{0.14, 0.14});
  CHECK(c.system.n_max == 15);
  CHECK(c.gamma_f == 0.01);
  CHECK(c.gamma_e_ratio == 0.5);
  CHECK(c.targets == std::vector<int>{0, 1, 2, 3});
  CHECK_FALSE(c.sweep.has_value());
}

TEST_CASE("single overrides touch only their field") {
  ScenarioConfig expected;
  expected.system.n_max = 20;
  CHECK(config_from_json(json{{"n_max", 20}}) == expected);
  const ScenarioConfig t = config_from_json(json{{"targets", {"f2", 3}}});
  CHECK(t.targets == std::vector<int>{1, 2});
}

TEST_CASE("schema and physics violations name the field") {
  auto message = [](const json& doc) {
    try {
      config_from_json(doc);
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message(json{{"gamma_f", -0.1}}).find("gamma_f") != std::string::npos);
  CHECK(message(json{{"gamma_f", "wide"}}).find("gamma_f") != std::string::npos);
  CHECK(message(json{{"gama_f", 0.1}}).find("gama_f") != std::string::npos);
  CHECK(message(json{{"grid", {{"points", 10}}}}).find("grid.points") != std::string::npos);
  CHECK(message(json{{"grid", {{"n_points", 10}}}}).find("grid.n_points") != std::string::npos);
  CHECK(message(json{{"n_max", 2.5}}).find("n_max") != std::string::npos);
  CHECK(message(json{{"targets", {"f9"}}}).find("targets") != std::string::npos);
  CHECK(message(json{{"targets", {"x1"}}}).find("targets") != std::string::npos);
  CHECK(message(json{{"couplings", {0.1}}}).find("couplings") != std::string::npos);
  CHECK(message(json{{"cavity_frequency", 2.0}}).find("cavity_frequency") != std::string::npos);
  CHECK(message(json{{"n_atoms", 3}}).find("n_atoms") != std::string::npos);
  CHECK(message(json{{"sweep", {{"target", "f2"}, {"contrast", "f2"}}}}).find("sweep.contrast") != std::string::npos);
  CHECK(message(json::array()).find("object") != std::string::npos);
}

TEST_CASE("config files: missing file and malformed JSON") {
  const fs::path dir = scratch("config-files");
  CHECK_THROWS_AS(parse_config(dir / "absent.json"), IoError);
  CHECK_THROWS_AS(parse_config(write_file(dir / "bad.json", "{ nope")), ValidationError);
  const ScenarioConfig c = parse_config(write_file(dir / "ok.json", R"({"gamma_f": 0.05, "grid": {"kind": "uniform"}})"));
  CHECK(c.gamma_f == 0.05);
  CHECK(c.grid.kind == FrequencyGrid::Kind::uniform);
}

TEST_CASE("serialize(parse(config)) is idempotent") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    json doc = json::object();
    if (u(rng) < 0.5) doc["gamma_f"] = 0.001 + 0.2 * u(rng);
    if (u(rng) < 0.5) doc["gamma_e_ratio"] = 0.1 + u(rng);
    if (u(rng) < 0.5) doc["n_max"] = 2 + static_cast<int>(20 * u(rng));
    if (u(rng) < 0.5) doc["couplings"] = {0.2 * u(rng), 0.2 * u(rng)};
    if (u(rng) < 0.5) doc["targets"] = {"f" + std::to_string(1 + static_cast<int>(4 * u(rng)))};
    if (u(rng) < 0.5) doc["grid"] = {{"kind", u(rng) < 0.5 ? "uniform" : "lorentzian_mapped"}, {"n_points", 64 + static_cast<int>(500 * u(rng))}};
    if (u(rng) < 0.3) doc["grid"] = {{"lo", 0.1 + u(rng)}, {"hi", 2.0 + u(rng)}};
    if (u(rng) < 0.5) doc["sweep"] = {{"gamma_f_min", 0.01}, {"gamma_f_max", 0.01 + u(rng)}, {"step", 0.01}};
    const json once = config_to_json(config_from_json(doc));
    const json twice = config_to_json(config_from_json(once));
    CAPTURE(doc.dump());
    CHECK(once == twice);
    CHECK(once.dump() == twice.dump());
    CHECK(config_from_json(once) == config_from_json(doc));
  }
}

TEST_CASE("config hash depends on content only") {
  const ScenarioConfig a = config_from_json(json::parse(R"({"gamma_f": 0.02, "n_max": 16})"));
  const ScenarioConfig b = config_from_json(json::parse("{\n  \"n_max\" : 16,\n  \"gamma_f\":0.02\n}"));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 64);
  CHECK(config_hash(a) != config_hash(ScenarioConfig{}));
  // Known SHA-256 test vector.
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  // Linewidths never enter the dressed-system key.
  ScenarioConfig c = a;
  c.gamma_f = 0.07;
  CHECK(system_hash(c.system) == system_hash(a.system));
}

TEST_CASE("level scheme and solution round-trip exactly through JSON") {
  const LevelScheme s = reference_scheme(0.03);
  const LevelScheme back = level_scheme_from_json(json::parse(to_json(s).dump()));
  CHECK(back.omega_e == s.omega_e);
  CHECK(back.omega_f == s.omega_f);
  CHECK(back.gamma_e == s.gamma_e);
  CHECK(back.gamma_f == s.gamma_f);
  CHECK(back.mu_ge == s.mu_ge);
  CHECK(back.mu_ef == s.mu_ef);

  const SelectiveSolution sol = solve_selective(overlap_matrix(s), 1);
  const SelectiveSolution sol_back = selective_solution_from_json(json::parse(to_json(sol).dump()));
  CHECK(sol_back.target == 1);
  CHECK(sol_back.lambda == sol.lambda);
  CHECK(sol_back.coefficients == sol.coefficients);
  CHECK(sol_back.populations == sol.populations);

  json broken = to_json(s);
  broken.erase("mu_ef");
  CHECK_THROWS_AS(level_scheme_from_json(broken), ValidationError);
}

TEST_CASE("cached dressed systems reproduce cold results exactly") {
  const fs::path dir = scratch("cache");
  const DressedCache cache(dir);
  const SystemParams params;
  bool hit = true;
  const DressedSystem cold = load_or_solve(params, &cache, &hit);
  CHECK_FALSE(hit);
  CHECK(fs::exists(cache.path_for(params)));
  const DressedSystem warm = load_or_solve(params, &cache, &hit);
  CHECK(hit);
  CHECK(warm.spectrum.energies == cold.spectrum.energies);
  CHECK(warm.spectrum.eigenvectors == cold.spectrum.eigenvectors);
  CHECK(warm.dipoles.entries == cold.dipoles.entries);

  ScenarioConfig config = fig2_scenario();
  config.grid.n_points = 128;
  const PanelDataset a = run_optimal_panels(config, cold);
  const PanelDataset b = run_optimal_panels(config, warm);
  for (std::size_t i = 0; i < a.panels.size(); ++i) {
    CHECK(a.panels[i].solution.coefficients == b.panels[i].solution.coefficients);
    CHECK(a.panels[i].classical_populations == b.panels[i].classical_populations);
  }

  // A different parameter set misses; a corrupted document is ignored.
  SystemParams other;
  other.n_max = 16;
  CHECK_FALSE(cache.load(other).has_value());
  write_file(cache.path_for(params), "{ truncated");
  CHECK_FALSE(cache.load(params).has_value());
  load_or_solve(params, &cache, &hit);
  CHECK_FALSE(hit);
  CHECK(cache.load(params).has_value());
}

TEST_CASE("cache directory honours the override variable") {
  ::setenv("SELPOL_CACHE_DIR", "/tmp/selpol-override", 1);
  CHECK(DressedCache::default_directory() == fs::path("/tmp/selpol-override"));
  ::unsetenv("SELPOL_CACHE_DIR");
  CHECK(DressedCache::default_directory() != fs::path("/tmp/selpol-override"));
}

TEST_CASE("CSV writers: documented columns and lossless numbers") {
  ScenarioConfig config = fig2_scenario();
  config.grid.n_points = 128;
  config.grid.export_points = 64;
  config.targets = {0};
  const PanelDataset data = run_optimal_panels(config, reference_system());
  const fs::path dir = scratch("csv");
  const auto files = write_panel_outputs(dir, config, data, true);
  for (const char* name : {"levels.json", "overlaps.json", "solution_f1.json", "wavefunction_f1.csv", "classical_f1.csv",
                           "populations.csv"}) {
    CHECK(std::find(files.begin(), files.end(), name) != files.end());
    CHECK(fs::exists(dir / name));
  }

  std::vector<std::string> comments;
  const auto pops = read_csv(dir / "populations.csv", &comments);
  REQUIRE(!comments.empty());
  CHECK(comments.back().find("# columns:") == 0);
  REQUIRE(pops.size() == 4);
  // First column is a label, parsed as 0 here; numeric columns are exact.
  CHECK(pops[0][2] == data.panels[0].entangled_populations(0));
  CHECK(pops[1][5] == data.panels[0].indistinctive_populations(1));

  comments.clear();
  const auto wave = read_csv(dir / "wavefunction_f1.csv", &comments);
  CHECK(wave.size() == 64u * 64u);
  CHECK(wave[0].size() == 5);
  bool documented = false;
  for (const auto& c : comments) documented |= c.find("# columns: omega1, omega2, re_phi, im_phi, abs2_phi") == 0;
  CHECK(documented);
  bool unit_norm = false;
  for (const auto& c : comments)
    if (c.rfind("# norm_squared: ", 0) == 0) unit_norm = std::abs(std::stod(c.substr(16)) - 1.0) < 1e-12;
  CHECK(unit_norm);

  const json solution = json::parse(slurp(dir / "solution_f1.json"));
  CHECK(solution.at("lambda").get<double>() == data.panels[0].solution.lambda);
  CHECK(solution.at("target") == "f1");
  CHECK(solution.at("schmidt").at("weights").size() == 8);
}

TEST_CASE("manifest records hash, version, grid and tolerances") {
  const fs::path dir = scratch("manifest");
  RunManifest m = make_manifest("optimize", ScenarioConfig{});
  m.grid = json{{"kind", "uniform"}};
  write_manifest(dir, m);
  const json doc = json::parse(slurp(dir / "manifest.json"));
  CHECK(doc.at("config_hash") == config_hash(ScenarioConfig{}));
  CHECK(doc.at("tool_version") == tool_version());
  CHECK(doc.at("timestamp").get<std::string>().size() == 20);
  CHECK(doc.at("tolerances").contains("pencil_positive_relative"));
  CHECK(doc.at("grid").at("kind") == "uniform");
}

TEST_CASE("cli: diagonalize prints the spectrum and writes spectrum.json") {
  const fs::path work = scratch("cli-diag");
  const RunResult r = run_cli("diagonalize --out '" + (work / "out").string() + "'", work);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("f4") != std::string::npos);
  const json doc = json::parse(slurp(work / "out" / "spectrum.json"));
  CHECK(doc.at("states").size() == 8);
  CHECK(std::abs(doc.at("states")[0].at("energy").get<double>() + 0.0204) < 0.005);
  CHECK(doc.at("convergence").at("passed") == true);
  CHECK(fs::exists(work / "out" / "manifest.json"));
  CHECK(fs::exists(work / "cache"));
}

TEST_CASE("cli: optimize with a target subset and an external level scheme") {
  const fs::path work = scratch("cli-opt");
  const fs::path levels = work / "levels.json";
  write_file(levels, to_json(reference_scheme(0.02)).dump());
  const RunResult r = run_cli("optimize --no-cache --grid-points 128 --target f2,f3 --levels '" + levels.string() +
                                  "' --out '" + (work / "out").string() + "'",
                              work);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(work / "out" / "solution_f2.json"));
  CHECK(fs::exists(work / "out" / "solution_f3.json"));
  CHECK_FALSE(fs::exists(work / "out" / "solution_f1.json"));
  CHECK_FALSE(fs::exists(work / "out" / "wavefunction_f2.csv"));
  CHECK_FALSE(fs::exists(work / "cache"));
}

TEST_CASE("cli: exit codes and machine-readable errors") {
  const fs::path work = scratch("cli-errors");
  SUBCASE("validation") {
    const fs::path cfg = write_file(work / "bad.json", R"({"gamma_f": -0.1})");
    const RunResult r = run_cli("optimize --config '" + cfg.string() + "' --out '" + (work / "o").string() + "'", work);
    CHECK(r.exit_code == 2);
    const json err = json::parse(r.err);
    CHECK(err.at("category") == "validation");
    CHECK(err.at("message").get<std::string>().find("gamma_f") != std::string::npos);
  }
  SUBCASE("computation") {
    const fs::path cfg = write_file(work / "strong.json", R"({"couplings": [0.5, 0.5]})");
    const RunResult r = run_cli("diagonalize --no-cache --config '" + cfg.string() + "' --out '" + (work / "o").string() + "'", work);
    CHECK(r.exit_code == 3);
    CHECK(json::parse(r.err).at("error") == "ManifoldAmbiguity");
  }
  SUBCASE("io") {
    const fs::path blocker = write_file(work / "file", "x");
    const RunResult r = run_cli("levels --no-cache --out '" + (blocker / "sub").string() + "'", work);
    CHECK(r.exit_code == 4);
    CHECK(json::parse(r.err).at("category") == "io");
  }
  SUBCASE("usage") {
    CHECK(run_cli("frobnicate", work).exit_code != 0);
    CHECK(run_cli("reproduce fig9", work).exit_code != 0);
    CHECK(run_cli("--help", work).exit_code == 0);
  }
}
