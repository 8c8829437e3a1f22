#include "selpol/cache.hpp"

#include "selpol/config.hpp"
#include "selpol/errors.hpp"
#include "selpol/serialization.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <system_error>
#include <unistd.h>

namespace selpol {

namespace fs = std::filesystem;

DressedCache::DressedCache(fs::path directory) : directory_(std::move(directory)) {}

fs::path DressedCache::default_directory() {
  if (const char* dir = std::getenv("SELPOL_CACHE_DIR"); dir && *dir) return dir;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "selpol";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "selpol";
  return ".selpol-cache";
}

fs::path DressedCache::path_for(const SystemParams& params) const {
  return directory_ / fmt::format("dressed-{}.json", system_hash(params));
}

std::optional<DressedSystem> DressedCache::load(const SystemParams& params) const {
  std::ifstream in(path_for(params));
  if (!in) return std::nullopt;
  try {
    nlohmann::json doc;
    in >> doc;
    DressedSystem system = dressed_system_from_json(doc);
    if (!(system.params == params)) return std::nullopt;
    return system;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void DressedCache::store(const DressedSystem& system) const {
  std::error_code ec;
  fs::create_directories(directory_, ec);
  if (ec) throw IoError(fmt::format("cannot create cache directory '{}': {}", directory_.string(), ec.message()));
  const fs::path target = path_for(system.params);
  // Write-then-rename so a concurrent reader never sees a partial document.
  const fs::path tmp = target.string() + fmt::format(".tmp{}", ::getpid());
  {
    std::ofstream out(tmp);
    if (!out) throw IoError(fmt::format("cannot write cache file '{}'", tmp.string()));
    out << to_json(system).dump();
    if (!out) throw IoError(fmt::format("cannot write cache file '{}'", tmp.string()));
  }
  fs::rename(tmp, target, ec);
  if (ec) throw IoError(fmt::format("cannot move cache file into place '{}': {}", target.string(), ec.message()));
}

DressedSystem load_or_solve(const SystemParams& params, const DressedCache* cache, bool* from_cache) {
  params.validate();
  if (cache) {
    if (auto hit = cache->load(params)) {
      if (from_cache) *from_cache = true;
      return *std::move(hit);
    }
  }
  if (from_cache) *from_cache = false;
  DressedSystem system = solve_dressed_system(params);
  if (cache) cache->store(system);
  return system;
}

}  // namespace selpol
