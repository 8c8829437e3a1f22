#pragma once

#include "selpol/dressed_system.hpp"

#include <filesystem>
#include <optional>

namespace selpol {

/// On-disk store of dressed-stage results, one JSON document per parameter
/// set, named after the SHA-256 of the canonical parameter JSON. Linewidths
/// never enter the key, so a linewidth sweep reuses one diagonalization.
class DressedCache {
 public:
  explicit DressedCache(std::filesystem::path directory);

  /// $SELPOL_CACHE_DIR, else $XDG_CACHE_HOME/selpol, else ~/.cache/selpol,
  /// else ./.selpol-cache.
  static std::filesystem::path default_directory();

  const std::filesystem::path& directory() const { return directory_; }
  std::filesystem::path path_for(const SystemParams& params) const;

  /// Empty when absent, unreadable or stored for different parameters.
  std::optional<DressedSystem> load(const SystemParams& params) const;
  /// Throws IoError when the directory or file cannot be written.
  void store(const DressedSystem& system) const;

 private:
  std::filesystem::path directory_;
};

/// Cached dressed system when available, otherwise solves (and stores when a
/// cache is given). `from_cache` reports which path was taken.
DressedSystem load_or_solve(const SystemParams& params, const DressedCache* cache, bool* from_cache = nullptr);

}  // namespace selpol
