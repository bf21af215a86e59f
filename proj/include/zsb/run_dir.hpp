#pragma once

#include <filesystem>

#include "json.hpp"
#include "zsb/config.hpp"

namespace zsb {

// Exclusive-create lock file; released on destruction. One process per run
// directory.
class RunLock {
 public:
  explicit RunLock(const std::filesystem::path& run_dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  std::filesystem::path path_;
};

// A run directory is the unit of provenance: the config snapshot and tool
// version are copied in at generate time, and later stages read the snapshot
// so the benchmark definition cannot drift.
class RunDir {
 public:
  static RunDir create(const std::filesystem::path& dir, const RunConfig& cfg);
  static RunDir open(const std::filesystem::path& dir);

  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path file(const std::string& name) const {
    return dir_ / name;
  }
  RunConfig config() const;

  // Cache directory resolution order: config value, ZSB_CACHE_DIR, <run>/cache.
  std::filesystem::path cache_dir() const;

 private:
  explicit RunDir(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::filesystem::path dir_;
};

}  // namespace zsb
