#include "zsb/run_dir.hpp"

#include <unistd.h>

#include <cstdlib>
#include <fstream>

#include "zsb/errors.hpp"
#include "zsb/util.hpp"

namespace zsb {

RunLock::RunLock(const std::filesystem::path& run_dir)
    : path_(run_dir / ".lock") {
  std::ofstream probe;
  if (std::filesystem::exists(path_)) {
    throw RunError("run directory is locked by another process: " +
                   path_.string());
  }
  probe.open(path_, std::ios::out | std::ios::trunc);
  if (!probe) throw RunError("cannot create lock file: " + path_.string());
  probe << "pid " << ::getpid() << '\n';
}

RunLock::~RunLock() {
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

RunDir RunDir::create(const std::filesystem::path& dir, const RunConfig& cfg) {
  std::filesystem::create_directories(dir);
  RunDir run(dir);
  nlohmann::json snapshot = cfg.to_json();
  write_text_file_atomic(run.file("config.json").string(),
                         snapshot.dump(2) + "\n");
  nlohmann::json manifest;
  manifest["schema_version"] = 1;
  manifest["tool_version"] = kToolVersion;
  write_text_file_atomic(run.file("manifest.json").string(),
                         manifest.dump(2) + "\n");
  return run;
}

RunDir RunDir::open(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / "config.json")) {
    throw SchemaError("run directory has no config snapshot: " + dir.string() +
                      " (run generate first)");
  }
  return RunDir(dir);
}

RunConfig RunDir::config() const {
  std::ifstream in(file("config.json"));
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw SchemaError("corrupt config snapshot in " + dir_.string());
  }
  // Paths in the snapshot were already resolved at generate time.
  return RunConfig::from_json(j, "");
}

std::filesystem::path RunDir::cache_dir() const {
  const RunConfig cfg = config();
  if (!cfg.gateway.cache_dir.empty()) return cfg.gateway.cache_dir;
  if (const char* env = std::getenv(kCacheDirEnv); env && *env) return env;
  return dir_ / "cache";
}

}  // namespace zsb
