#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "zsb/gateway.hpp"
#include "zsb/http_provider.hpp"
#include "zsb/prompt_io.hpp"

namespace zsb {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kCacheDirEnv = "ZSB_CACHE_DIR";

enum class JudgingMode { da, pwc_baseline, pwc_all };

std::string to_string(JudgingMode m);
JudgingMode judging_mode_from_string(const std::string& s);

struct TemplatePaths {
  std::string meta;
  std::string judge;
  std::string judge_pairwise;
  std::string safety;
  std::string verify_consistency;
  std::string verify_reference;
};

struct GatewaySettings {
  int parallelism = 4;
  int attempts = 5;
  int backoff_initial_ms = 1000;
  double backoff_factor = 2.0;
  bool cache = true;
  std::string cache_dir;  // empty: ZSB_CACHE_DIR, else <run>/cache
};

struct RunConfig {
  TaskKind task = TaskKind::general;
  std::string language;  // language, or "Source-Target" pair label
  std::string catalog_path;
  TemplatePaths templates;
  std::string generator_model;
  std::string judge_model;
  std::string safety_model;   // defaults to judge_model
  std::string checker_model;  // defaults to judge_model
  std::vector<std::string> systems;
  std::string baseline_system;
  int instance_count = 1;
  std::uint64_t seed = 0;
  JudgingMode judging_mode = JudgingMode::da;
  bool reference_aware = false;
  std::optional<std::set<std::string>> enabled_axes;  // nullopt = all
  int generation_retries = 3;
  int judge_retries = 1;
  Sampling sampling;
  GatewaySettings gateway;
  std::string image_pool;  // directory, vision tasks
  std::vector<ProviderEndpoint> providers;

  // For translation tasks, the halves of the language pair.
  std::string source_language() const;
  std::string target_language() const;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j,
                             const std::filesystem::path& base_dir);
  // Parses and validates; SchemaError messages name the offending field.
  static RunConfig load(const std::filesystem::path& path);
};

}  // namespace zsb
