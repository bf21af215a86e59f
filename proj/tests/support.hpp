#pragma once

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "json.hpp"

namespace testsupport {

inline std::string env_or(const char* name, const char* fallback) {
  const char* v = std::getenv(name);
  return v && *v ? v : fallback;
}

inline std::string zsb_bin() { return env_or("ZSB_BIN", "./zsb"); }
inline std::string assets_dir() { return env_or("ZSB_ASSETS", "assets"); }

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

// Runs a shell command, merging stderr into the captured output.
inline CmdResult run_cmd(const std::string& cmd) {
  CmdResult result;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) {
    result.output.append(buf.data(), n);
    if (n < buf.size()) break;
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

class TempDir {
 public:
  explicit TempDir(const std::string& prefix) {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() /
            (prefix + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  write_file(p, j.dump(2) + "\n");
}

// Minimal valid run config pointing at the shipped assets.
inline nlohmann::json base_config(int n_instances, std::uint64_t seed,
                                  const std::vector<std::string>& systems) {
  const std::string assets = assets_dir();
  nlohmann::json cfg;
  cfg["task"] = "general";
  cfg["language"] = "English";
  cfg["catalog"] = assets + "/catalogs/general_capabilities.json";
  cfg["templates"] = {
      {"meta", assets + "/prompts/meta_general.txt"},
      {"judge", assets + "/prompts/judge_general.txt"},
      {"judge_pairwise", assets + "/prompts/judge_pairwise.txt"},
      {"safety", assets + "/prompts/safety_text.txt"},
      {"verify_consistency", assets + "/prompts/verify_consistency.txt"},
      {"verify_reference", assets + "/prompts/verify_reference.txt"},
  };
  cfg["generator_model"] = "gen-1";
  cfg["judge_model"] = "judge-1";
  cfg["systems"] = systems;
  cfg["instance_count"] = n_instances;
  cfg["seed"] = seed;
  cfg["judging_mode"] = "da";
  cfg["gateway"] = {{"parallelism", 4}, {"cache", true}};
  return cfg;
}

// Mock script for a planted world: generation emits block format, answers
// carry planted quality markers, the judge echoes them.
inline nlohmann::json planted_mock(const nlohmann::json& qualities,
                                   double noise, std::uint64_t seed) {
  nlohmann::json script;
  script["seed"] = seed;
  script["rules"] = nlohmann::json::array({
      {{"purpose", "generate"},
       {"mode", "blocks"},
       {"prompt", "Benchmark question ${instance_id}: discuss the assigned subject."},
       {"reference", "Reference answer for question ${instance_id}."}},
      {{"purpose", "answer"},
       {"mode", "planted_answer"},
       {"qualities", qualities},
       {"noise", noise}},
      {{"purpose", "judge"}, {"mode", "judge_marker"}},
      {{"purpose", "safety"}, {"mode", "judge_cycle"}, {"scores", {6}}},
      {{"purpose", "verify"}, {"mode", "consistency"}, {"result", "consistent"}},
  });
  return script;
}

}  // namespace testsupport
