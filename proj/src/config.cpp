#include "zsb/config.hpp"

#include <algorithm>
#include <fstream>

#include "zsb/errors.hpp"

namespace zsb {
namespace {

std::string resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  std::filesystem::path fp(p);
  if (fp.is_absolute()) return fp.lexically_normal().string();
  return (base / fp).lexically_normal().string();
}

std::string require_string(const nlohmann::json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_string() ||
      j.at(field).get<std::string>().empty()) {
    throw SchemaError(std::string("config: missing or empty field \"") + field +
                      "\"");
  }
  return j.at(field).get<std::string>();
}

}  // namespace

std::string to_string(JudgingMode m) {
  switch (m) {
    case JudgingMode::da: return "da";
    case JudgingMode::pwc_baseline: return "pwc-baseline";
    case JudgingMode::pwc_all: return "pwc-all";
  }
  return "da";
}

JudgingMode judging_mode_from_string(const std::string& s) {
  if (s == "da") return JudgingMode::da;
  if (s == "pwc-baseline") return JudgingMode::pwc_baseline;
  if (s == "pwc-all") return JudgingMode::pwc_all;
  throw SchemaError("config: judging_mode must be da, pwc-baseline or pwc-all; got \"" +
                    s + "\"");
}

std::string RunConfig::source_language() const {
  const auto dash = language.find('-');
  if (dash == std::string::npos) return language;
  return language.substr(0, dash);
}

std::string RunConfig::target_language() const {
  const auto dash = language.find('-');
  if (dash == std::string::npos) return {};
  return language.substr(dash + 1);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["task"] = to_string(task);
  j["language"] = language;
  j["catalog"] = catalog_path;
  j["templates"] = {
      {"meta", templates.meta},
      {"judge", templates.judge},
      {"judge_pairwise", templates.judge_pairwise},
      {"safety", templates.safety},
      {"verify_consistency", templates.verify_consistency},
      {"verify_reference", templates.verify_reference},
  };
  j["generator_model"] = generator_model;
  j["judge_model"] = judge_model;
  j["safety_model"] = safety_model;
  j["checker_model"] = checker_model;
  j["systems"] = systems;
  j["baseline_system"] = baseline_system;
  j["instance_count"] = instance_count;
  j["seed"] = seed;
  j["judging_mode"] = to_string(judging_mode);
  j["reference_aware"] = reference_aware;
  if (enabled_axes) {
    j["enabled_axes"] =
        std::vector<std::string>(enabled_axes->begin(), enabled_axes->end());
  } else {
    j["enabled_axes"] = nlohmann::json();
  }
  j["retries"] = {{"generation", generation_retries}, {"judge", judge_retries}};
  j["sampling"] = {{"temperature", sampling.temperature},
                   {"max_tokens", sampling.max_tokens}};
  j["gateway"] = {{"parallelism", gateway.parallelism},
                  {"attempts", gateway.attempts},
                  {"backoff_initial_ms", gateway.backoff_initial_ms},
                  {"backoff_factor", gateway.backoff_factor},
                  {"cache", gateway.cache},
                  {"cache_dir", gateway.cache_dir}};
  j["image_pool"] = image_pool;
  nlohmann::json eps = nlohmann::json::array();
  for (const auto& ep : providers) {
    eps.push_back({{"name", ep.name},
                   {"base_url", ep.base_url},
                   {"api_key_env", ep.api_key_env},
                   {"models", ep.models},
                   {"timeout_seconds", ep.timeout_seconds}});
  }
  j["providers"] = std::move(eps);
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j,
                               const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw SchemaError("config: document must be an object");
  RunConfig cfg;
  cfg.task = task_kind_from_string(require_string(j, "task"));
  cfg.language = j.value("language", std::string("English"));
  cfg.catalog_path = resolve(base_dir, require_string(j, "catalog"));

  if (!j.contains("templates") || !j.at("templates").is_object()) {
    throw SchemaError("config: missing object field \"templates\"");
  }
  const auto& t = j.at("templates");
  cfg.templates.meta = resolve(base_dir, require_string(t, "meta"));
  cfg.templates.judge = resolve(base_dir, require_string(t, "judge"));
  cfg.templates.judge_pairwise =
      resolve(base_dir, t.value("judge_pairwise", std::string()));
  cfg.templates.safety = resolve(base_dir, t.value("safety", std::string()));
  cfg.templates.verify_consistency =
      resolve(base_dir, t.value("verify_consistency", std::string()));
  cfg.templates.verify_reference =
      resolve(base_dir, t.value("verify_reference", std::string()));

  cfg.generator_model = require_string(j, "generator_model");
  cfg.judge_model = require_string(j, "judge_model");
  cfg.safety_model = j.value("safety_model", cfg.judge_model);
  cfg.checker_model = j.value("checker_model", cfg.judge_model);

  if (!j.contains("systems") || !j.at("systems").is_array() ||
      j.at("systems").empty()) {
    throw SchemaError("config: \"systems\" must be a non-empty list");
  }
  for (const auto& s : j.at("systems")) {
    cfg.systems.push_back(s.get<std::string>());
  }
  {
    auto sorted = cfg.systems;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw SchemaError("config: duplicate entries in \"systems\"");
    }
  }

  cfg.baseline_system = j.value("baseline_system", std::string());
  cfg.instance_count = j.value("instance_count", 1);
  if (cfg.instance_count < 1) {
    throw SchemaError("config: \"instance_count\" must be >= 1");
  }
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.judging_mode =
      judging_mode_from_string(j.value("judging_mode", std::string("da")));
  if (cfg.judging_mode == JudgingMode::pwc_baseline) {
    if (cfg.baseline_system.empty()) {
      throw SchemaError("config: pwc-baseline mode requires \"baseline_system\"");
    }
    if (std::find(cfg.systems.begin(), cfg.systems.end(),
                  cfg.baseline_system) == cfg.systems.end()) {
      throw SchemaError("config: \"baseline_system\" (" + cfg.baseline_system +
                        ") not present in \"systems\"");
    }
  }
  cfg.reference_aware = j.value("reference_aware", false);
  if (j.contains("enabled_axes") && !j.at("enabled_axes").is_null()) {
    std::set<std::string> axes;
    for (const auto& a : j.at("enabled_axes")) {
      axes.insert(a.get<std::string>());
    }
    cfg.enabled_axes = std::move(axes);
  }
  if (j.contains("retries")) {
    cfg.generation_retries = j.at("retries").value("generation", 3);
    cfg.judge_retries = j.at("retries").value("judge", 1);
  }
  if (cfg.generation_retries < 1) {
    throw SchemaError("config: retries.generation must be >= 1");
  }
  if (j.contains("sampling")) {
    cfg.sampling.temperature = j.at("sampling").value("temperature", 0.0);
    cfg.sampling.max_tokens = j.at("sampling").value("max_tokens", 2048);
  }
  if (j.contains("gateway")) {
    const auto& g = j.at("gateway");
    cfg.gateway.parallelism = g.value("parallelism", 4);
    cfg.gateway.attempts = g.value("attempts", 5);
    cfg.gateway.backoff_initial_ms = g.value("backoff_initial_ms", 1000);
    cfg.gateway.backoff_factor = g.value("backoff_factor", 2.0);
    cfg.gateway.cache = g.value("cache", true);
    cfg.gateway.cache_dir = g.value("cache_dir", std::string());
  }
  cfg.image_pool = resolve(base_dir, j.value("image_pool", std::string()));
  if (cfg.task == TaskKind::vision && cfg.image_pool.empty()) {
    throw SchemaError("config: vision task requires \"image_pool\"");
  }
  if (j.contains("providers")) {
    for (const auto& pj : j.at("providers")) {
      ProviderEndpoint ep;
      ep.name = pj.value("name", "default");
      ep.base_url = require_string(pj, "base_url");
      ep.api_key_env = pj.value("api_key_env", std::string());
      if (pj.contains("models")) {
        ep.models.clear();
        for (const auto& m : pj.at("models")) {
          ep.models.push_back(m.get<std::string>());
        }
      }
      ep.timeout_seconds = pj.value("timeout_seconds", 120);
      cfg.providers.push_back(std::move(ep));
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("config: cannot open " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw SchemaError("config: invalid JSON in " + path.string());
  }
  return from_json(j, std::filesystem::absolute(path).parent_path());
}

}  // namespace zsb
