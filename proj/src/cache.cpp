#include <fstream>
#include <functional>
#include <thread>

#include "zsb/gateway.hpp"

namespace zsb {

std::optional<ModelResponse> ResponseCache::lookup(const std::string& key) const {
  const auto path = dir_ / key.substr(0, 2) / (key + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("key", "") != key ||
      !j.contains("response")) {
    return std::nullopt;  // stale or corrupt entry; treated as a miss
  }
  ModelResponse resp;
  const auto& r = j.at("response");
  resp.text = r.value("text", "");
  resp.finish_reason = r.value("finish_reason", "stop");
  resp.usage.prompt_tokens = r.value("prompt_tokens", std::int64_t{0});
  resp.usage.completion_tokens = r.value("completion_tokens", std::int64_t{0});
  resp.latency_ms = 0;
  resp.cache_hit = true;
  return resp;
}

void ResponseCache::store(const std::string& key, const ModelRequest& req,
                          const ModelResponse& resp) const {
  const auto shard = dir_ / key.substr(0, 2);
  std::filesystem::create_directories(shard);
  nlohmann::json j;
  j["key"] = key;
  j["request"] = canonical_request(req);
  j["response"] = {
      {"text", resp.text},
      {"finish_reason", resp.finish_reason},
      {"prompt_tokens", resp.usage.prompt_tokens},
      {"completion_tokens", resp.usage.completion_tokens},
  };
  const auto path = shard / (key + ".json");
  // Per-thread temp name; rename is atomic, racing writers produce the same
  // bytes for the same key.
  const auto tmp = shard / (key + ".tmp" +
                            std::to_string(std::hash<std::thread::id>{}(
                                std::this_thread::get_id())));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace zsb
