#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace zsb {

enum class Purpose { generate, answer, judge, safety, verify };

std::string to_string(Purpose p);
Purpose purpose_from_string(const std::string& s);

enum class Role { system, user, assistant };

std::string to_string(Role r);

struct ImagePayload {
  std::string path;        // pool-relative path, provenance only
  std::string digest;      // sha256 of the raw bytes
  std::string base64;      // encoded bytes as sent on the wire
  std::string media_type;  // e.g. "image/png"
};

struct Message {
  Role role = Role::user;
  std::string text;
  std::optional<ImagePayload> image;  // user messages only
};

struct Sampling {
  double temperature = 0.0;
  int max_tokens = 2048;
};

struct ModelRequest {
  std::string model;
  std::vector<Message> messages;
  Sampling sampling;
  Purpose purpose = Purpose::answer;
  // Request identity beyond the text: instance_id, system_id, attempt, ...
  // Folded into the cache key (a retry carries a new attempt tag, so it is a
  // genuinely fresh completion) and visible to the scriptable mock.
  std::map<std::string, std::string> tags;

  ModelRequest& tag(const std::string& key, const std::string& value) {
    tags[key] = value;
    return *this;
  }
};

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct ModelResponse {
  std::string text;
  std::string finish_reason = "stop";
  Usage usage;
  std::int64_t latency_ms = 0;
  bool cache_hit = false;
};

// Canonical serialization of the request identity: model, messages (image
// payloads by digest), sampling, purpose, tags. Key order is sorted, so the
// digest is insensitive to source-config field ordering.
nlohmann::json canonical_request(const ModelRequest& req);
std::string cache_key(const ModelRequest& req);

class Provider {
 public:
  virtual ~Provider() = default;
  // Throws TransportError for transient failures (retryable) and
  // ProviderError for permanent ones (fail fast).
  virtual ModelResponse complete(const ModelRequest& req) = 0;
  virtual std::string name() const = 0;
};

// Content-addressed response store: cache/<first2>/<digest>.json holding the
// canonical request plus the response record. Writes are temp-then-rename.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::optional<ModelResponse> lookup(const std::string& key) const;
  void store(const std::string& key, const ModelRequest& req,
             const ModelResponse& resp) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

struct RetryPolicy {
  int attempts = 5;
  int initial_delay_ms = 1000;
  double backoff_factor = 2.0;
  bool jitter = true;
};

struct GatewayOptions {
  RetryPolicy retry;
  int parallelism = 4;
  bool cache_enabled = true;
  std::filesystem::path cache_dir;  // empty disables the cache
  bool sleep_on_retry = true;       // tests turn backoff sleeps off
};

struct GatewayCounters {
  std::atomic<std::int64_t> requests{0};
  std::atomic<std::int64_t> provider_calls{0};
  std::atomic<std::int64_t> cache_hits{0};
  std::atomic<std::int64_t> retries{0};
  std::atomic<int> in_flight{0};
  std::atomic<int> peak_in_flight{0};
};

// Thread-safe front door to a provider: consult cache, enforce the global
// parallelism bound, retry transient failures with jittered exponential
// backoff, fail fast on permanent errors.
class Gateway {
 public:
  Gateway(std::shared_ptr<Provider> provider, GatewayOptions options);
  ~Gateway();

  ModelResponse complete(const ModelRequest& req);

  const GatewayCounters& counters() const { return counters_; }
  int parallelism() const { return options_.parallelism; }
  const GatewayOptions& options() const { return options_; }

 private:
  ModelResponse complete_with_retries(const ModelRequest& req);

  std::shared_ptr<Provider> provider_;
  GatewayOptions options_;
  std::optional<ResponseCache> cache_;
  GatewayCounters counters_;
  struct Slots;
  std::unique_ptr<Slots> slots_;
};

}  // namespace zsb
