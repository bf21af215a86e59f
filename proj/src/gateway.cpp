#include "zsb/gateway.hpp"

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <random>
#include <thread>

#include "zsb/digest.hpp"
#include "zsb/errors.hpp"

// ResponseCache lives in cache.cpp.

namespace zsb {

std::string to_string(Purpose p) {
  switch (p) {
    case Purpose::generate: return "generate";
    case Purpose::answer: return "answer";
    case Purpose::judge: return "judge";
    case Purpose::safety: return "safety";
    case Purpose::verify: return "verify";
  }
  return "answer";
}

Purpose purpose_from_string(const std::string& s) {
  if (s == "generate") return Purpose::generate;
  if (s == "answer") return Purpose::answer;
  if (s == "judge") return Purpose::judge;
  if (s == "safety") return Purpose::safety;
  if (s == "verify") return Purpose::verify;
  throw SchemaError("unknown purpose \"" + s + "\"");
}

std::string to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

nlohmann::json canonical_request(const ModelRequest& req) {
  nlohmann::json j;
  j["model"] = req.model;
  j["purpose"] = to_string(req.purpose);
  j["temperature"] = req.sampling.temperature;
  j["max_tokens"] = req.sampling.max_tokens;
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : req.messages) {
    nlohmann::json mj;
    mj["role"] = to_string(m.role);
    mj["text"] = m.text;
    if (m.image) mj["image_digest"] = m.image->digest;
    msgs.push_back(std::move(mj));
  }
  j["messages"] = std::move(msgs);
  if (!req.tags.empty()) j["tags"] = req.tags;
  return j;
}

std::string cache_key(const ModelRequest& req) {
  return sha256_hex(canonical_request(req).dump());
}

// Counting semaphore over the configured bound; kept private to the .cpp so
// the header stays light.
struct Gateway::Slots {
  std::mutex m;
  std::condition_variable cv;
  int available;

  explicit Slots(int n) : available(n) {}

  void acquire() {
    std::unique_lock<std::mutex> lk(m);
    cv.wait(lk, [&] { return available > 0; });
    --available;
  }
  void release() {
    {
      std::lock_guard<std::mutex> lk(m);
      ++available;
    }
    cv.notify_one();
  }
};

Gateway::Gateway(std::shared_ptr<Provider> provider, GatewayOptions options)
    : provider_(std::move(provider)), options_(std::move(options)) {
  if (options_.parallelism < 1) options_.parallelism = 1;
  if (options_.cache_enabled && !options_.cache_dir.empty()) {
    cache_.emplace(options_.cache_dir);
  }
  slots_ = std::make_unique<Slots>(options_.parallelism);
}

Gateway::~Gateway() = default;

ModelResponse Gateway::complete(const ModelRequest& req) {
  counters_.requests.fetch_add(1);
  const std::string key = cache_ ? cache_key(req) : std::string();
  if (cache_) {
    if (auto hit = cache_->lookup(key)) {
      counters_.cache_hits.fetch_add(1);
      return *hit;
    }
  }

  slots_->acquire();
  const int now_in_flight = counters_.in_flight.fetch_add(1) + 1;
  int peak = counters_.peak_in_flight.load();
  while (now_in_flight > peak &&
         !counters_.peak_in_flight.compare_exchange_weak(peak, now_in_flight)) {
  }
  ModelResponse resp;
  try {
    resp = complete_with_retries(req);
  } catch (...) {
    counters_.in_flight.fetch_sub(1);
    slots_->release();
    throw;
  }
  counters_.in_flight.fetch_sub(1);
  slots_->release();

  if (cache_) cache_->store(key, req, resp);
  return resp;
}

ModelResponse Gateway::complete_with_retries(const ModelRequest& req) {
  std::string last_cause;
  double delay_ms = options_.retry.initial_delay_ms;
  for (int attempt = 1; attempt <= options_.retry.attempts; ++attempt) {
    try {
      const auto t0 = std::chrono::steady_clock::now();
      ModelResponse resp = provider_->complete(req);
      counters_.provider_calls.fetch_add(1);
      if (resp.latency_ms == 0) {
        const auto t1 = std::chrono::steady_clock::now();
        // Mock providers report latency 0 on purpose; keep it that way so
        // mock runs stay byte-reproducible.
        if (provider_->name() != "mock") {
          resp.latency_ms =
              std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                  .count();
        }
      }
      return resp;
    } catch (const TransportError& e) {
      counters_.provider_calls.fetch_add(1);
      last_cause = e.what();
      if (attempt == options_.retry.attempts) break;
      counters_.retries.fetch_add(1);
      if (options_.sleep_on_retry) {
        double sleep_ms = delay_ms;
        if (options_.retry.jitter) {
          static thread_local std::mt19937_64 jitter_rng{
              std::random_device{}()};
          std::uniform_real_distribution<double> u(0.5, 1.5);
          sleep_ms *= u(jitter_rng);
        }
        std::this_thread::sleep_for(
            std::chrono::milliseconds(static_cast<std::int64_t>(sleep_ms)));
      }
      delay_ms *= options_.retry.backoff_factor;
    }
    // ProviderError (permanent) propagates immediately.
  }
  throw TransportError("attempts exhausted (" +
                       std::to_string(options_.retry.attempts) +
                       "); last cause: " + last_cause);
}

}  // namespace zsb
