#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zsb/catalog.hpp"
#include "zsb/prompt_io.hpp"

namespace zsb {

inline constexpr int kSchemaVersion = 1;

struct ImageRef {
  std::string path;    // relative to the image pool
  std::string digest;  // sha256 of the bytes
};

struct BenchmarkInstance {
  int id = 0;  // run-scoped ordinal
  TaskKind task = TaskKind::general;
  std::string language;  // language or language pair label
  AttributeAssignment assignment;
  std::string prompt;
  std::optional<std::string> reference;
  std::optional<ImageRef> image;
  std::string generator_model;
  int attempts = 1;
  std::string created_at;

  nlohmann::json to_json() const;
  static BenchmarkInstance from_json(const nlohmann::json& j);
};

struct SystemAnswer {
  int instance_id = 0;
  std::string system_id;
  std::string text;
  std::string finish_reason = "stop";
  std::int64_t latency_ms = 0;
  bool failed = false;  // transport failure after retries; judged regardless

  nlohmann::json to_json() const;
  static SystemAnswer from_json(const nlohmann::json& j);
};

enum class JudgmentMode { da, pwc };

struct Judgment {
  int instance_id = 0;
  JudgmentMode mode = JudgmentMode::da;
  // Direct assessment
  std::string system_id;
  std::optional<int> score;  // 1..6 when valid
  std::string feedback;
  // Pairwise: systems in canonical pair order; order records which one the
  // judge saw first.
  std::string system_a;
  std::string system_b;
  std::string order;  // "forward" (a first) | "reversed" (b first)
  std::optional<BattleOutcome> outcome;
  std::string judge_model;
  bool valid = true;
  std::string raw;  // judge output retained verbatim

  nlohmann::json to_json() const;
  static Judgment from_json(const nlohmann::json& j);
};

struct SafetyAnnotation {
  int instance_id = 0;
  std::optional<int> score;  // nullopt = unscored after retry
  std::string feedback;
  std::string raw;

  nlohmann::json to_json() const;
  static SafetyAnnotation from_json(const nlohmann::json& j);
};

struct VerificationRecord {
  int instance_id = 0;
  std::optional<bool> consistent;      // attribute check verdict
  std::optional<int> reference_score;  // 1..6
  std::string raw_consistency;
  std::string raw_reference;

  nlohmann::json to_json() const;
  static VerificationRecord from_json(const nlohmann::json& j);
};

// A generation slot that exhausted its retry budget.
struct GenerationFailure {
  int id = 0;
  int attempts = 0;
  std::string last_error;

  nlohmann::json to_json() const;
  static GenerationFailure from_json(const nlohmann::json& j);
};

}  // namespace zsb
