#include "zsb/records.hpp"

#include "zsb/errors.hpp"

namespace zsb {
namespace {

void require_version(const nlohmann::json& j, const char* what) {
  if (!j.is_object() || !j.contains("schema_version")) {
    throw IntegrityError(std::string(what) + ": missing schema_version");
  }
  const int v = j.at("schema_version").get<int>();
  if (v != kSchemaVersion) {
    throw IntegrityError(std::string(what) + ": unsupported schema_version " +
                         std::to_string(v));
  }
}

}  // namespace

nlohmann::json BenchmarkInstance::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["instance_id"] = id;
  j["task"] = to_string(task);
  j["language"] = language;
  j["assignment"] = assignment.to_json();
  j["prompt"] = prompt;
  j["reference"] = reference ? nlohmann::json(*reference) : nlohmann::json();
  if (image) {
    j["image"] = {{"path", image->path}, {"digest", image->digest}};
  } else {
    j["image"] = nlohmann::json();
  }
  j["generator_model"] = generator_model;
  j["attempts"] = attempts;
  j["created_at"] = created_at;
  return j;
}

BenchmarkInstance BenchmarkInstance::from_json(const nlohmann::json& j) {
  require_version(j, "instance");
  BenchmarkInstance r;
  r.id = j.at("instance_id").get<int>();
  r.task = task_kind_from_string(j.at("task").get<std::string>());
  r.language = j.at("language").get<std::string>();
  r.assignment =
      AttributeAssignment::from_json(j.at("assignment"), to_string(r.task));
  r.prompt = j.at("prompt").get<std::string>();
  if (!j.at("reference").is_null()) {
    r.reference = j.at("reference").get<std::string>();
  }
  if (!j.at("image").is_null()) {
    r.image = ImageRef{j.at("image").at("path").get<std::string>(),
                       j.at("image").at("digest").get<std::string>()};
  }
  r.generator_model = j.at("generator_model").get<std::string>();
  r.attempts = j.at("attempts").get<int>();
  r.created_at = j.at("created_at").get<std::string>();
  return r;
}

nlohmann::json SystemAnswer::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["instance_id"] = instance_id;
  j["system_id"] = system_id;
  j["text"] = text;
  j["finish_reason"] = finish_reason;
  j["latency_ms"] = latency_ms;
  j["failed"] = failed;
  return j;
}

SystemAnswer SystemAnswer::from_json(const nlohmann::json& j) {
  require_version(j, "answer");
  SystemAnswer r;
  r.instance_id = j.at("instance_id").get<int>();
  r.system_id = j.at("system_id").get<std::string>();
  r.text = j.at("text").get<std::string>();
  r.finish_reason = j.at("finish_reason").get<std::string>();
  r.latency_ms = j.at("latency_ms").get<std::int64_t>();
  r.failed = j.at("failed").get<bool>();
  return r;
}

nlohmann::json Judgment::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["instance_id"] = instance_id;
  j["mode"] = mode == JudgmentMode::da ? "da" : "pwc";
  j["judge_model"] = judge_model;
  j["valid"] = valid;
  j["raw"] = raw;
  if (mode == JudgmentMode::da) {
    j["system_id"] = system_id;
    j["score"] = score ? nlohmann::json(*score) : nlohmann::json();
    j["feedback"] = feedback;
  } else {
    j["system_a"] = system_a;
    j["system_b"] = system_b;
    j["order"] = order;
    j["outcome"] = outcome ? nlohmann::json(to_string(*outcome))
                           : nlohmann::json();
    j["feedback"] = feedback;
  }
  return j;
}

Judgment Judgment::from_json(const nlohmann::json& j) {
  require_version(j, "judgment");
  Judgment r;
  r.instance_id = j.at("instance_id").get<int>();
  r.mode = j.at("mode").get<std::string>() == "da" ? JudgmentMode::da
                                                   : JudgmentMode::pwc;
  r.judge_model = j.at("judge_model").get<std::string>();
  r.valid = j.at("valid").get<bool>();
  r.raw = j.at("raw").get<std::string>();
  r.feedback = j.value("feedback", "");
  if (r.mode == JudgmentMode::da) {
    r.system_id = j.at("system_id").get<std::string>();
    if (!j.at("score").is_null()) r.score = j.at("score").get<int>();
  } else {
    r.system_a = j.at("system_a").get<std::string>();
    r.system_b = j.at("system_b").get<std::string>();
    r.order = j.at("order").get<std::string>();
    if (!j.at("outcome").is_null()) {
      r.outcome =
          battle_outcome_from_string(j.at("outcome").get<std::string>());
    }
  }
  return r;
}

nlohmann::json SafetyAnnotation::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["instance_id"] = instance_id;
  j["score"] = score ? nlohmann::json(*score) : nlohmann::json();
  j["feedback"] = feedback;
  j["raw"] = raw;
  return j;
}

SafetyAnnotation SafetyAnnotation::from_json(const nlohmann::json& j) {
  require_version(j, "safety");
  SafetyAnnotation r;
  r.instance_id = j.at("instance_id").get<int>();
  if (!j.at("score").is_null()) r.score = j.at("score").get<int>();
  r.feedback = j.at("feedback").get<std::string>();
  r.raw = j.at("raw").get<std::string>();
  return r;
}

nlohmann::json VerificationRecord::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["instance_id"] = instance_id;
  j["consistent"] = consistent ? nlohmann::json(*consistent) : nlohmann::json();
  j["reference_score"] =
      reference_score ? nlohmann::json(*reference_score) : nlohmann::json();
  j["raw_consistency"] = raw_consistency;
  j["raw_reference"] = raw_reference;
  return j;
}

VerificationRecord VerificationRecord::from_json(const nlohmann::json& j) {
  require_version(j, "verification");
  VerificationRecord r;
  r.instance_id = j.at("instance_id").get<int>();
  if (!j.at("consistent").is_null()) {
    r.consistent = j.at("consistent").get<bool>();
  }
  if (!j.at("reference_score").is_null()) {
    r.reference_score = j.at("reference_score").get<int>();
  }
  r.raw_consistency = j.at("raw_consistency").get<std::string>();
  r.raw_reference = j.at("raw_reference").get<std::string>();
  return r;
}

nlohmann::json GenerationFailure::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["instance_id"] = id;
  j["attempts"] = attempts;
  j["last_error"] = last_error;
  return j;
}

GenerationFailure GenerationFailure::from_json(const nlohmann::json& j) {
  require_version(j, "generation_failure");
  GenerationFailure r;
  r.id = j.at("instance_id").get<int>();
  r.attempts = j.at("attempts").get<int>();
  r.last_error = j.at("last_error").get<std::string>();
  return r;
}

}  // namespace zsb
