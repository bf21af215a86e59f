#include "zsb/mock_provider.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "zsb/digest.hpp"
#include "zsb/errors.hpp"
#include "zsb/prompt_io.hpp"
#include "zsb/rng.hpp"
#include "zsb/util.hpp"

namespace zsb {

struct MockProvider::Rule {
  nlohmann::json spec;
  int fail_remaining = 0;
};

namespace {

std::string request_text(const ModelRequest& req) {
  std::string all;
  for (const auto& m : req.messages) {
    all += m.text;
    all += '\n';
  }
  return all;
}

std::string last_user_text(const ModelRequest& req) {
  for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it) {
    if (it->role == Role::user) return it->text;
  }
  return {};
}

std::string substitute_tags(std::string text, const ModelRequest& req) {
  auto replace_all = [&text](const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
      text.replace(pos, from.size(), to);
      pos += to.size();
    }
  };
  for (const auto& [k, v] : req.tags) replace_all("${" + k + "}", v);
  replace_all("${model}", req.model);
  return text;
}

bool rule_matches(const nlohmann::json& spec, const ModelRequest& req) {
  if (spec.contains("purpose") &&
      spec.at("purpose").get<std::string>() != to_string(req.purpose)) {
    return false;
  }
  if (spec.contains("model") &&
      spec.at("model").get<std::string>() != req.model) {
    return false;
  }
  if (spec.contains("if_contains") &&
      request_text(req).find(spec.at("if_contains").get<std::string>()) ==
          std::string::npos) {
    return false;
  }
  if (spec.contains("if_tag")) {
    for (const auto& [k, v] : spec.at("if_tag").items()) {
      const auto it = req.tags.find(k);
      if (it == req.tags.end() || it->second != v.get<std::string>()) {
        return false;
      }
    }
  }
  if (spec.contains("if_instance_mod")) {
    const auto& mod = spec.at("if_instance_mod");
    const auto it = req.tags.find("instance_id");
    if (it == req.tags.end()) return false;
    const std::int64_t id = std::stoll(it->second);
    if (id % mod.at(0).get<std::int64_t>() != mod.at(1).get<std::int64_t>()) {
      return false;
    }
  }
  return true;
}

// Marker carrying a planted integer score through answer text.
std::optional<int> find_score_marker(const std::string& text) {
  const std::string marker = "@@score=";
  const std::size_t pos = text.find(marker);
  if (pos == std::string::npos) return std::nullopt;
  const std::size_t digit = pos + marker.size();
  if (digit >= text.size() || text[digit] < '0' || text[digit] > '9') {
    return std::nullopt;
  }
  return text[digit] - '0';
}

std::string judgment_json(const std::string& feedback, const std::string& result) {
  nlohmann::json j;
  j["feedback"] = feedback;
  j["result"] = result;
  return j.dump();
}

ModelResponse text_response(std::string text) {
  ModelResponse resp;
  resp.text = std::move(text);
  resp.finish_reason = "stop";
  resp.latency_ms = 0;
  return resp;
}

}  // namespace

MockProvider::~MockProvider() = default;

MockProvider::MockProvider(nlohmann::json script) {
  if (!script.is_object() || !script.contains("rules") ||
      !script.at("rules").is_array()) {
    throw SchemaError("mock script: object with a \"rules\" array required");
  }
  seed_ = script.value("seed", std::uint64_t{0});
  for (const auto& spec : script.at("rules")) {
    Rule r;
    r.spec = spec;
    r.fail_remaining = spec.value("fail_times", 0);
    rules_.push_back(std::move(r));
  }
}

std::shared_ptr<MockProvider> MockProvider::from_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("mock script: cannot open " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw SchemaError("mock script: invalid JSON in " + path.string());
  }
  return std::make_shared<MockProvider>(std::move(j));
}

ModelResponse MockProvider::complete(const ModelRequest& req) {
  for (auto& rule : rules_) {
    if (!rule_matches(rule.spec, req)) continue;
    const auto& spec = rule.spec;

    if (rule.fail_remaining != 0) {
      bool fail_now = false;
      {
        std::lock_guard<std::mutex> lk(mutex_);
        if (rule.fail_remaining > 0) {
          --rule.fail_remaining;
          fail_now = true;
        }
      }
      if (fail_now) {
        const std::string kind = spec.value("fail_kind", "transient");
        if (kind == "permanent") {
          throw ProviderError("mock: scripted permanent failure");
        }
        throw TransportError("mock: scripted transient failure");
      }
    }

    if (spec.contains("sleep_ms")) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(spec.at("sleep_ms").get<int>()));
    }

    const std::string mode = spec.value("mode", "literal");
    if (mode == "literal") {
      return text_response(
          substitute_tags(spec.value("text", ""), req));
    }
    if (mode == "echo") {
      return text_response(last_user_text(req));
    }
    if (mode == "blocks") {
      std::string out;
      if (spec.contains("source")) {
        out += "<START OF SOURCE>\n" +
               substitute_tags(spec.at("source").get<std::string>(), req) +
               "\n<END OF SOURCE>\n";
        out += "\n<START OF REFERENCE TRANSLATION>\n" +
               substitute_tags(spec.value("reference", "ref"), req) +
               "\n<END OF REFERENCE TRANSLATION>\n";
      } else {
        out += "<START OF PROMPT>\n" +
               substitute_tags(spec.value("prompt", "prompt"), req) +
               "\n<END OF PROMPT>\n";
        if (spec.contains("reference")) {
          out += "\n<START OF REFERENCE>\n" +
                 substitute_tags(spec.at("reference").get<std::string>(), req) +
                 "\n<END OF REFERENCE>\n";
        }
      }
      return text_response(out);
    }
    if (mode == "planted_answer") {
      double quality = spec.value("default_quality", 3.5);
      if (spec.contains("qualities") &&
          spec.at("qualities").contains(req.model)) {
        quality = spec.at("qualities").at(req.model).get<double>();
      }
      const double noise = spec.value("noise", 0.0);
      const std::string iid = req.tags.count("instance_id")
                                  ? req.tags.at("instance_id")
                                  : "0";
      SplitRng rng(seed_);
      SplitRng stream =
          rng.split(fnv1a64(iid + "|" + req.model + "|planted"));
      const double q =
          std::clamp(quality + noise * (2.0 * stream.unit() - 1.0), 1.0, 6.0);
      const double lo = std::floor(q);
      const int score = static_cast<int>(lo) +
                        ((stream.unit() < q - lo) ? 1 : 0);
      return text_response("mock answer by " + req.model + " for instance " +
                           iid + " @@score=" +
                           std::to_string(std::clamp(score, 1, 6)) + "@@");
    }
    if (mode == "judge_marker") {
      const std::string all = request_text(req);
      if (spec.contains("invalid_if_contains") &&
          all.find(spec.at("invalid_if_contains").get<std::string>()) !=
              std::string::npos) {
        return text_response(
            "I believe this response is quite good overall, well done.");
      }
      const auto score = find_score_marker(all);
      if (!score) {
        return text_response(judgment_json("no marker found", "1"));
      }
      return text_response(
          judgment_json("scripted judgment", std::to_string(*score)));
    }
    if (mode == "judge_cycle") {
      const auto& scores = spec.at("scores");
      const std::int64_t iid =
          req.tags.count("instance_id") ? std::stoll(req.tags.at("instance_id"))
                                        : 0;
      const auto idx = static_cast<std::size_t>(iid) % scores.size();
      return text_response(judgment_json(
          "scripted cycle", std::to_string(scores.at(idx).get<int>())));
    }
    if (mode == "verdict_compare") {
      const std::string all = request_text(req);
      std::optional<int> a, b;
      try {
        a = find_score_marker(extract_block(all, "ANSWER A"));
        b = find_score_marker(extract_block(all, "ANSWER B"));
      } catch (const ParseError&) {
      }
      if (!a || !b) return text_response(judgment_json("no markers", "TIE"));
      const std::string r = (*a > *b) ? "A" : (*b > *a) ? "B" : "TIE";
      return text_response(judgment_json("scripted comparison", r));
    }
    if (mode == "verdict_first") {
      return text_response(judgment_json("prefers first presented", "A"));
    }
    if (mode == "consistency") {
      return text_response(
          judgment_json("scripted check", spec.value("result", "consistent")));
    }
    if (mode == "garbage") {
      return text_response(spec.value(
          "text", "Sure! Overall the work shows promise but lacks rigor."));
    }
    throw SchemaError("mock script: unknown mode \"" + mode + "\"");
  }
  throw ProviderError("mock: no rule matches request (purpose=" +
                      to_string(req.purpose) + ", model=" + req.model + ")");
}

}  // namespace zsb
