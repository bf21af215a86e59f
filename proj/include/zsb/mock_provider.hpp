#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "zsb/gateway.hpp"

namespace zsb {

// Scripted offline provider. A script is a JSON object:
//
//   {
//     "seed": 42,
//     "rules": [ { <filters>, <behavior> }, ... ]
//   }
//
// Filters (all present ones must match; first matching rule wins):
//   "purpose": "generate|answer|judge|safety|verify"
//   "model": exact model id
//   "if_contains": substring of any message text
//   "if_tag": {"attempt": "1", ...} exact tag equality
//   "if_instance_mod": [k, r] — instance_id tag % k == r
//
// Behavior:
//   "fail_times": N — fail the first N matching calls ("fail_kind":
//       "transient" | "permanent"); call-order dependent, so scripts using it
//       should run with parallelism 1
//   "sleep_ms": hold the call for a bit (concurrency tests)
//   "mode":
//     "literal"         {"text": ...} with ${tag} substitution
//     "echo"            replies with the last user message text
//     "blocks"          {"prompt":..., "reference":...} or {"source":...,
//                       "reference":...} rendered into START/END block format
//     "planted_answer"  {"qualities": {model: q}, "default_quality", "noise"}
//                       emits an answer carrying "@@score=N@@" where N is a
//                       stochastic rounding of quality + uniform noise,
//                       derived only from (seed, instance_id, model)
//     "judge_marker"    echoes the @@score=N@@ marker found in the request as
//                       {"feedback","result"}; "invalid_if_contains" makes it
//                       emit unparseable prose instead
//     "judge_cycle"     {"scores": [..]} score = scores[instance_id % size]
//     "verdict_compare" compares @@score markers inside ANSWER A / ANSWER B
//     "verdict_first"   always prefers the first-presented answer
//     "consistency"     {"result": "consistent"|"inconsistent"}
//     "garbage"         fixed unparseable prose ({"text": ...} optional)
//
// All content-derived behavior depends only on the request, never on call
// order, so parallel runs stay deterministic.
class MockProvider : public Provider {
 public:
  explicit MockProvider(nlohmann::json script);
  ~MockProvider() override;  // Rule is defined in the .cpp
  static std::shared_ptr<MockProvider> from_file(
      const std::filesystem::path& path);

  ModelResponse complete(const ModelRequest& req) override;
  std::string name() const override { return "mock"; }

 private:
  struct Rule;
  std::vector<Rule> rules_;
  std::uint64_t seed_ = 0;
  std::mutex mutex_;  // guards fail_times counters
};

}  // namespace zsb
