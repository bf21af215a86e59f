#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zsb/catalog.hpp"
#include "zsb/config.hpp"
#include "zsb/gateway.hpp"
#include "zsb/records.hpp"
#include "zsb/run_dir.hpp"

namespace zsb {

struct GenerationStats {
  int requested = 0;
  int generated = 0;
  int failed = 0;
  int resumed = 0;
  std::uint64_t combination_count = 0;
};

struct AnswerStats {
  int total = 0;
  int issued = 0;   // new requests this invocation
  int resumed = 0;
  int failed = 0;   // transport failures recorded as flagged answers
};

struct JudgeStats {
  int total = 0;
  int issued = 0;
  int resumed = 0;
  int invalid = 0;
  int skipped = 0;  // pwc battles without both answers
  std::string generator_model;
  std::string judge_model;

  double failure_rate() const {
    return total == 0 ? 0.0
                      : static_cast<double>(invalid) / static_cast<double>(total);
  }
};

struct SafetyStats {
  int total = 0;
  int unscored = 0;
  std::array<int, 6> counts{};  // scores 1..6

  // Percentage of scored instances per score value, Likert order.
  std::array<double, 6> distribution() const;
};

struct VerificationReport {
  int instances = 0;
  int consistency_checked = 0;
  int consistent = 0;
  int references_checked = 0;
  int reference_score6 = 0;
  int reference_score5 = 0;

  double pct_consistent() const;
  double pct_perfect_references() const;
  double pct_score5_references() const;
};

struct ValidationIssue {
  std::string file;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Stage orchestration over a run directory. Fan-out is bounded by the
// gateway; persisted record order is canonicalized at stage end so files are
// byte-deterministic regardless of completion order.
class Pipeline {
 public:
  // deterministic_clock pins created_at (epoch + ordinal seconds); on by
  // default for mock providers so reruns are byte-identical.
  Pipeline(RunDir& run, Gateway& gateway, RunConfig config,
           bool deterministic_clock);

  GenerationStats generate_instances();
  AnswerStats collect_answers();
  JudgeStats judge_da();
  JudgeStats judge_pwc();
  SafetyStats annotate_safety();
  VerificationReport verify_instances();

  const RunConfig& config() const { return cfg_; }

 private:
  std::vector<BenchmarkInstance> load_instances() const;
  std::vector<SystemAnswer> load_answers() const;
  ModelResponse complete_tagged(ModelRequest req, int instance_id,
                                const std::string& system_id, int attempt,
                                Purpose purpose, const std::string& model);
  std::optional<ImagePayload> image_payload(const BenchmarkInstance& inst) const;
  std::string timestamp(int ordinal) const;

  RunDir& run_;
  Gateway& gateway_;
  RunConfig cfg_;
  bool deterministic_clock_;
};

// Cross-file referential integrity of a run directory.
ValidationReport validate_run(const RunDir& run);

}  // namespace zsb
