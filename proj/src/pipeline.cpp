#include "zsb/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <mutex>
#include <set>
#include <tuple>

#include "zsb/digest.hpp"
#include "zsb/errors.hpp"
#include "zsb/jsonl.hpp"
#include "zsb/prompt_io.hpp"
#include "zsb/rng.hpp"
#include "zsb/util.hpp"

namespace zsb {
namespace {

constexpr const char* kInstancesFile = "instances.jsonl";
constexpr const char* kFailuresFile = "generation_failures.jsonl";
constexpr const char* kAnswersFile = "answers.jsonl";
constexpr const char* kJudgmentsFile = "judgments.jsonl";
constexpr const char* kSafetyFile = "safety.jsonl";
constexpr const char* kVerificationFile = "verification.jsonl";

// Media type from the file extension; the pool is ordinary image files.
std::string media_type_for(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  return "image/png";
}

std::vector<std::filesystem::path> list_image_pool(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw SchemaError("image pool is empty: " + dir);
  }
  return files;
}

template <typename Record>
void canonical_rewrite(const std::filesystem::path& file,
                       std::vector<Record> records,
                       bool (*less)(const Record&, const Record&)) {
  std::sort(records.begin(), records.end(), less);
  std::vector<nlohmann::json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(r.to_json());
  write_jsonl_atomic(file, lines);
}

bool instance_less(const BenchmarkInstance& a, const BenchmarkInstance& b) {
  return a.id < b.id;
}

bool answer_less(const SystemAnswer& a, const SystemAnswer& b) {
  if (a.instance_id != b.instance_id) return a.instance_id < b.instance_id;
  return a.system_id < b.system_id;
}

bool judgment_less(const Judgment& a, const Judgment& b) {
  if (a.instance_id != b.instance_id) return a.instance_id < b.instance_id;
  if (a.system_id != b.system_id) return a.system_id < b.system_id;
  if (a.system_a != b.system_a) return a.system_a < b.system_a;
  if (a.system_b != b.system_b) return a.system_b < b.system_b;
  return a.order < b.order;
}

bool safety_less(const SafetyAnnotation& a, const SafetyAnnotation& b) {
  return a.instance_id < b.instance_id;
}

bool verification_less(const VerificationRecord& a, const VerificationRecord& b) {
  return a.instance_id < b.instance_id;
}

bool failure_less(const GenerationFailure& a, const GenerationFailure& b) {
  return a.id < b.id;
}

}  // namespace

std::array<double, 6> SafetyStats::distribution() const {
  std::array<double, 6> out{};
  const int scored = total - unscored;
  if (scored <= 0) return out;
  for (int i = 0; i < 6; ++i) {
    out[i] = 100.0 * static_cast<double>(counts[i]) / static_cast<double>(scored);
  }
  return out;
}

double VerificationReport::pct_consistent() const {
  return consistency_checked == 0
             ? 0.0
             : 100.0 * consistent / static_cast<double>(consistency_checked);
}

double VerificationReport::pct_perfect_references() const {
  return references_checked == 0
             ? 0.0
             : 100.0 * reference_score6 / static_cast<double>(references_checked);
}

double VerificationReport::pct_score5_references() const {
  return references_checked == 0
             ? 0.0
             : 100.0 * reference_score5 / static_cast<double>(references_checked);
}

Pipeline::Pipeline(RunDir& run, Gateway& gateway, RunConfig config,
                   bool deterministic_clock)
    : run_(run),
      gateway_(gateway),
      cfg_(std::move(config)),
      deterministic_clock_(deterministic_clock) {}

std::vector<BenchmarkInstance> Pipeline::load_instances() const {
  std::vector<BenchmarkInstance> out;
  for (const auto& j : read_jsonl(run_.file(kInstancesFile))) {
    out.push_back(BenchmarkInstance::from_json(j));
  }
  std::sort(out.begin(), out.end(), instance_less);
  return out;
}

std::vector<SystemAnswer> Pipeline::load_answers() const {
  std::vector<SystemAnswer> out;
  for (const auto& j : read_jsonl(run_.file(kAnswersFile))) {
    out.push_back(SystemAnswer::from_json(j));
  }
  std::sort(out.begin(), out.end(), answer_less);
  return out;
}

std::string Pipeline::timestamp(int ordinal) const {
  return deterministic_clock_ ? iso_utc(ordinal) : iso_utc(wall_epoch_seconds());
}

ModelResponse Pipeline::complete_tagged(ModelRequest req, int instance_id,
                                        const std::string& system_id,
                                        int attempt, Purpose purpose,
                                        const std::string& model) {
  req.model = model;
  req.purpose = purpose;
  req.sampling = cfg_.sampling;
  req.tag("instance_id", std::to_string(instance_id));
  if (!system_id.empty()) req.tag("system_id", system_id);
  req.tag("attempt", std::to_string(attempt));
  return gateway_.complete(req);
}

std::optional<ImagePayload> Pipeline::image_payload(
    const BenchmarkInstance& inst) const {
  if (!inst.image) return std::nullopt;
  const auto path = std::filesystem::path(cfg_.image_pool) / inst.image->path;
  const std::string bytes = read_text_file(path.string());
  const std::string digest = sha256_hex(bytes);
  if (digest != inst.image->digest) {
    throw IntegrityError("image " + inst.image->path +
                         " changed since generation (digest mismatch)");
  }
  ImagePayload payload;
  payload.path = inst.image->path;
  payload.digest = digest;
  payload.base64 = base64_encode(bytes);
  payload.media_type = media_type_for(path);
  return payload;
}

GenerationStats Pipeline::generate_instances() {
  AttributeCatalog catalog = load_catalog(cfg_.catalog_path);
  if (cfg_.enabled_axes) {
    catalog = restrict_catalog(catalog, *cfg_.enabled_axes);
  }
  PromptTemplate meta = PromptTemplate::load(cfg_.templates.meta, cfg_.task);

  std::vector<std::filesystem::path> pool;
  if (cfg_.task == TaskKind::vision) {
    pool = list_image_pool(cfg_.image_pool);
  }

  GenerationStats stats;
  stats.requested = cfg_.instance_count;
  stats.combination_count = catalog.combination_count();

  std::vector<BenchmarkInstance> existing = load_instances();
  std::vector<GenerationFailure> failures;
  for (const auto& j : read_jsonl(run_.file(kFailuresFile))) {
    failures.push_back(GenerationFailure::from_json(j));
  }
  std::set<int> done;
  for (const auto& inst : existing) done.insert(inst.id);
  for (const auto& f : failures) done.insert(f.id);
  stats.resumed = static_cast<int>(done.size());

  std::vector<int> todo;
  for (int id = 0; id < cfg_.instance_count; ++id) {
    if (!done.count(id)) todo.push_back(id);
  }

  const SplitRng run_rng(cfg_.seed);
  std::mutex sink;
  std::vector<BenchmarkInstance> fresh;
  std::vector<GenerationFailure> fresh_failures;

  parallel_for(todo.size(), gateway_.parallelism(), [&](std::size_t k) {
    const int id = todo[k];
    SplitRng rng = run_rng.split(static_cast<std::uint64_t>(id));
    const AttributeAssignment assignment = sample_assignment(catalog, rng);

    auto bindings = assignment.bindings();
    if (cfg_.task == TaskKind::translation) {
      bindings["source_language"] = cfg_.source_language();
      bindings["target_language"] = cfg_.target_language();
    } else {
      bindings["language"] = cfg_.language;
    }
    const RenderResult rendered = render_template(meta, bindings);

    std::optional<ImageRef> image;
    std::optional<ImagePayload> payload;
    if (cfg_.task == TaskKind::vision) {
      const auto& file = pool[rng.below(pool.size())];
      const std::string bytes = read_text_file(file.string());
      ImageRef ref;
      ref.path = std::filesystem::relative(file, cfg_.image_pool).string();
      ref.digest = sha256_hex(bytes);
      image = ref;
      ImagePayload p;
      p.path = ref.path;
      p.digest = ref.digest;
      p.base64 = base64_encode(bytes);
      p.media_type = media_type_for(file);
      payload = std::move(p);
    }

    std::string last_error;
    for (int attempt = 1; attempt <= cfg_.generation_retries; ++attempt) {
      ModelRequest req;
      Message msg;
      msg.role = Role::user;
      msg.text = rendered.text;
      msg.image = payload;
      req.messages.push_back(std::move(msg));
      try {
        const ModelResponse resp = complete_tagged(
            std::move(req), id, "", attempt, Purpose::generate,
            cfg_.generator_model);
        const ParsedGeneration parsed = parse_generation(cfg_.task, resp.text);

        BenchmarkInstance inst;
        inst.id = id;
        inst.task = cfg_.task;
        inst.language = cfg_.language;
        inst.assignment = assignment;
        inst.prompt = parsed.primary;
        inst.reference = parsed.reference;
        inst.image = image;
        inst.generator_model = cfg_.generator_model;
        inst.attempts = attempt;
        inst.created_at = timestamp(id);
        {
          std::lock_guard<std::mutex> lk(sink);
          append_jsonl(run_.file(kInstancesFile), inst.to_json());
          fresh.push_back(std::move(inst));
        }
        return;
      } catch (const ParseError& e) {
        last_error = e.what();
      } catch (const TransportError& e) {
        last_error = e.what();
      }
    }
    GenerationFailure failure;
    failure.id = id;
    failure.attempts = cfg_.generation_retries;
    failure.last_error = last_error;
    {
      std::lock_guard<std::mutex> lk(sink);
      append_jsonl(run_.file(kFailuresFile), failure.to_json());
      fresh_failures.push_back(std::move(failure));
    }
  });

  existing.insert(existing.end(), fresh.begin(), fresh.end());
  failures.insert(failures.end(), fresh_failures.begin(), fresh_failures.end());
  canonical_rewrite(run_.file(kInstancesFile), existing, instance_less);
  if (!failures.empty()) {
    canonical_rewrite(run_.file(kFailuresFile), failures, failure_less);
  }

  stats.generated = static_cast<int>(existing.size());
  stats.failed = static_cast<int>(failures.size());
  if (stats.failed * 5 > cfg_.instance_count) {
    throw RunError("generation failed for " + std::to_string(stats.failed) +
                   " of " + std::to_string(cfg_.instance_count) +
                   " instances (>20%); generator unfit for this task");
  }
  return stats;
}

AnswerStats Pipeline::collect_answers() {
  const std::vector<BenchmarkInstance> instances = load_instances();
  if (instances.empty()) {
    throw SchemaError("no instances in run directory; run generate first");
  }
  std::vector<SystemAnswer> existing = load_answers();
  std::set<std::pair<int, std::string>> done;
  for (const auto& a : existing) done.emplace(a.instance_id, a.system_id);

  struct Task {
    const BenchmarkInstance* instance;
    std::string system;
  };
  std::vector<Task> todo;
  for (const auto& inst : instances) {
    for (const auto& system : cfg_.systems) {
      if (!done.count({inst.id, system})) todo.push_back({&inst, system});
    }
  }

  AnswerStats stats;
  stats.total = static_cast<int>(instances.size() * cfg_.systems.size());
  stats.resumed = static_cast<int>(existing.size());
  stats.issued = static_cast<int>(todo.size());

  std::mutex sink;
  std::vector<SystemAnswer> fresh;
  std::atomic<int> failed{0};

  parallel_for(todo.size(), gateway_.parallelism(), [&](std::size_t k) {
    const Task& task = todo[k];
    ModelRequest req;
    Message msg;
    msg.role = Role::user;
    msg.text = task.instance->prompt;
    msg.image = image_payload(*task.instance);
    req.messages.push_back(std::move(msg));

    SystemAnswer answer;
    answer.instance_id = task.instance->id;
    answer.system_id = task.system;
    try {
      const ModelResponse resp =
          complete_tagged(std::move(req), task.instance->id, task.system, 1,
                          Purpose::answer, task.system);
      answer.text = resp.text;
      answer.finish_reason = resp.finish_reason;
      answer.latency_ms = resp.latency_ms;
      answer.failed = false;
    } catch (const TransportError& e) {
      // Recorded and judged like any other answer; the rubric decides.
      answer.text = "";
      answer.finish_reason = "error";
      answer.latency_ms = 0;
      answer.failed = true;
      failed.fetch_add(1);
    }
    {
      std::lock_guard<std::mutex> lk(sink);
      append_jsonl(run_.file(kAnswersFile), answer.to_json());
      fresh.push_back(std::move(answer));
    }
  });

  existing.insert(existing.end(), fresh.begin(), fresh.end());
  canonical_rewrite(run_.file(kAnswersFile), existing, answer_less);
  stats.failed = failed.load();
  return stats;
}

JudgeStats Pipeline::judge_da() {
  const std::vector<BenchmarkInstance> instances = load_instances();
  const std::vector<SystemAnswer> answers = load_answers();
  if (answers.empty()) {
    throw SchemaError("no answers in run directory; run answer first");
  }
  std::map<int, const BenchmarkInstance*> by_id;
  for (const auto& inst : instances) by_id[inst.id] = &inst;

  PromptTemplate rubric = PromptTemplate::load(cfg_.templates.judge, cfg_.task);

  std::vector<Judgment> existing;
  for (const auto& j : read_jsonl(run_.file(kJudgmentsFile))) {
    existing.push_back(Judgment::from_json(j));
  }
  std::set<std::pair<int, std::string>> done;
  for (const auto& j : existing) {
    if (j.mode == JudgmentMode::da) done.emplace(j.instance_id, j.system_id);
  }

  std::vector<const SystemAnswer*> todo;
  for (const auto& a : answers) {
    if (!by_id.count(a.instance_id)) {
      throw IntegrityError("answer references unknown instance " +
                           std::to_string(a.instance_id));
    }
    if (!done.count({a.instance_id, a.system_id})) todo.push_back(&a);
  }

  JudgeStats stats;
  stats.total = static_cast<int>(answers.size());
  stats.resumed = static_cast<int>(done.size());
  stats.issued = static_cast<int>(todo.size());
  stats.generator_model = cfg_.generator_model;
  stats.judge_model = cfg_.judge_model;

  std::mutex sink;
  std::vector<Judgment> fresh;
  std::atomic<int> invalid_new{0};

  parallel_for(todo.size(), gateway_.parallelism(), [&](std::size_t k) {
    const SystemAnswer& answer = *todo[k];
    const BenchmarkInstance& inst = *by_id.at(answer.instance_id);

    std::map<std::string, std::string> bindings;
    bindings["prompt"] = inst.prompt;
    bindings["answer"] = answer.text;
    if (cfg_.reference_aware && inst.reference) {
      bindings["reference"] = *inst.reference;
    }
    const RenderResult rendered = render_template(rubric, bindings);

    Judgment judgment;
    judgment.instance_id = inst.id;
    judgment.mode = JudgmentMode::da;
    judgment.system_id = answer.system_id;
    judgment.judge_model = cfg_.judge_model;

    // Invalid judge output is retried once with a fresh completion, then
    // recorded invalid; invalidity is data, not failure.
    for (int attempt = 1; attempt <= 1 + cfg_.judge_retries; ++attempt) {
      ModelRequest req;
      req.messages.push_back(Message{Role::user, rendered.text, std::nullopt});
      const ModelResponse resp =
          complete_tagged(std::move(req), inst.id, answer.system_id, attempt,
                          Purpose::judge, cfg_.judge_model);
      judgment.raw = resp.text;
      try {
        const ParsedJudgment parsed = parse_judgment(resp.text);
        judgment.score = parsed.score;
        judgment.feedback = parsed.feedback;
        judgment.valid = true;
        break;
      } catch (const ParseError&) {
        judgment.valid = false;
        judgment.score.reset();
      }
    }
    if (!judgment.valid) invalid_new.fetch_add(1);
    {
      std::lock_guard<std::mutex> lk(sink);
      append_jsonl(run_.file(kJudgmentsFile), judgment.to_json());
      fresh.push_back(std::move(judgment));
    }
  });

  existing.insert(existing.end(), fresh.begin(), fresh.end());
  canonical_rewrite(run_.file(kJudgmentsFile), existing, judgment_less);
  int invalid_total = 0;
  for (const auto& j : existing) {
    if (j.mode == JudgmentMode::da && !j.valid) ++invalid_total;
  }
  stats.invalid = invalid_total;
  return stats;
}

JudgeStats Pipeline::judge_pwc() {
  const std::vector<BenchmarkInstance> instances = load_instances();
  const std::vector<SystemAnswer> answers = load_answers();
  if (answers.empty()) {
    throw SchemaError("no answers in run directory; run answer first");
  }
  std::map<int, const BenchmarkInstance*> by_id;
  for (const auto& inst : instances) by_id[inst.id] = &inst;
  std::map<std::pair<int, std::string>, const SystemAnswer*> answer_map;
  for (const auto& a : answers) answer_map[{a.instance_id, a.system_id}] = &a;

  if (cfg_.templates.judge_pairwise.empty()) {
    throw SchemaError("config: pairwise judging requires templates.judge_pairwise");
  }
  PromptTemplate rubric =
      PromptTemplate::load(cfg_.templates.judge_pairwise, cfg_.task);

  // Canonical pairs in config order; both presentation orders are always
  // played, which is what neutralizes judge position bias.
  std::vector<std::pair<std::string, std::string>> pairs;
  if (cfg_.judging_mode == JudgingMode::pwc_baseline) {
    for (const auto& s : cfg_.systems) {
      if (s != cfg_.baseline_system) pairs.emplace_back(cfg_.baseline_system, s);
    }
  } else {
    for (std::size_t i = 0; i < cfg_.systems.size(); ++i) {
      for (std::size_t j = i + 1; j < cfg_.systems.size(); ++j) {
        pairs.emplace_back(cfg_.systems[i], cfg_.systems[j]);
      }
    }
  }

  std::vector<Judgment> existing;
  for (const auto& j : read_jsonl(run_.file(kJudgmentsFile))) {
    existing.push_back(Judgment::from_json(j));
  }
  std::set<std::tuple<int, std::string, std::string, std::string>> done;
  for (const auto& j : existing) {
    if (j.mode == JudgmentMode::pwc) {
      done.emplace(j.instance_id, j.system_a, j.system_b, j.order);
    }
  }

  struct Task {
    const BenchmarkInstance* instance;
    std::string a;
    std::string b;
    std::string order;  // "forward" | "reversed"
  };
  std::vector<Task> todo;
  int skipped = 0;
  for (const auto& inst : instances) {
    for (const auto& [a, b] : pairs) {
      if (!answer_map.count({inst.id, a}) || !answer_map.count({inst.id, b})) {
        std::cerr << "judge: skipping battle " << a << " vs " << b
                  << " on instance " << inst.id << " (missing answer)\n";
        ++skipped;
        continue;
      }
      for (const char* order : {"forward", "reversed"}) {
        if (!done.count({inst.id, a, b, order})) {
          todo.push_back({&inst, a, b, order});
        }
      }
    }
  }

  JudgeStats stats;
  stats.total = static_cast<int>(done.size() + todo.size());
  stats.resumed = static_cast<int>(done.size());
  stats.issued = static_cast<int>(todo.size());
  stats.skipped = skipped;
  stats.generator_model = cfg_.generator_model;
  stats.judge_model = cfg_.judge_model;

  std::mutex sink;
  std::vector<Judgment> fresh;

  parallel_for(todo.size(), gateway_.parallelism(), [&](std::size_t k) {
    const Task& task = todo[k];
    const bool forward = task.order == "forward";
    const SystemAnswer& first =
        *answer_map.at({task.instance->id, forward ? task.a : task.b});
    const SystemAnswer& second =
        *answer_map.at({task.instance->id, forward ? task.b : task.a});

    std::map<std::string, std::string> bindings;
    bindings["prompt"] = task.instance->prompt;
    bindings["answer_a"] = first.text;
    bindings["answer_b"] = second.text;
    const RenderResult rendered = render_template(rubric, bindings);

    Judgment judgment;
    judgment.instance_id = task.instance->id;
    judgment.mode = JudgmentMode::pwc;
    judgment.system_a = task.a;
    judgment.system_b = task.b;
    judgment.order = task.order;
    judgment.judge_model = cfg_.judge_model;

    for (int attempt = 1; attempt <= 1 + cfg_.judge_retries; ++attempt) {
      ModelRequest req;
      req.messages.push_back(Message{Role::user, rendered.text, std::nullopt});
      const ModelResponse resp = complete_tagged(
          std::move(req), task.instance->id, task.a + "|" + task.b + "|" + task.order,
          attempt, Purpose::judge, cfg_.judge_model);
      judgment.raw = resp.text;
      try {
        const ParsedVerdict verdict = parse_verdict(resp.text);
        judgment.feedback = verdict.feedback;
        // The judge's A/B refer to presentation order; store the outcome
        // relative to the canonical (system_a, system_b) labels.
        if (verdict.outcome == BattleOutcome::tie) {
          judgment.outcome = BattleOutcome::tie;
        } else if ((verdict.outcome == BattleOutcome::a) == forward) {
          judgment.outcome = BattleOutcome::a;
        } else {
          judgment.outcome = BattleOutcome::b;
        }
        judgment.valid = true;
        break;
      } catch (const ParseError&) {
        judgment.valid = false;
        judgment.outcome.reset();
      }
    }
    {
      std::lock_guard<std::mutex> lk(sink);
      append_jsonl(run_.file(kJudgmentsFile), judgment.to_json());
      fresh.push_back(std::move(judgment));
    }
  });

  existing.insert(existing.end(), fresh.begin(), fresh.end());
  canonical_rewrite(run_.file(kJudgmentsFile), existing, judgment_less);
  int invalid_total = 0;
  for (const auto& j : existing) {
    if (j.mode == JudgmentMode::pwc && !j.valid) ++invalid_total;
  }
  stats.invalid = invalid_total;
  return stats;
}

SafetyStats Pipeline::annotate_safety() {
  const std::vector<BenchmarkInstance> instances = load_instances();
  if (instances.empty()) {
    throw SchemaError("no instances in run directory; run generate first");
  }
  if (cfg_.templates.safety.empty()) {
    throw SchemaError("config: safety stage requires templates.safety");
  }
  PromptTemplate prompt = PromptTemplate::load(cfg_.templates.safety, cfg_.task);

  std::vector<SafetyAnnotation> existing;
  for (const auto& j : read_jsonl(run_.file(kSafetyFile))) {
    existing.push_back(SafetyAnnotation::from_json(j));
  }
  std::set<int> done;
  for (const auto& s : existing) done.insert(s.instance_id);

  std::vector<const BenchmarkInstance*> todo;
  for (const auto& inst : instances) {
    if (!done.count(inst.id)) todo.push_back(&inst);
  }

  std::mutex sink;
  std::vector<SafetyAnnotation> fresh;

  parallel_for(todo.size(), gateway_.parallelism(), [&](std::size_t k) {
    const BenchmarkInstance& inst = *todo[k];
    const RenderResult rendered =
        render_template(prompt, {{"prompt", inst.prompt}});

    SafetyAnnotation annotation;
    annotation.instance_id = inst.id;
    for (int attempt = 1; attempt <= 2; ++attempt) {
      ModelRequest req;
      Message msg;
      msg.role = Role::user;
      msg.text = rendered.text;
      msg.image = image_payload(inst);
      req.messages.push_back(std::move(msg));
      const ModelResponse resp = complete_tagged(
          std::move(req), inst.id, "", attempt, Purpose::safety,
          cfg_.safety_model);
      annotation.raw = resp.text;
      try {
        const ParsedJudgment parsed = parse_judgment(resp.text);
        annotation.score = parsed.score;
        annotation.feedback = parsed.feedback;
        break;
      } catch (const ParseError&) {
        annotation.score.reset();  // unscored
      }
    }
    {
      std::lock_guard<std::mutex> lk(sink);
      append_jsonl(run_.file(kSafetyFile), annotation.to_json());
      fresh.push_back(std::move(annotation));
    }
  });

  existing.insert(existing.end(), fresh.begin(), fresh.end());
  canonical_rewrite(run_.file(kSafetyFile), existing, safety_less);

  SafetyStats stats;
  stats.total = static_cast<int>(existing.size());
  for (const auto& s : existing) {
    if (s.score) {
      stats.counts[static_cast<std::size_t>(*s.score - 1)] += 1;
    } else {
      stats.unscored += 1;
    }
  }
  return stats;
}

VerificationReport Pipeline::verify_instances() {
  const std::vector<BenchmarkInstance> instances = load_instances();
  if (instances.empty()) {
    throw SchemaError("no instances in run directory; run generate first");
  }
  if (cfg_.templates.verify_consistency.empty() ||
      cfg_.templates.verify_reference.empty()) {
    throw SchemaError(
        "config: verify stage requires templates.verify_consistency and "
        "templates.verify_reference");
  }
  PromptTemplate consistency =
      PromptTemplate::load(cfg_.templates.verify_consistency, cfg_.task);
  PromptTemplate reference_quality =
      PromptTemplate::load(cfg_.templates.verify_reference, cfg_.task);

  std::vector<VerificationRecord> existing;
  for (const auto& j : read_jsonl(run_.file(kVerificationFile))) {
    existing.push_back(VerificationRecord::from_json(j));
  }
  std::set<int> done;
  for (const auto& r : existing) done.insert(r.instance_id);

  std::vector<const BenchmarkInstance*> todo;
  for (const auto& inst : instances) {
    if (!done.count(inst.id)) todo.push_back(&inst);
  }

  std::mutex sink;
  std::vector<VerificationRecord> fresh;

  parallel_for(todo.size(), gateway_.parallelism(), [&](std::size_t k) {
    const BenchmarkInstance& inst = *todo[k];
    VerificationRecord record;
    record.instance_id = inst.id;

    auto bindings = inst.assignment.bindings();
    bindings["prompt"] = inst.prompt;
    nlohmann::json attrs = inst.assignment.to_json();
    bindings["attributes"] = attrs.dump();
    const RenderResult rendered = render_template(consistency, bindings);
    for (int attempt = 1; attempt <= 2; ++attempt) {
      ModelRequest req;
      req.messages.push_back(Message{Role::user, rendered.text, std::nullopt});
      const ModelResponse resp = complete_tagged(
          std::move(req), inst.id, "consistency", attempt, Purpose::verify,
          cfg_.checker_model);
      record.raw_consistency = resp.text;
      try {
        record.consistent = parse_consistency(resp.text);
        break;
      } catch (const ParseError&) {
        record.consistent.reset();
      }
    }

    if (inst.reference) {
      const RenderResult ref_rendered = render_template(
          reference_quality,
          {{"prompt", inst.prompt}, {"reference", *inst.reference}});
      for (int attempt = 1; attempt <= 2; ++attempt) {
        ModelRequest req;
        req.messages.push_back(
            Message{Role::user, ref_rendered.text, std::nullopt});
        const ModelResponse resp = complete_tagged(
            std::move(req), inst.id, "reference", attempt, Purpose::verify,
            cfg_.checker_model);
        record.raw_reference = resp.text;
        try {
          record.reference_score = parse_judgment(resp.text).score;
          break;
        } catch (const ParseError&) {
          record.reference_score.reset();
        }
      }
    }
    {
      std::lock_guard<std::mutex> lk(sink);
      append_jsonl(run_.file(kVerificationFile), record.to_json());
      fresh.push_back(std::move(record));
    }
  });

  existing.insert(existing.end(), fresh.begin(), fresh.end());
  canonical_rewrite(run_.file(kVerificationFile), existing, verification_less);

  VerificationReport report;
  report.instances = static_cast<int>(existing.size());
  for (const auto& r : existing) {
    if (r.consistent) {
      report.consistency_checked += 1;
      if (*r.consistent) report.consistent += 1;
    }
    if (r.reference_score) {
      report.references_checked += 1;
      if (*r.reference_score == 6) report.reference_score6 += 1;
      if (*r.reference_score == 5) report.reference_score5 += 1;
    }
  }
  return report;
}

ValidationReport validate_run(const RunDir& run) {
  ValidationReport report;
  auto complain = [&](const std::string& file, const std::string& message) {
    report.issues.push_back(ValidationIssue{file, message});
  };

  std::set<int> instance_ids;
  std::set<std::pair<int, std::string>> answer_keys;
  try {
    for (const auto& j : read_jsonl(run.file("instances.jsonl"))) {
      const auto inst = BenchmarkInstance::from_json(j);
      if (!instance_ids.insert(inst.id).second) {
        complain("instances.jsonl",
                 "duplicate instance id " + std::to_string(inst.id));
      }
      if (inst.prompt.empty()) {
        complain("instances.jsonl",
                 "instance " + std::to_string(inst.id) + " has empty prompt");
      }
      if (inst.task == TaskKind::translation && !inst.reference) {
        complain("instances.jsonl", "translation instance " +
                                        std::to_string(inst.id) +
                                        " lacks a reference");
      }
      if (inst.task == TaskKind::vision && !inst.image) {
        complain("instances.jsonl", "vision instance " +
                                        std::to_string(inst.id) +
                                        " lacks an image reference");
      }
    }
    for (const auto& j : read_jsonl(run.file("answers.jsonl"))) {
      const auto a = SystemAnswer::from_json(j);
      if (!instance_ids.count(a.instance_id)) {
        complain("answers.jsonl", "answer references unknown instance " +
                                      std::to_string(a.instance_id));
      }
      if (!answer_keys.emplace(a.instance_id, a.system_id).second) {
        complain("answers.jsonl",
                 "duplicate (instance, system) = (" +
                     std::to_string(a.instance_id) + ", " + a.system_id + ")");
      }
    }
    for (const auto& j : read_jsonl(run.file("judgments.jsonl"))) {
      const auto jd = Judgment::from_json(j);
      if (jd.mode == JudgmentMode::da) {
        if (!answer_keys.count({jd.instance_id, jd.system_id})) {
          complain("judgments.jsonl",
                   "judgment references missing answer (" +
                       std::to_string(jd.instance_id) + ", " + jd.system_id +
                       ")");
        }
        if (jd.valid && (!jd.score || *jd.score < 1 || *jd.score > 6)) {
          complain("judgments.jsonl",
                   "valid judgment without a 1..6 score on instance " +
                       std::to_string(jd.instance_id));
        }
        if (!jd.valid && jd.score) {
          complain("judgments.jsonl",
                   "invalid judgment carries a score on instance " +
                       std::to_string(jd.instance_id));
        }
      } else {
        for (const auto& side : {jd.system_a, jd.system_b}) {
          if (!answer_keys.count({jd.instance_id, side})) {
            complain("judgments.jsonl",
                     "battle references missing answer (" +
                         std::to_string(jd.instance_id) + ", " + side + ")");
          }
        }
        if (!jd.valid && jd.outcome) {
          complain("judgments.jsonl",
                   "invalid battle carries an outcome on instance " +
                       std::to_string(jd.instance_id));
        }
      }
    }
    for (const auto& j : read_jsonl(run.file("safety.jsonl"))) {
      const auto s = SafetyAnnotation::from_json(j);
      if (!instance_ids.count(s.instance_id)) {
        complain("safety.jsonl", "annotation references unknown instance " +
                                     std::to_string(s.instance_id));
      }
    }
    for (const auto& j : read_jsonl(run.file("verification.jsonl"))) {
      const auto v = VerificationRecord::from_json(j);
      if (!instance_ids.count(v.instance_id)) {
        complain("verification.jsonl",
                 "record references unknown instance " +
                     std::to_string(v.instance_id));
      }
    }
  } catch (const IntegrityError& e) {
    complain("run", e.what());
  }
  return report;
}

}  // namespace zsb
