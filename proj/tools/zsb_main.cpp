// zsb: build a benchmark end to end — generate synthetic instances, collect
// system answers, judge them, rank systems, and meta-evaluate the resulting
// leaderboard against a gold ranking.

#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "zsb/config.hpp"
#include "zsb/errors.hpp"
#include "zsb/http_provider.hpp"
#include "zsb/jsonl.hpp"
#include "zsb/metaeval.hpp"
#include "zsb/mock_provider.hpp"
#include "zsb/pipeline.hpp"
#include "zsb/reports.hpp"
#include "zsb/run_dir.hpp"
#include "zsb/scoring.hpp"
#include "zsb/util.hpp"

namespace {

using namespace zsb;

struct StageFlags {
  std::string config_path;
  std::string run_path;
  std::string mock_path;
  std::string mode;
  std::string gold_path;
  std::string tables_path;
  std::string tie_policy = "strict";
  std::string subsample;
  std::string subsample_policy = "prefix";
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
};

std::shared_ptr<Provider> make_provider(const RunConfig& cfg,
                                        const std::string& mock_path) {
  if (!mock_path.empty()) return MockProvider::from_file(mock_path);
  if (cfg.providers.empty()) {
    throw SchemaError(
        "config: field \"providers\" is empty and no --mock script given");
  }
  return std::make_shared<HttpProvider>(cfg.providers);
}

GatewayOptions gateway_options(const RunConfig& cfg, const RunDir& run,
                               bool mock) {
  GatewayOptions opts;
  opts.retry.attempts = cfg.gateway.attempts;
  opts.retry.initial_delay_ms = cfg.gateway.backoff_initial_ms;
  opts.retry.backoff_factor = cfg.gateway.backoff_factor;
  opts.parallelism = cfg.gateway.parallelism;
  opts.cache_enabled = cfg.gateway.cache;
  if (opts.cache_enabled) opts.cache_dir = run.cache_dir();
  opts.sleep_on_retry = !mock;
  return opts;
}

std::vector<std::int64_t> parse_grid(const std::string& grid) {
  std::vector<std::int64_t> out;
  std::stringstream ss(grid);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const std::string t = trim(cell);
    if (t.empty()) continue;
    try {
      out.push_back(std::stoll(t));
    } catch (const std::exception&) {
      throw SchemaError("bad --subsample entry \"" + t + "\"");
    }
  }
  if (out.empty()) throw SchemaError("--subsample grid is empty");
  return out;
}

std::vector<Judgment> load_judgments(const RunDir& run) {
  std::vector<Judgment> out;
  for (const auto& j : read_jsonl(run.file("judgments.jsonl"))) {
    out.push_back(Judgment::from_json(j));
  }
  if (out.empty()) {
    throw SchemaError("no judgments in run directory; run judge first");
  }
  return out;
}

void write_leaderboard_files(const RunDir& run, const std::string& stem,
                             const Leaderboard& board) {
  std::vector<nlohmann::json> lines;
  for (const auto& e : board.entries) {
    lines.push_back({{"rank", e.rank},
                     {"system", e.system},
                     {"score", e.score},
                     {"n", e.n},
                     {"failure_rate", e.failure_rate},
                     {"mode", board.mode}});
  }
  write_jsonl_atomic(run.file(stem + ".jsonl"), lines);
  write_text_file_atomic(run.file(stem + ".csv").string(),
                         leaderboard_csv(board));
  write_text_file_atomic(run.file(stem + ".md").string(),
                         leaderboard_markdown(board));
}

Leaderboard compute_leaderboard(const RunDir& run, const RunConfig& cfg,
                                JudgingMode mode) {
  const auto judgments = load_judgments(run);
  switch (mode) {
    case JudgingMode::da:
      return mean_score_leaderboard(judgments);
    case JudgingMode::pwc_baseline:
      return win_rate_vs_baseline(judgments, cfg.baseline_system);
    case JudgingMode::pwc_all:
      return elo_leaderboard(judgments);
  }
  throw SchemaError("unknown judging mode");
}

int cmd_generate(const StageFlags& flags) {
  RunConfig cfg = RunConfig::load(flags.config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.n) cfg.instance_count = *flags.n;
  if (cfg.instance_count < 1) {
    throw SchemaError("config: \"instance_count\" must be >= 1");
  }

  RunDir run = RunDir::create(flags.run_path, cfg);
  RunLock lock(run.path());
  const bool mock = !flags.mock_path.empty();
  Gateway gateway(make_provider(cfg, flags.mock_path),
                  gateway_options(cfg, run, mock));
  Pipeline pipeline(run, gateway, cfg, mock);
  const GenerationStats stats = pipeline.generate_instances();

  std::cout << "generated " << stats.generated << "/" << stats.requested
            << " instances (" << stats.failed << " failed, " << stats.resumed
            << " resumed)\n";
  std::cout << "catalog combinations: " << stats.combination_count << "\n";
  return 0;
}

int cmd_stage(const StageFlags& flags, const std::string& stage) {
  RunDir run = RunDir::open(flags.run_path);
  RunLock lock(run.path());
  RunConfig cfg = run.config();
  if (!flags.mode.empty()) {
    cfg.judging_mode = judging_mode_from_string(flags.mode);
  }
  const bool mock = !flags.mock_path.empty();
  Gateway gateway(make_provider(cfg, flags.mock_path),
                  gateway_options(cfg, run, mock));
  Pipeline pipeline(run, gateway, cfg, mock);

  if (stage == "answer") {
    const AnswerStats stats = pipeline.collect_answers();
    std::cout << "answers: " << stats.total << " total, " << stats.issued
              << " new, " << stats.resumed << " resumed, " << stats.failed
              << " transport failures\n";
  } else if (stage == "judge") {
    const JudgeStats stats = cfg.judging_mode == JudgingMode::da
                                 ? pipeline.judge_da()
                                 : pipeline.judge_pwc();
    std::cout << "judgments: " << stats.total << " total, " << stats.issued
              << " new, " << stats.resumed << " resumed";
    if (stats.skipped > 0) std::cout << ", " << stats.skipped << " skipped";
    std::cout << "\n";
    std::cout << "judge failures (" << stats.generator_model << " / "
              << stats.judge_model << "): " << stats.invalid << "/"
              << stats.total << " = "
              << format_double(100.0 * stats.failure_rate(), 2) << "%\n";
  } else if (stage == "safety") {
    const SafetyStats stats = pipeline.annotate_safety();
    std::cout << "safety annotations: " << stats.total << " ("
              << stats.unscored << " unscored)\n";
    const auto dist = stats.distribution();
    std::cout << "distribution 1..6:";
    for (double pct : dist) std::cout << " " << format_double(pct, 2) << "%";
    std::cout << "\n";
  } else if (stage == "verify") {
    const VerificationReport report = pipeline.verify_instances();
    std::cout << "verified " << report.instances << " instances\n";
    std::cout << "consistency with attributes: "
              << format_double(report.pct_consistent(), 1) << "%\n";
    std::cout << "perfect references: "
              << format_double(report.pct_perfect_references(), 1) << "%\n";
    std::cout << "score-5 references: "
              << format_double(report.pct_score5_references(), 1) << "%\n";
  }
  return 0;
}

int cmd_rank(const StageFlags& flags) {
  RunDir run = RunDir::open(flags.run_path);
  RunConfig cfg = run.config();
  JudgingMode mode = cfg.judging_mode;
  if (!flags.mode.empty()) mode = judging_mode_from_string(flags.mode);

  const Leaderboard board = compute_leaderboard(run, cfg, mode);
  write_leaderboard_files(run, "leaderboard", board);
  if (mode == JudgingMode::pwc_baseline) {
    // The same battles also admit a Bradley-Terry/Elo reading.
    const Leaderboard elo = elo_leaderboard(load_judgments(run));
    write_leaderboard_files(run, "elo", elo);
  }
  std::cout << leaderboard_markdown(board);
  return 0;
}

int cmd_metaeval(const StageFlags& flags) {
  RunDir run = RunDir::open(flags.run_path);
  RunConfig cfg = run.config();
  JudgingMode mode = cfg.judging_mode;
  if (!flags.mode.empty()) mode = judging_mode_from_string(flags.mode);
  const TiePolicy policy = tie_policy_from_string(flags.tie_policy);

  const GoldRanking gold = GoldRanking::load(flags.gold_path);
  const Leaderboard board = compute_leaderboard(run, cfg, mode);
  const MetaEvalReport report = meta_evaluate(board.scores(), gold, policy);

  write_text_file_atomic(run.file("metaeval.md").string(),
                         metaeval_markdown(report, gold.source));
  write_text_file_atomic(run.file("metaeval.csv").string(),
                         metaeval_csv(report));
  std::cout << "PA " << format_double(report.pa, 4) << ", tau "
            << format_double(report.tau, 4) << ", rho "
            << format_double(report.rho, 4) << " over " << report.pairs
            << " pairs (" << to_string(report.policy) << " ties)\n";

  if (!flags.subsample.empty()) {
    const auto grid = parse_grid(flags.subsample);
    const auto curve = subsample_pa_curve(
        load_judgments(run), gold, grid,
        flags.subsample_policy == "random" ? SubsamplePolicy::seeded_random
                                           : SubsamplePolicy::prefix,
        flags.seed.value_or(cfg.seed), policy);
    write_text_file_atomic(run.file("subsample.csv").string(),
                           subsample_csv(curve));
    for (const auto& [m, pa] : curve) {
      std::cout << "subsample m=" << m << " PA " << format_double(pa, 4)
                << "\n";
    }
  }

  if (!flags.tables_path.empty()) {
    const ScoreTable table = ScoreTable::load_csv(flags.tables_path);
    const auto borda = borda_aggregate(table);
    const auto average = average_aggregate(table);
    const auto [top_bench, top_pa] = top1_oracle(table, gold, policy);

    std::ostringstream md;
    md << aggregate_markdown("borda", borda) << "\n"
       << aggregate_markdown("average", average) << "\n"
       << "Top-1 benchmark: " << top_bench << " (PA "
       << format_double(top_pa, 4) << ")\n";
    write_text_file_atomic(run.file("aggregates.md").string(), md.str());
    std::ostringstream csv;
    csv << aggregate_csv("borda", borda) << aggregate_csv("average", average);
    write_text_file_atomic(run.file("aggregates.csv").string(), csv.str());

    const auto borda_pa =
        pairwise_accuracy(
            [&] {
              std::map<std::string, double> s;
              // Borda: smaller mean rank is better; negate for PA.
              for (const auto& e : borda) s[e.system] = -e.score;
              return s;
            }(),
            gold.scores, policy)
            .pa;
    const auto average_pa =
        pairwise_accuracy(
            [&] {
              std::map<std::string, double> s;
              for (const auto& e : average) s[e.system] = e.score;
              return s;
            }(),
            gold.scores, policy)
            .pa;
    std::cout << "aggregations: borda PA " << format_double(borda_pa, 4)
              << ", average PA " << format_double(average_pa, 4) << ", top-1 "
              << top_bench << " PA " << format_double(top_pa, 4) << "\n";
  }
  return 0;
}

int cmd_validate(const StageFlags& flags) {
  RunDir run = RunDir::open(flags.run_path);
  const ValidationReport report = validate_run(run);
  if (report.ok()) {
    std::cout << "run directory is consistent\n";
    return 0;
  }
  for (const auto& issue : report.issues) {
    std::cerr << issue.file << ": " << issue.message << "\n";
  }
  return 4;
}

int cmd_report(const StageFlags& flags) {
  RunDir run = RunDir::open(flags.run_path);
  const std::string md = run_report_markdown(run);
  write_text_file_atomic(run.file("report.md").string(), md);
  std::cout << md;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic benchmark builder and evaluator"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  StageFlags flags;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config) {
      cmd->add_option("--config", flags.config_path, "run config JSON")
          ->required();
    }
    cmd->add_option("--run", flags.run_path, "run directory")->required();
    cmd->add_option("--mock", flags.mock_path, "mock provider script");
    cmd->add_option("--seed", flags.seed, "seed override");
  };

  auto* generate = app.add_subcommand("generate", "create benchmark instances");
  add_common(generate, true);
  generate->add_option("--n", flags.n, "instance count override");

  auto* answer = app.add_subcommand("answer", "collect system answers");
  add_common(answer, false);

  auto* judge = app.add_subcommand("judge", "judge collected answers");
  add_common(judge, false);
  judge->add_option("--mode", flags.mode, "da | pwc-baseline | pwc-all");

  auto* safety = app.add_subcommand("safety", "annotate instance safety");
  add_common(safety, false);

  auto* verify = app.add_subcommand("verify", "verify instance quality");
  add_common(verify, false);

  auto* rank = app.add_subcommand("rank", "compute leaderboards");
  rank->add_option("--run", flags.run_path, "run directory")->required();
  rank->add_option("--mode", flags.mode, "da | pwc-baseline | pwc-all");

  auto* metaeval = app.add_subcommand("metaeval",
                                      "score the leaderboard against gold");
  metaeval->add_option("--run", flags.run_path, "run directory")->required();
  metaeval->add_option("--gold", flags.gold_path, "gold ranking CSV")
      ->required();
  metaeval->add_option("--mode", flags.mode, "da | pwc-baseline | pwc-all");
  metaeval->add_option("--tie-policy", flags.tie_policy, "strict | ignore");
  metaeval->add_option("--subsample", flags.subsample,
                       "comma grid of subsample sizes");
  metaeval->add_option("--subsample-policy", flags.subsample_policy,
                       "prefix | random");
  metaeval->add_option("--seed", flags.seed, "seed for random subsampling");
  metaeval->add_option("--tables", flags.tables_path,
                       "per-benchmark score table CSV for aggregation baselines");

  auto* validate = app.add_subcommand("validate", "check run integrity");
  validate->add_option("--run", flags.run_path, "run directory")->required();

  auto* report = app.add_subcommand("report", "emit the run report");
  report->add_option("--run", flags.run_path, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (generate->parsed()) return cmd_generate(flags);
    if (answer->parsed()) return cmd_stage(flags, "answer");
    if (judge->parsed()) return cmd_stage(flags, "judge");
    if (safety->parsed()) return cmd_stage(flags, "safety");
    if (verify->parsed()) return cmd_stage(flags, "verify");
    if (rank->parsed()) return cmd_rank(flags);
    if (metaeval->parsed()) return cmd_metaeval(flags);
    if (validate->parsed()) return cmd_validate(flags);
    if (report->parsed()) return cmd_report(flags);
  } catch (const SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IntegrityError& e) {
    std::cerr << "data integrity error: " << e.what() << "\n";
    return 4;
  } catch (const RunError& e) {
    std::cerr << "run failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
