#include "zsb/reports.hpp"

#include <array>
#include <map>
#include <set>
#include <sstream>

#include "zsb/jsonl.hpp"
#include "zsb/util.hpp"

namespace zsb {
namespace {

std::string score_text(const Leaderboard& board, double score) {
  // Elo boards read better without fractional points.
  return board.mode == "pwc-elo" ? format_double(score, 1)
                                 : format_double(score, 4);
}

std::string rank_text(double rank) {
  if (rank == static_cast<std::int64_t>(rank)) {
    return std::to_string(static_cast<std::int64_t>(rank));
  }
  return format_double(rank, 1);
}

}  // namespace

std::string leaderboard_markdown(const Leaderboard& board) {
  std::ostringstream out;
  out << "# Leaderboard (" << board.mode << ")\n\n";
  if (!board.judge_model.empty()) {
    out << "Judge: " << board.judge_model << "  \n";
  }
  out << "Instances: " << board.instance_count << "\n\n";
  out << "| rank | system | score | n | failure rate |\n";
  out << "|-----:|--------|------:|--:|-------------:|\n";
  for (const auto& e : board.entries) {
    out << "| " << rank_text(e.rank) << " | " << e.system << " | "
        << score_text(board, e.score) << " | " << e.n << " | "
        << format_double(100.0 * e.failure_rate, 2) << "% |\n";
  }
  if (!board.excluded.empty()) {
    out << "\nExcluded (no valid judgments):";
    for (const auto& s : board.excluded) out << " " << s;
    out << "\n";
  }
  return out.str();
}

std::string leaderboard_csv(const Leaderboard& board) {
  std::ostringstream out;
  out << "rank,system,score,n,failure_rate\n";
  for (const auto& e : board.entries) {
    out << rank_text(e.rank) << "," << e.system << ","
        << score_text(board, e.score) << "," << e.n << ","
        << format_double(e.failure_rate, 4) << "\n";
  }
  return out.str();
}

std::string metaeval_markdown(const MetaEvalReport& report,
                              const std::string& gold_source) {
  std::ostringstream out;
  out << "# Meta-evaluation vs " << gold_source << "\n\n";
  out << "| metric | value |\n|--------|------:|\n";
  out << "| pairwise accuracy | " << format_double(report.pa, 4) << " |\n";
  out << "| kendall tau | " << format_double(report.tau, 4) << " |\n";
  out << "| spearman rho | " << format_double(report.rho, 4) << " |\n";
  out << "| pairs | " << report.pairs << " |\n";
  out << "| tie policy | " << to_string(report.policy) << " |\n";
  if (!report.disagreements.empty()) {
    out << "\nDisagreeing pairs:\n";
    for (const auto& [a, b] : report.disagreements) {
      out << "- " << a << " vs " << b << "\n";
    }
  }
  return out.str();
}

std::string metaeval_csv(const MetaEvalReport& report) {
  std::ostringstream out;
  out << "metric,value\n";
  out << "pairwise_accuracy," << format_double(report.pa, 6) << "\n";
  out << "kendall_tau," << format_double(report.tau, 6) << "\n";
  out << "spearman_rho," << format_double(report.rho, 6) << "\n";
  out << "pairs," << report.pairs << "\n";
  out << "tie_policy," << to_string(report.policy) << "\n";
  return out.str();
}

std::string subsample_csv(
    const std::vector<std::pair<std::int64_t, double>>& curve) {
  std::ostringstream out;
  out << "m,pairwise_accuracy\n";
  for (const auto& [m, pa] : curve) {
    out << m << "," << format_double(pa, 6) << "\n";
  }
  return out.str();
}

std::string aggregate_markdown(const std::string& method,
                               const std::vector<AggregateEntry>& entries) {
  std::ostringstream out;
  out << "# Aggregate ranking (" << method << ")\n\n";
  out << "| rank | system | score |\n|-----:|--------|------:|\n";
  for (const auto& e : entries) {
    out << "| " << rank_text(e.rank) << " | " << e.system << " | "
        << format_double(e.score, 4) << " |\n";
  }
  return out.str();
}

std::string aggregate_csv(const std::string& method,
                          const std::vector<AggregateEntry>& entries) {
  std::ostringstream out;
  out << "method,rank,system,score\n";
  for (const auto& e : entries) {
    out << method << "," << rank_text(e.rank) << "," << e.system << ","
        << format_double(e.score, 4) << "\n";
  }
  return out.str();
}

std::string run_report_markdown(const RunDir& run) {
  std::ostringstream out;
  const RunConfig cfg = run.config();
  out << "# Run report\n\n";
  out << "Task: " << to_string(cfg.task) << " (" << cfg.language << ")  \n";
  out << "Generator: " << cfg.generator_model << "  \n";
  out << "Judge: " << cfg.judge_model << "\n\n";

  const auto instances = read_jsonl(run.file("instances.jsonl"));
  const auto failures = read_jsonl(run.file("generation_failures.jsonl"));
  const auto answers = read_jsonl(run.file("answers.jsonl"));
  out << "| stage | records |\n|-------|--------:|\n";
  out << "| instances | " << instances.size() << " |\n";
  out << "| generation failures | " << failures.size() << " |\n";
  out << "| answers | " << answers.size() << " |\n";

  const auto judgments = read_jsonl(run.file("judgments.jsonl"));
  std::int64_t da_total = 0, da_invalid = 0, pwc_total = 0, pwc_invalid = 0;
  for (const auto& j : judgments) {
    const bool valid = j.at("valid").get<bool>();
    if (j.at("mode").get<std::string>() == "da") {
      ++da_total;
      if (!valid) ++da_invalid;
    } else {
      ++pwc_total;
      if (!valid) ++pwc_invalid;
    }
  }
  out << "| judgments (da) | " << da_total << " |\n";
  out << "| judgments (pwc) | " << pwc_total << " |\n\n";

  if (da_total > 0 || pwc_total > 0) {
    out << "## Judge failures\n\n";
    out << "| generator | judge | mode | invalid | total | rate |\n";
    out << "|-----------|-------|------|--------:|------:|-----:|\n";
    if (da_total > 0) {
      out << "| " << cfg.generator_model << " | " << cfg.judge_model
          << " | da | " << da_invalid << " | " << da_total << " | "
          << format_double(100.0 * da_invalid / da_total, 2) << "% |\n";
    }
    if (pwc_total > 0) {
      out << "| " << cfg.generator_model << " | " << cfg.judge_model
          << " | pwc | " << pwc_invalid << " | " << pwc_total << " | "
          << format_double(100.0 * pwc_invalid / pwc_total, 2) << "% |\n";
    }
    out << "\n";
  }

  const auto safety = read_jsonl(run.file("safety.jsonl"));
  if (!safety.empty()) {
    std::array<std::int64_t, 6> counts{};
    std::int64_t unscored = 0;
    for (const auto& s : safety) {
      if (s.at("score").is_null()) {
        ++unscored;
      } else {
        counts[static_cast<std::size_t>(s.at("score").get<int>() - 1)] += 1;
      }
    }
    const std::int64_t scored = static_cast<std::int64_t>(safety.size()) - unscored;
    out << "## Safety score distribution\n\n";
    out << "| 1 | 2 | 3 | 4 | 5 | 6 | unscored |\n";
    out << "|--:|--:|--:|--:|--:|--:|---------:|\n| ";
    for (int i = 0; i < 6; ++i) {
      const double pct = scored == 0 ? 0.0 : 100.0 * counts[i] / scored;
      out << format_double(pct, 2) << "% | ";
    }
    out << unscored << " |\n\n";
  }

  const auto verification = read_jsonl(run.file("verification.jsonl"));
  if (!verification.empty()) {
    std::int64_t checked = 0, consistent = 0, refs = 0, ref6 = 0, ref5 = 0;
    for (const auto& v : verification) {
      if (!v.at("consistent").is_null()) {
        ++checked;
        if (v.at("consistent").get<bool>()) ++consistent;
      }
      if (!v.at("reference_score").is_null()) {
        ++refs;
        const int s = v.at("reference_score").get<int>();
        if (s == 6) ++ref6;
        if (s == 5) ++ref5;
      }
    }
    out << "## Verification\n\n";
    out << "| statistic | value |\n|-----------|------:|\n";
    if (checked > 0) {
      out << "| consistency with attributes | "
          << format_double(100.0 * consistent / checked, 1) << "% |\n";
    }
    if (refs > 0) {
      out << "| perfect references (score 6) | "
          << format_double(100.0 * ref6 / refs, 1) << "% |\n";
      out << "| score-5 references | " << format_double(100.0 * ref5 / refs, 1)
          << "% |\n";
    }
  }
  return out.str();
}

}  // namespace zsb
