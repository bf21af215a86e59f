#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "zsb/records.hpp"

namespace zsb {

// Externally trusted system ordering, loaded from a small CSV
// (`system,score` with higher better, or `system,rank` with 1 best).
struct GoldRanking {
  std::map<std::string, double> scores;  // always higher-is-better
  std::string source;

  static GoldRanking load(const std::filesystem::path& path);
};

enum class TiePolicy {
  strict,       // a pair agrees iff the score-difference signs match; ties
                // match only ties
  ignore_ties,  // pairs tied on either side leave both numerator and
                // denominator
};

std::string to_string(TiePolicy p);
TiePolicy tie_policy_from_string(const std::string& s);

struct PaResult {
  double pa = 0.0;
  std::int64_t pairs = 0;       // denominator under the policy
  std::int64_t agreements = 0;
  std::vector<std::pair<std::string, std::string>> disagreements;
};

// Fraction of system pairs ordered the same way by both sides. Requires the
// same system set on both maps; the error lists the symmetric difference.
PaResult pairwise_accuracy(const std::map<std::string, double>& candidate,
                           const std::map<std::string, double>& gold,
                           TiePolicy policy = TiePolicy::strict);

// tau_a = (concordant - discordant) / C(n,2); equals 2*PA - 1 on tie-free data.
double kendall_tau(const std::map<std::string, double>& candidate,
                   const std::map<std::string, double>& gold);

// Tie-corrected variant, offered as an option.
double kendall_tau_b(const std::map<std::string, double>& candidate,
                     const std::map<std::string, double>& gold);

// Pearson correlation of rank vectors, average ranks on ties.
double spearman_rho(const std::map<std::string, double>& candidate,
                    const std::map<std::string, double>& gold);

struct MetaEvalReport {
  double pa = 0.0;
  double tau = 0.0;
  double rho = 0.0;
  std::int64_t pairs = 0;
  TiePolicy policy = TiePolicy::strict;
  std::vector<std::pair<std::string, std::string>> disagreements;

  nlohmann::json to_json() const;
};

MetaEvalReport meta_evaluate(const std::map<std::string, double>& candidate,
                             const GoldRanking& gold,
                             TiePolicy policy = TiePolicy::strict);

// Per-benchmark score tables: one column per benchmark, one row per system;
// every benchmark must cover the same system set.
struct ScoreTable {
  std::vector<std::string> benchmarks;
  std::map<std::string, std::vector<double>> rows;  // system -> per-benchmark

  static ScoreTable load_csv(const std::filesystem::path& path);
  std::map<std::string, double> column(const std::string& benchmark) const;
};

struct AggregateEntry {
  std::string system;
  double score = 0.0;  // mean rank (Borda, ascending) or mean score (Average)
  double rank = 0.0;
};

// Mean of per-benchmark ranks (average ranks on ties), best = smallest.
std::vector<AggregateEntry> borda_aggregate(const ScoreTable& table);

// Mean of raw scores, best = largest. Assumes commensurable scales.
std::vector<AggregateEntry> average_aggregate(const ScoreTable& table);

// The benchmark whose own ranking maximizes PA against gold; ties broken by
// lexically smallest benchmark id.
std::pair<std::string, double> top1_oracle(const ScoreTable& table,
                                           const GoldRanking& gold,
                                           TiePolicy policy = TiePolicy::strict);

enum class SubsamplePolicy { prefix, seeded_random };

// PA of the mean-score leaderboard recomputed on m instances, per grid point.
std::vector<std::pair<std::int64_t, double>> subsample_pa_curve(
    const std::vector<Judgment>& judgments, const GoldRanking& gold,
    const std::vector<std::int64_t>& sizes,
    SubsamplePolicy policy = SubsamplePolicy::prefix, std::uint64_t seed = 0,
    TiePolicy tie_policy = TiePolicy::strict);

}  // namespace zsb
