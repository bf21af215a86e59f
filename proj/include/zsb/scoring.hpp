#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "zsb/records.hpp"

namespace zsb {

struct LeaderboardEntry {
  std::string system;
  double score = 0.0;
  double rank = 0.0;  // 1..k, average rank on exact score ties
  std::int64_t n = 0;  // valid judgments / battles behind the score
  double failure_rate = 0.0;  // invalid / total for this system
};

struct Leaderboard {
  std::string mode;  // "da-mean" | "pwc-winrate" | "pwc-elo"
  std::vector<LeaderboardEntry> entries;  // sorted by score descending
  std::vector<std::string> excluded;      // systems with zero valid judgments
  std::string judge_model;
  std::int64_t instance_count = 0;

  std::map<std::string, double> scores() const;
  nlohmann::json to_json() const;
};

// Assigns ranks (average on ties) and sorts descending by score. Exposed for
// aggregate rankings that reuse the tie policy.
void rank_entries(std::vector<LeaderboardEntry>& entries);

// DA leaderboard: arithmetic mean of valid scores per system; invalid
// judgments excluded from means but counted in the failure rate.
Leaderboard mean_score_leaderboard(const std::vector<Judgment>& judgments);

struct Battle {
  std::string a;
  std::string b;
  BattleOutcome outcome = BattleOutcome::tie;  // relative to (a, b)
  int instance_id = 0;
  std::string order;  // which presentation produced this record
};

// Valid pairwise judgments as battles; invalid ones only feed failure rates.
std::vector<Battle> battles_from_judgments(const std::vector<Judgment>& judgments);

// Win rate against a designated baseline; every battle must involve it.
Leaderboard win_rate_vs_baseline(const std::vector<Judgment>& judgments,
                                 const std::string& baseline);

struct BtOptions {
  double l2 = 0.01;  // keeps ratings finite under total separation
  double tolerance = 1e-8;
  int max_iterations = 500;
};

struct RatingVector {
  std::vector<std::string> systems;
  std::vector<double> strength;  // xi, centered to mean 0
  std::vector<double> elo;       // 400*xi/ln(10) + anchor
  double anchor = 1000.0;
};

// Maximizes sum of log-sigmoid battle likelihoods (ties count half a win for
// each side) minus (l2/2)*||xi||^2, by damped Newton iteration. Requires a
// connected battle graph.
RatingVector fit_bradley_terry(const std::vector<Battle>& battles,
                               const BtOptions& options = {});

// Affine presentation scaling; ordering always matches strength ordering.
void to_elo(RatingVector& ratings, double anchor = 1000.0);

Leaderboard elo_leaderboard(const std::vector<Judgment>& judgments,
                            const BtOptions& options = {},
                            double anchor = 1000.0);

}  // namespace zsb
