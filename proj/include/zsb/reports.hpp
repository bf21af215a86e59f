#pragma once

#include <string>
#include <vector>

#include "zsb/metaeval.hpp"
#include "zsb/pipeline.hpp"
#include "zsb/scoring.hpp"

namespace zsb {

// Leaderboard emission: rank, system, score, n, failure-rate columns.
std::string leaderboard_markdown(const Leaderboard& board);
std::string leaderboard_csv(const Leaderboard& board);

std::string metaeval_markdown(const MetaEvalReport& report,
                              const std::string& gold_source);
std::string metaeval_csv(const MetaEvalReport& report);

std::string subsample_csv(
    const std::vector<std::pair<std::int64_t, double>>& curve);

std::string aggregate_markdown(const std::string& method,
                               const std::vector<AggregateEntry>& entries);
std::string aggregate_csv(const std::string& method,
                          const std::vector<AggregateEntry>& entries);

// Whole-run summary: stage counts, judge failure rates, safety distribution,
// verification statistics.
std::string run_report_markdown(const RunDir& run);

}  // namespace zsb
