#include "zsb/metaeval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "zsb/errors.hpp"
#include "zsb/rng.hpp"
#include "zsb/scoring.hpp"
#include "zsb/util.hpp"

namespace zsb {
namespace {

int sign(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

void require_same_systems(const std::map<std::string, double>& a,
                          const std::map<std::string, double>& b) {
  std::vector<std::string> only_a, only_b;
  for (const auto& [k, v] : a) {
    if (b.find(k) == b.end()) only_a.push_back(k);
  }
  for (const auto& [k, v] : b) {
    if (a.find(k) == a.end()) only_b.push_back(k);
  }
  if (!only_a.empty() || !only_b.empty()) {
    std::string msg = "system sets differ;";
    if (!only_a.empty()) {
      msg += " only in candidate:";
      for (const auto& s : only_a) msg += " " + s;
      msg += ";";
    }
    if (!only_b.empty()) {
      msg += " only in gold:";
      for (const auto& s : only_b) msg += " " + s;
    }
    throw IntegrityError(msg);
  }
  if (a.size() < 2) {
    throw IntegrityError("need at least 2 systems, got " +
                         std::to_string(a.size()));
  }
}

// Average ranks, 1 = best (highest score).
std::map<std::string, double> rank_map(const std::map<std::string, double>& scores) {
  std::vector<std::pair<std::string, double>> ordered(scores.begin(),
                                                      scores.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  std::map<std::string, double> ranks;
  std::size_t i = 0;
  while (i < ordered.size()) {
    std::size_t j = i;
    while (j + 1 < ordered.size() && ordered[j + 1].second == ordered[i].second) {
      ++j;
    }
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[ordered[k].first] = avg;
    i = j + 1;
  }
  return ranks;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

GoldRanking GoldRanking::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("gold ranking: cannot open " + path.string());
  GoldRanking gold;
  gold.source = path.filename().string();
  std::string line;
  bool header_seen = false;
  bool is_rank = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 2) {
      throw SchemaError("gold ranking: expected 2 columns in \"" + line + "\"");
    }
    if (!header_seen) {
      header_seen = true;
      if (cells[0] == "system") {
        if (cells[1] == "rank") {
          is_rank = true;
          continue;
        }
        if (cells[1] == "score") continue;
        throw SchemaError(
            "gold ranking: header must be system,score or system,rank");
      }
      // No header: fall through and treat the first line as data (scores).
    }
    try {
      const double v = std::stod(cells[1]);
      // Ranks invert to higher-is-better scores.
      gold.scores[cells[0]] = is_rank ? -v : v;
    } catch (const std::exception&) {
      throw SchemaError("gold ranking: bad numeric value in \"" + line + "\"");
    }
  }
  if (gold.scores.size() < 2) {
    throw SchemaError("gold ranking: need at least 2 systems");
  }
  return gold;
}

std::string to_string(TiePolicy p) {
  return p == TiePolicy::strict ? "strict" : "ignore";
}

TiePolicy tie_policy_from_string(const std::string& s) {
  if (s == "strict") return TiePolicy::strict;
  if (s == "ignore") return TiePolicy::ignore_ties;
  throw SchemaError("tie policy must be strict or ignore; got \"" + s + "\"");
}

PaResult pairwise_accuracy(const std::map<std::string, double>& candidate,
                           const std::map<std::string, double>& gold,
                           TiePolicy policy) {
  require_same_systems(candidate, gold);
  std::vector<std::string> systems;
  for (const auto& [k, v] : candidate) systems.push_back(k);

  PaResult out;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    for (std::size_t j = i + 1; j < systems.size(); ++j) {
      const int sc = sign(candidate.at(systems[i]) - candidate.at(systems[j]));
      const int sg = sign(gold.at(systems[i]) - gold.at(systems[j]));
      if (policy == TiePolicy::ignore_ties && (sc == 0 || sg == 0)) continue;
      out.pairs += 1;
      if (sc == sg) {
        out.agreements += 1;
      } else {
        out.disagreements.emplace_back(systems[i], systems[j]);
      }
    }
  }
  out.pa = out.pairs == 0
               ? 0.0
               : static_cast<double>(out.agreements) /
                     static_cast<double>(out.pairs);
  return out;
}

double kendall_tau(const std::map<std::string, double>& candidate,
                   const std::map<std::string, double>& gold) {
  require_same_systems(candidate, gold);
  std::vector<std::string> systems;
  for (const auto& [k, v] : candidate) systems.push_back(k);
  std::int64_t concordant = 0, discordant = 0, total = 0;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    for (std::size_t j = i + 1; j < systems.size(); ++j) {
      const int sc = sign(candidate.at(systems[i]) - candidate.at(systems[j]));
      const int sg = sign(gold.at(systems[i]) - gold.at(systems[j]));
      total += 1;
      if (sc * sg > 0) concordant += 1;
      if (sc * sg < 0) discordant += 1;
    }
  }
  return static_cast<double>(concordant - discordant) /
         static_cast<double>(total);
}

double kendall_tau_b(const std::map<std::string, double>& candidate,
                     const std::map<std::string, double>& gold) {
  require_same_systems(candidate, gold);
  std::vector<std::string> systems;
  for (const auto& [k, v] : candidate) systems.push_back(k);
  std::int64_t concordant = 0, discordant = 0;
  std::int64_t ties_c = 0, ties_g = 0, total = 0;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    for (std::size_t j = i + 1; j < systems.size(); ++j) {
      const int sc = sign(candidate.at(systems[i]) - candidate.at(systems[j]));
      const int sg = sign(gold.at(systems[i]) - gold.at(systems[j]));
      total += 1;
      if (sc == 0) ties_c += 1;
      if (sg == 0) ties_g += 1;
      if (sc * sg > 0) concordant += 1;
      if (sc * sg < 0) discordant += 1;
    }
  }
  const double denom =
      std::sqrt(static_cast<double>(total - ties_c)) *
      std::sqrt(static_cast<double>(total - ties_g));
  if (denom == 0.0) {
    throw NumericalError("tau_b undefined: all pairs tied on one side");
  }
  return static_cast<double>(concordant - discordant) / denom;
}

double spearman_rho(const std::map<std::string, double>& candidate,
                    const std::map<std::string, double>& gold) {
  require_same_systems(candidate, gold);
  const auto rc = rank_map(candidate);
  const auto rg = rank_map(gold);
  const double n = static_cast<double>(rc.size());
  double mc = 0.0, mg = 0.0;
  for (const auto& [k, v] : rc) {
    mc += v;
    mg += rg.at(k);
  }
  mc /= n;
  mg /= n;
  double cov = 0.0, vc = 0.0, vg = 0.0;
  for (const auto& [k, v] : rc) {
    const double dc = v - mc;
    const double dg = rg.at(k) - mg;
    cov += dc * dg;
    vc += dc * dc;
    vg += dg * dg;
  }
  if (vc == 0.0 || vg == 0.0) {
    throw NumericalError("spearman undefined: zero rank variance");
  }
  return cov / std::sqrt(vc * vg);
}

nlohmann::json MetaEvalReport::to_json() const {
  nlohmann::json j;
  j["pa"] = pa;
  j["kendall_tau"] = tau;
  j["spearman_rho"] = rho;
  j["pairs"] = pairs;
  j["tie_policy"] = to_string(policy);
  nlohmann::json dis = nlohmann::json::array();
  for (const auto& [a, b] : disagreements) dis.push_back({a, b});
  j["disagreements"] = std::move(dis);
  return j;
}

MetaEvalReport meta_evaluate(const std::map<std::string, double>& candidate,
                             const GoldRanking& gold, TiePolicy policy) {
  MetaEvalReport report;
  const PaResult pa = pairwise_accuracy(candidate, gold.scores, policy);
  report.pa = pa.pa;
  report.pairs = pa.pairs;
  report.policy = policy;
  report.disagreements = pa.disagreements;
  report.tau = kendall_tau(candidate, gold.scores);
  report.rho = spearman_rho(candidate, gold.scores);
  return report;
}

ScoreTable ScoreTable::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("score table: cannot open " + path.string());
  ScoreTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaError("score table: empty file " + path.string());
  }
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "system") {
    throw SchemaError(
        "score table: header must be system,<benchmark>[,<benchmark>...]");
  }
  table.benchmarks.assign(header.begin() + 1, header.end());
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw SchemaError("score table: row width mismatch in \"" + line + "\"");
    }
    std::vector<double> values;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      try {
        values.push_back(std::stod(cells[i]));
      } catch (const std::exception&) {
        throw SchemaError("score table: bad numeric value in \"" + line + "\"");
      }
    }
    if (!table.rows.emplace(cells[0], std::move(values)).second) {
      throw SchemaError("score table: duplicate system \"" + cells[0] + "\"");
    }
  }
  if (table.rows.size() < 2) {
    throw SchemaError("score table: need at least 2 systems");
  }
  return table;
}

std::map<std::string, double> ScoreTable::column(const std::string& benchmark) const {
  const auto it = std::find(benchmarks.begin(), benchmarks.end(), benchmark);
  if (it == benchmarks.end()) {
    throw SchemaError("score table: unknown benchmark \"" + benchmark + "\"");
  }
  const std::size_t idx = static_cast<std::size_t>(it - benchmarks.begin());
  std::map<std::string, double> out;
  for (const auto& [system, values] : rows) out[system] = values[idx];
  return out;
}

namespace {

std::vector<AggregateEntry> finish_aggregate(
    std::map<std::string, double> scores, bool ascending) {
  std::vector<AggregateEntry> out;
  for (const auto& [system, score] : scores) {
    out.push_back(AggregateEntry{system, score, 0.0});
  }
  std::sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
    if (x.score != y.score) return ascending ? x.score < y.score : x.score > y.score;
    return x.system < y.system;
  });
  std::size_t i = 0;
  while (i < out.size()) {
    std::size_t j = i;
    while (j + 1 < out.size() && out[j + 1].score == out[i].score) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) out[k].rank = avg;
    i = j + 1;
  }
  return out;
}

}  // namespace

std::vector<AggregateEntry> borda_aggregate(const ScoreTable& table) {
  std::map<std::string, double> mean_rank;
  for (const auto& bench : table.benchmarks) {
    const auto ranks = rank_map(table.column(bench));
    for (const auto& [system, r] : ranks) mean_rank[system] += r;
  }
  for (auto& [system, r] : mean_rank) {
    r /= static_cast<double>(table.benchmarks.size());
  }
  return finish_aggregate(std::move(mean_rank), /*ascending=*/true);
}

std::vector<AggregateEntry> average_aggregate(const ScoreTable& table) {
  std::map<std::string, double> mean_score;
  for (const auto& [system, values] : table.rows) {
    double sum = 0.0;
    for (double v : values) sum += v;
    mean_score[system] = sum / static_cast<double>(values.size());
  }
  return finish_aggregate(std::move(mean_score), /*ascending=*/false);
}

std::pair<std::string, double> top1_oracle(const ScoreTable& table,
                                           const GoldRanking& gold,
                                           TiePolicy policy) {
  std::string best;
  double best_pa = -1.0;
  // benchmarks scanned in declaration order; lexical tie-break
  std::vector<std::string> names = table.benchmarks;
  std::sort(names.begin(), names.end());
  for (const auto& bench : names) {
    const double pa = pairwise_accuracy(table.column(bench), gold.scores, policy).pa;
    if (pa > best_pa) {
      best_pa = pa;
      best = bench;
    }
  }
  return {best, best_pa};
}

std::vector<std::pair<std::int64_t, double>> subsample_pa_curve(
    const std::vector<Judgment>& judgments, const GoldRanking& gold,
    const std::vector<std::int64_t>& sizes, SubsamplePolicy policy,
    std::uint64_t seed, TiePolicy tie_policy) {
  std::set<int> instance_set;
  for (const auto& j : judgments) {
    if (j.mode == JudgmentMode::da) instance_set.insert(j.instance_id);
  }
  std::vector<int> instances(instance_set.begin(), instance_set.end());
  if (policy == SubsamplePolicy::seeded_random) {
    SplitRng rng(seed);
    for (std::size_t i = instances.size(); i > 1; --i) {
      std::swap(instances[i - 1], instances[rng.below(i)]);
    }
  }

  std::vector<std::pair<std::int64_t, double>> curve;
  for (const std::int64_t m : sizes) {
    if (m < 1 || m > static_cast<std::int64_t>(instances.size())) {
      throw SchemaError("subsample size " + std::to_string(m) +
                        " outside 1.." + std::to_string(instances.size()));
    }
    std::set<int> selected(instances.begin(), instances.begin() + m);
    std::vector<Judgment> subset;
    for (const auto& j : judgments) {
      if (j.mode == JudgmentMode::da && selected.count(j.instance_id)) {
        subset.push_back(j);
      }
    }
    const Leaderboard board = mean_score_leaderboard(subset);
    const double pa =
        pairwise_accuracy(board.scores(), gold.scores, tie_policy).pa;
    curve.emplace_back(m, pa);
  }
  return curve;
}

}  // namespace zsb
