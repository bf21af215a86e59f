#include "zsb/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "zsb/errors.hpp"

namespace zsb {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Dense symmetric solve via Gaussian elimination with partial pivoting.
// Systems counts are tiny (tens), so no library is warranted.
std::vector<double> solve_linear(std::vector<std::vector<double>> m,
                                 std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (std::abs(m[pivot][col]) < 1e-300) {
      throw NumericalError("rating fit: singular system");
    }
    std::swap(m[col], m[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double acc = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) acc -= m[ri][c] * x[c];
    x[ri] = acc / m[ri][ri];
  }
  return x;
}

struct WinMatrix {
  std::vector<std::string> systems;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<double>> wins;  // wins[i][j] = wins of i over j (+ half-ties)

  explicit WinMatrix(const std::vector<Battle>& battles) {
    std::set<std::string> names;
    for (const auto& bt : battles) {
      names.insert(bt.a);
      names.insert(bt.b);
    }
    systems.assign(names.begin(), names.end());
    for (std::size_t i = 0; i < systems.size(); ++i) index[systems[i]] = i;
    wins.assign(systems.size(), std::vector<double>(systems.size(), 0.0));
    for (const auto& bt : battles) {
      const std::size_t i = index.at(bt.a);
      const std::size_t j = index.at(bt.b);
      switch (bt.outcome) {
        case BattleOutcome::a: wins[i][j] += 1.0; break;
        case BattleOutcome::b: wins[j][i] += 1.0; break;
        case BattleOutcome::tie:
          wins[i][j] += 0.5;
          wins[j][i] += 0.5;
          break;
      }
    }
  }
};

void check_connected(const WinMatrix& wm) {
  const std::size_t n = wm.systems.size();
  if (n == 0) throw NumericalError("rating fit: no battles");
  std::vector<int> component(n, -1);
  int comp_count = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (component[start] != -1) continue;
    std::vector<std::size_t> stack{start};
    component[start] = comp_count;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (component[v] == -1 &&
            (wm.wins[u][v] > 0.0 || wm.wins[v][u] > 0.0)) {
          component[v] = comp_count;
          stack.push_back(v);
        }
      }
    }
    ++comp_count;
  }
  if (comp_count > 1) {
    std::string msg = "rating fit: battle graph disconnected; components:";
    for (int c = 0; c < comp_count; ++c) {
      msg += " {";
      bool first = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (component[i] == c) {
          if (!first) msg += ", ";
          msg += wm.systems[i];
          first = false;
        }
      }
      msg += "}";
    }
    throw NumericalError(msg);
  }
}

}  // namespace

std::map<std::string, double> Leaderboard::scores() const {
  std::map<std::string, double> out;
  for (const auto& e : entries) out[e.system] = e.score;
  return out;
}

nlohmann::json Leaderboard::to_json() const {
  nlohmann::json j;
  j["mode"] = mode;
  j["judge_model"] = judge_model;
  j["instance_count"] = instance_count;
  j["excluded"] = excluded;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : entries) {
    rows.push_back({{"rank", e.rank},
                    {"system", e.system},
                    {"score", e.score},
                    {"n", e.n},
                    {"failure_rate", e.failure_rate}});
  }
  j["entries"] = std::move(rows);
  return j;
}

void rank_entries(std::vector<LeaderboardEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.system < y.system;
  });
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    while (j + 1 < entries.size() && entries[j + 1].score == entries[i].score) {
      ++j;
    }
    const double avg_rank = (static_cast<double>(i + 1) +
                             static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) entries[k].rank = avg_rank;
    i = j + 1;
  }
}

Leaderboard mean_score_leaderboard(const std::vector<Judgment>& judgments) {
  struct Tally {
    double sum = 0.0;
    std::int64_t valid = 0;
    std::int64_t invalid = 0;
  };
  std::map<std::string, Tally> tallies;
  std::set<int> instances;
  std::string judge;
  for (const auto& j : judgments) {
    if (j.mode != JudgmentMode::da) continue;
    auto& t = tallies[j.system_id];
    if (j.valid && j.score) {
      t.sum += *j.score;
      t.valid += 1;
    } else {
      t.invalid += 1;
    }
    instances.insert(j.instance_id);
    if (judge.empty()) judge = j.judge_model;
  }

  Leaderboard board;
  board.mode = "da-mean";
  board.judge_model = judge;
  board.instance_count = static_cast<std::int64_t>(instances.size());
  for (const auto& [system, t] : tallies) {
    if (t.valid == 0) {
      board.excluded.push_back(system);
      continue;
    }
    LeaderboardEntry e;
    e.system = system;
    e.score = t.sum / static_cast<double>(t.valid);
    e.n = t.valid;
    e.failure_rate =
        static_cast<double>(t.invalid) / static_cast<double>(t.valid + t.invalid);
    board.entries.push_back(std::move(e));
  }
  rank_entries(board.entries);
  return board;
}

std::vector<Battle> battles_from_judgments(const std::vector<Judgment>& judgments) {
  std::vector<Battle> out;
  for (const auto& j : judgments) {
    if (j.mode != JudgmentMode::pwc || !j.valid || !j.outcome) continue;
    out.push_back(Battle{j.system_a, j.system_b, *j.outcome, j.instance_id,
                         j.order});
  }
  return out;
}

Leaderboard win_rate_vs_baseline(const std::vector<Judgment>& judgments,
                                 const std::string& baseline) {
  struct Tally {
    double points = 0.0;
    std::int64_t games = 0;
    std::int64_t invalid = 0;
  };
  std::map<std::string, Tally> tallies;
  std::set<int> instances;
  std::string judge;

  for (const auto& j : judgments) {
    if (j.mode != JudgmentMode::pwc) continue;
    if (j.system_a != baseline && j.system_b != baseline) {
      throw IntegrityError("win-rate intake: battle " + j.system_a + " vs " +
                           j.system_b + " does not involve baseline " +
                           baseline);
    }
    const bool baseline_is_a = j.system_a == baseline;
    const std::string& opponent = baseline_is_a ? j.system_b : j.system_a;
    auto& t = tallies[opponent];
    if (!j.valid || !j.outcome) {
      t.invalid += 1;
      continue;
    }
    t.games += 1;
    if (*j.outcome == BattleOutcome::tie) {
      t.points += 0.5;
    } else if ((*j.outcome == BattleOutcome::a) != baseline_is_a) {
      t.points += 1.0;  // opponent won
    }
    instances.insert(j.instance_id);
    if (judge.empty()) judge = j.judge_model;
  }

  Leaderboard board;
  board.mode = "pwc-winrate";
  board.judge_model = judge;
  board.instance_count = static_cast<std::int64_t>(instances.size());
  for (const auto& [system, t] : tallies) {
    if (t.games == 0) {
      board.excluded.push_back(system);
      continue;
    }
    LeaderboardEntry e;
    e.system = system;
    e.score = t.points / static_cast<double>(t.games);
    e.n = t.games;
    e.failure_rate =
        static_cast<double>(t.invalid) / static_cast<double>(t.games + t.invalid);
    board.entries.push_back(std::move(e));
  }
  rank_entries(board.entries);
  return board;
}

RatingVector fit_bradley_terry(const std::vector<Battle>& battles,
                               const BtOptions& options) {
  WinMatrix wm(battles);
  check_connected(wm);
  const std::size_t n = wm.systems.size();

  std::vector<double> xi(n, 0.0);
  bool converged = false;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<double> grad(n, 0.0);
    std::vector<std::vector<double>> hess(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] = -options.l2 * xi[i];
      hess[i][i] = options.l2;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double total = wm.wins[i][j] + wm.wins[j][i];
        if (total == 0.0) continue;
        const double p = sigmoid(xi[i] - xi[j]);
        grad[i] += wm.wins[i][j] * (1.0 - p) - wm.wins[j][i] * p;
        const double w = total * p * (1.0 - p);
        hess[i][i] += w;
        hess[i][j] -= w;
      }
    }

    double grad_inf = 0.0;
    for (double g : grad) grad_inf = std::max(grad_inf, std::abs(g));
    if (grad_inf < options.tolerance) {
      converged = true;
      break;
    }

    // Newton step on the negated (convex) objective; damped so the first
    // iterations from a poor start cannot overshoot.
    std::vector<double> step = solve_linear(hess, grad);
    double step_inf = 0.0;
    for (double s : step) step_inf = std::max(step_inf, std::abs(s));
    const double damping = step_inf > 5.0 ? 5.0 / step_inf : 1.0;
    for (std::size_t i = 0; i < n; ++i) xi[i] += damping * step[i];
  }
  if (!converged) {
    throw NumericalError("rating fit: no convergence in " +
                         std::to_string(options.max_iterations) +
                         " iterations");
  }

  double mean = 0.0;
  for (double v : xi) mean += v;
  mean /= static_cast<double>(n);
  for (double& v : xi) v -= mean;

  RatingVector out;
  out.systems = wm.systems;
  out.strength = std::move(xi);
  to_elo(out, 1000.0);
  return out;
}

void to_elo(RatingVector& ratings, double anchor) {
  ratings.anchor = anchor;
  ratings.elo.resize(ratings.strength.size());
  const double scale = 400.0 / std::log(10.0);
  for (std::size_t i = 0; i < ratings.strength.size(); ++i) {
    ratings.elo[i] = scale * ratings.strength[i] + anchor;
  }
}

Leaderboard elo_leaderboard(const std::vector<Judgment>& judgments,
                            const BtOptions& options, double anchor) {
  const auto battles = battles_from_judgments(judgments);
  RatingVector ratings = fit_bradley_terry(battles, options);
  to_elo(ratings, anchor);

  std::map<std::string, std::int64_t> games;
  std::map<std::string, std::int64_t> invalid;
  std::set<int> instances;
  std::string judge;
  for (const auto& j : judgments) {
    if (j.mode != JudgmentMode::pwc) continue;
    if (j.valid && j.outcome) {
      games[j.system_a] += 1;
      games[j.system_b] += 1;
      instances.insert(j.instance_id);
    } else {
      invalid[j.system_a] += 1;
      invalid[j.system_b] += 1;
    }
    if (judge.empty()) judge = j.judge_model;
  }

  Leaderboard board;
  board.mode = "pwc-elo";
  board.judge_model = judge;
  board.instance_count = static_cast<std::int64_t>(instances.size());
  for (std::size_t i = 0; i < ratings.systems.size(); ++i) {
    LeaderboardEntry e;
    e.system = ratings.systems[i];
    e.score = ratings.elo[i];
    e.n = games[e.system];
    const std::int64_t total = games[e.system] + invalid[e.system];
    e.failure_rate =
        total == 0 ? 0.0
                   : static_cast<double>(invalid[e.system]) /
                         static_cast<double>(total);
    board.entries.push_back(std::move(e));
  }
  rank_entries(board.entries);
  return board;
}

}  // namespace zsb
