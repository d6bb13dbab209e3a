#include "efg/cfr.hpp"

#include <stdexcept>

namespace efg {

CfrSolver::CfrSolver(const GameTree& game, std::uint64_t) : game_(game) {
  regret_.resize(game.num_infosets());
  strategy_sum_.resize(game.num_infosets());
  for (int i = 0; i < game.num_infosets(); ++i) {
    regret_[i].assign(game.infosets[i].labels.size(), 0.0);
    strategy_sum_[i].assign(game.infosets[i].labels.size(), 0.0);
  }
  size_t maxw = 1;
  for (const auto& n : game.nodes) maxw = std::max(maxw, n.actions.size());
  scratch_.assign(static_cast<size_t>(game.max_depth + 1) * 2 * maxw, 0.0);
  scratch_width_ = 2 * maxw;
  leaf_util_.assign(game.nodes.size() * game.num_players, 0.0);
  chance_prob_.assign(game.nodes.size(), nullptr);
  size_t n_chance = 0;
  for (const auto& n : game.nodes)
    if (n.kind == NodeKind::chance) ++n_chance;
  probs_store_.reserve(n_chance);
  for (size_t s = 0; s < game.nodes.size(); ++s) {
    const GameNode& n = game.nodes[s];
    if (n.kind == NodeKind::leaf) {
      for (int p = 0; p < game.num_players; ++p)
        leaf_util_[s * game.num_players + p] = n.utils[p].to_double();
    } else if (n.kind == NodeKind::chance) {
      probs_store_.emplace_back();
      auto& v = probs_store_.back();
      v.reserve(n.actions.size());
      for (const auto& a : n.actions) v.push_back(a.prob.to_double());
      chance_prob_[s] = v.data();
    }
  }
}

void CfrSolver::matched_row(int is, double* out) const {
  const auto& r = regret_[is];
  double pos = 0.0;
  for (double x : r) pos += x > 0.0 ? x : 0.0;
  if (pos > 0.0) {
    for (size_t a = 0; a < r.size(); ++a) out[a] = r[a] > 0.0 ? r[a] / pos : 0.0;
  } else {
    double u = 1.0 / static_cast<double>(r.size());
    for (size_t a = 0; a < r.size(); ++a) out[a] = u;
  }
}

double CfrSolver::traverse(int node, int updater, double reach_me, double reach_other,
                           int depth) {
  const GameNode& n = game_.nodes[node];
  if (n.kind == NodeKind::leaf) return leaf_util_[node * game_.num_players + updater];
  if (reach_me == 0.0 && reach_other == 0.0) return 0.0;

  size_t na = n.actions.size();
  if (n.kind == NodeKind::chance) {
    const double* probs = chance_prob_[node];
    double v = 0.0;
    for (size_t a = 0; a < na; ++a) {
      double p = probs[a];
      if (p != 0.0)
        v += p * traverse(n.actions[a].child, updater, reach_me, reach_other * p, depth + 1);
    }
    return v;
  }

  int is = n.infoset;
  double* sigma = scratch_.data() + static_cast<size_t>(depth) * scratch_width_;
  double* q = sigma + scratch_width_ / 2;
  matched_row(is, sigma);

  if (n.owner == updater) {
    double v = 0.0;
    for (size_t a = 0; a < na; ++a) {
      q[a] = traverse(n.actions[a].child, updater, reach_me * sigma[a], reach_other, depth + 1);
      v += sigma[a] * q[a];
    }
    auto& reg = regret_[is];
    auto& ssum = strategy_sum_[is];
    for (size_t a = 0; a < na; ++a) {
      reg[a] += reach_other * (q[a] - v);
      ssum[a] += reach_me * sigma[a];
    }
    return v;
  }

  double v = 0.0;
  for (size_t a = 0; a < na; ++a) {
    double p = sigma[a];
    if (p == 0.0 && reach_me == 0.0) continue;
    v += p * traverse(n.actions[a].child, updater, reach_me, reach_other * p, depth + 1);
  }
  return v;
}

void CfrSolver::run(int iterations) {
  if (iterations <= 0) throw GameError("iteration count must be positive");
  for (int t = 0; t < iterations; ++t) {
    for (int p = 0; p < game_.num_players; ++p) traverse(game_.root(), p, 1.0, 1.0, 0);
    ++iteration_;
  }
}

StrategyProfile CfrSolver::average_strategy() const {
  StrategyProfile s(game_);
  for (int i = 0; i < game_.num_infosets(); ++i) {
    double tot = 0.0;
    for (double x : strategy_sum_[i]) tot += x;
    size_t na = strategy_sum_[i].size();
    for (size_t a = 0; a < na; ++a)
      s[i][a] = tot > 0.0 ? strategy_sum_[i][a] / tot : 1.0 / static_cast<double>(na);
  }
  return s;
}

StrategyProfile CfrSolver::current_strategy() const {
  StrategyProfile s(game_);
  std::vector<double> row;
  for (int i = 0; i < game_.num_infosets(); ++i) {
    row.assign(game_.infosets[i].labels.size(), 0.0);
    matched_row(i, row.data());
    s[i] = row;
  }
  return s;
}

CfrResult cfr_run(const GameTree& abstract_game, int iterations, std::uint64_t seed) {
  CfrSolver solver(abstract_game, seed);
  solver.run(iterations);
  CfrResult out;
  out.average = solver.average_strategy();
  out.abstract_regrets = w_regrets(abstract_game, out.average);
  return out;
}

Exploitability evaluate_in_original(const GameTree& original, const StrategyProfile& sigma) {
  Exploitability e;
  e.regret.resize(original.num_players);
  for (int p = 0; p < original.num_players; ++p) {
    BestResponseResult br = best_response(original, sigma, p);
    double have = node_values(original, sigma, p)[original.root()];
    e.regret[p] = br.value - have;
    e.sum += e.regret[p];
  }
  return e;
}

}  // namespace efg
