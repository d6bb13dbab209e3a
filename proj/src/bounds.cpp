#include "efg/bounds.hpp"

#include <algorithm>
#include <functional>

#include "efg/values.hpp"

namespace efg {

PsiBreakdown psi_term(const GameTree& game, const AbstractionMap& map, const VerifyResult& errors,
                      BoundMode mode, const ReachTable* reach,
                      const std::vector<double>* class_regret, int I) {
  const GameInfoset& is = game.infosets[I];
  int cls = map.abstract_of[I];
  const auto& members = map.members[cls];

  double r = 0.0;
  if (mode == BoundMode::with_regrets) {
    if (!class_regret || class_regret->size() != static_cast<size_t>(map.num_classes()))
      throw GameError("regret table does not cover every abstract information set");
    // the regret hypothesis only covers classes the other players reach
    double excl = 0.0;
    for (int other : members)
      for (int s : game.infosets[other].members) excl += reach->reach_excluding(s, is.owner);
    if (excl > 0.0) r = std::max(0.0, (*class_regret)[cls]);
  }

  // node weights within I
  size_t nm = is.members.size();
  std::vector<double> w(nm, 0.0);
  double tot = 0.0;
  for (size_t m = 0; m < nm; ++m) {
    w[m] = mode == BoundMode::worst_case ? game.chance_reach_d[is.members[m]]
                                         : reach->reach(is.members[m]);
    tot += w[m];
  }
  if (tot > 0.0) {
    for (double& x : w) x /= tot;
  } else {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(nm));
  }

  PsiBreakdown best;
  best.psi = -1.0;
  for (int J : members) {
    PsiBreakdown cand;
    cand.arg_pair = J;
    if (J == I) {
      cand.regret_term = r;  // delta_{I,I} = 1, zero errors
    } else {
      const PairErrors& pe = errors.at(I, J);
      cand.regret_term = pe.delta * r;
      double werr = 0.0;
      for (size_t m = 0; m < nm; ++m)
        werr += w[m] * (pe.transition_node[m] + pe.reward_node[m]);
      cand.error_term = 2.0 * werr;
      cand.dist_term = pe.dist_pair;
    }
    cand.psi = cand.regret_term + cand.error_term + cand.dist_term;
    if (cand.psi > best.psi) best = cand;
  }
  return best;
}

std::vector<PsiBreakdown> psi_table(const GameTree& game, const AbstractionMap& map,
                                    const VerifyResult& errors, BoundMode mode,
                                    const ReachTable* reach,
                                    const std::vector<double>* class_regret) {
  std::vector<PsiBreakdown> out(game.num_infosets());
  for (int i = 0; i < game.num_infosets(); ++i)
    out[i] = psi_term(game, map, errors, mode, reach, class_regret, i);
  return out;
}

namespace {

// max over the player's pure deviation strategies of the
// opponents'-reach-weighted sum of psi over reached own infosets
double forest_bound(const GameTree& game, const OwnForest& forest, const ReachTable& reach,
                    const std::vector<PsiBreakdown>& psi, int player,
                    std::vector<std::pair<std::string, std::string>>* sequence) {
  std::vector<double> g(game.num_infosets(), 0.0);
  std::vector<int> arg(game.num_infosets(), -1);
  for (auto it = forest.topo.rbegin(); it != forest.topo.rend(); ++it) {
    int is = *it;
    double excl = reach.infoset_reach_excluding(game, is, player);
    double best = 0.0;
    int best_a = 0;
    for (size_t a = 0; a < forest.children[is].size(); ++a) {
      double sum = 0.0;
      for (int child : forest.children[is][a]) sum += g[child];
      if (sum > best) {
        best = sum;
        best_a = static_cast<int>(a);
      }
    }
    arg[is] = best_a;
    g[is] = excl * psi[is].psi + best;
  }
  double eps = 0.0;
  for (int top : forest.tops) eps += g[top];
  if (sequence) {
    std::vector<int> stack(forest.tops.rbegin(), forest.tops.rend());
    while (!stack.empty()) {
      int is = stack.back();
      stack.pop_back();
      sequence->emplace_back(game.infosets[is].id, game.infosets[is].labels[arg[is]]);
      const auto& kids = forest.children[is][arg[is]];
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
  }
  return eps;
}

// all players maximize, chance contributes its probabilities
double worst_case_bound(const GameTree& game, const std::vector<PsiBreakdown>& psi, int player,
                        std::vector<std::pair<std::string, std::string>>* sequence) {
  std::vector<double> g(game.nodes.size(), 0.0);
  std::vector<int> arg(game.nodes.size(), 0);
  for (int s = static_cast<int>(game.nodes.size()) - 1; s >= 0; --s) {
    const GameNode& n = game.nodes[s];
    if (n.kind == NodeKind::leaf) continue;
    if (n.kind == NodeKind::chance) {
      double acc = 0.0;
      double bestc = -1.0;
      for (size_t a = 0; a < n.actions.size(); ++a) {
        double v = g[n.actions[a].child];
        acc += n.actions[a].prob.to_double() * v;
        if (v > bestc) {
          bestc = v;
          arg[s] = static_cast<int>(a);
        }
      }
      g[s] = acc;
    } else {
      double best = -1.0;
      for (size_t a = 0; a < n.actions.size(); ++a) {
        double v = g[n.actions[a].child];
        if (v > best) {
          best = v;
          arg[s] = static_cast<int>(a);
        }
      }
      g[s] = best + (n.owner == player ? psi[n.infoset].psi : 0.0);
    }
  }
  if (sequence) {
    int s = game.root();
    std::vector<bool> seen(game.num_infosets(), false);
    while (!game.is_leaf(s)) {
      const GameNode& n = game.nodes[s];
      if (n.kind == NodeKind::decision && n.owner == player && !seen[n.infoset]) {
        seen[n.infoset] = true;
        sequence->emplace_back(game.infosets[n.infoset].id,
                               game.infosets[n.infoset].labels[arg[s]]);
      }
      s = n.actions[arg[s]].child;
    }
  }
  return g[game.root()];
}

}  // namespace

BoundResult bound_from_psi(const GameTree& game, const std::vector<PsiBreakdown>& psi,
                           BoundMode mode, const ReachTable* reach) {
  BoundResult out;
  out.psi = psi;
  out.eps.assign(game.num_players, 0.0);
  out.best_sequence.resize(game.num_players);
  for (int p = 0; p < game.num_players; ++p) {
    if (mode == BoundMode::worst_case) {
      out.eps[p] = worst_case_bound(game, psi, p, &out.best_sequence[p]);
    } else {
      OwnForest forest = build_own_forest(game, p);
      out.eps[p] = forest_bound(game, forest, *reach, psi, p, &out.best_sequence[p]);
    }
  }
  out.epsilon = *std::max_element(out.eps.begin(), out.eps.end());
  return out;
}

BoundResult compute_bound(const GameTree& game, const AbstractionMap& map,
                          const VerifyResult& errors, BoundMode mode,
                          const StrategyProfile* sigma,
                          const std::vector<double>* class_regret) {
  if (!errors.ok) throw GameError("cannot bound an invalid abstraction");
  if (mode != BoundMode::worst_case && !sigma)
    throw GameError("profile-dependent bound needs a strategy profile");
  ReachTable reach;
  if (mode != BoundMode::worst_case) reach = compute_reach(game, *sigma);
  const ReachTable* rp = mode == BoundMode::worst_case ? nullptr : &reach;
  auto psi = psi_table(game, map, errors, mode, rp, class_regret);
  return bound_from_psi(game, psi, mode, rp);
}

}  // namespace efg
