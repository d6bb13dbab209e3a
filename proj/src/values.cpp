#include "efg/values.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace efg {

std::vector<double> node_values(const GameTree& game, const StrategyProfile& sigma, int player) {
  std::vector<double> v(game.nodes.size(), 0.0);
  for (int s = static_cast<int>(game.nodes.size()) - 1; s >= 0; --s) {
    const GameNode& n = game.nodes[s];
    if (n.kind == NodeKind::leaf) {
      v[s] = n.utils[player].to_double();
      continue;
    }
    double acc = 0.0;
    for (size_t a = 0; a < n.actions.size(); ++a) {
      double w = n.kind == NodeKind::chance ? n.actions[a].prob.to_double()
                                            : sigma[n.infoset][a];
      acc += w * v[n.actions[a].child];
    }
    v[s] = acc;
  }
  return v;
}

InfosetValue counterfactual_value(const GameTree& game, const ReachTable& reach,
                                  const std::vector<double>& values, int is, int player) {
  const GameInfoset& I = game.infosets[is];
  double denom = 0.0, num = 0.0;
  for (int s : I.members) {
    double w = reach.reach_excluding(s, player);
    denom += w;
    num += w * values[s];
  }
  if (denom <= 0.0) return InfosetValue{0.0, true};
  return InfosetValue{num / denom, false};
}

InfosetValue counterfactual_value(const GameTree& game, const StrategyProfile& sigma, int is,
                                  int player) {
  return counterfactual_value(game, compute_reach(game, sigma), node_values(game, sigma, player),
                              is, player);
}

InfosetValue imperfect_value(const GameTree& game, const ReachTable& reach,
                             const std::vector<double>& values, int is) {
  const GameInfoset& I = game.infosets[is];
  double denom = 0.0, num = 0.0;
  for (int s : I.members) {
    double w = reach.reach(s);
    denom += w;
    num += w * values[s];
  }
  if (denom <= 0.0) return InfosetValue{0.0, true};
  return InfosetValue{num / denom, false};
}

InfosetValue imperfect_value(const GameTree& game, const StrategyProfile& sigma, int is) {
  return imperfect_value(game, compute_reach(game, sigma),
                         node_values(game, sigma, game.infosets[is].owner), is);
}

OwnForest build_own_forest(const GameTree& game, int player) {
  OwnForest f;
  f.player = player;
  int ni = game.num_infosets();
  f.parent_infoset.assign(ni, -1);
  f.parent_action.assign(ni, -1);
  f.children.assign(ni, {});
  std::vector<bool> assigned(ni, false);
  for (int is = 0; is < ni; ++is) {
    if (game.infosets[is].owner != player) continue;
    f.own.push_back(is);
    f.children[is].assign(game.infosets[is].labels.size(), {});
    if (!infoset_has_perfect_recall(game, is))
      throw GameError("player p" + std::to_string(player + 1) +
                      " lacks perfect recall at infoset '" + game.infosets[is].id + "'");
  }
  for (int is : f.own) {
    // nearest own ancestor of the first member; perfect recall makes this
    // consistent across members (verified below)
    auto locate = [&](int node) -> std::pair<int, int> {
      int cur = node;
      while (true) {
        int par = game.nodes[cur].parent;
        if (par == -1) return {-1, -1};
        const GameNode& pn = game.nodes[par];
        if (pn.kind == NodeKind::decision && pn.owner == player) {
          for (size_t a = 0; a < pn.actions.size(); ++a)
            if (pn.actions[a].child == cur) return {pn.infoset, static_cast<int>(a)};
        }
        cur = par;
      }
    };
    auto [pis, pact] = locate(game.infosets[is].members[0]);
    for (size_t m = 1; m < game.infosets[is].members.size(); ++m) {
      auto [q, qa] = locate(game.infosets[is].members[m]);
      if (q != pis || qa != pact)
        throw GameError("inconsistent own predecessors at infoset '" + game.infosets[is].id +
                        "' (imperfect recall)");
    }
    f.parent_infoset[is] = pis;
    f.parent_action[is] = pact;
    if (pis == -1) {
      f.tops.push_back(is);
    } else {
      f.children[pis][pact].push_back(is);
    }
  }
  // topo: parents first (DFS from tops)
  std::vector<int> stack(f.tops.rbegin(), f.tops.rend());
  while (!stack.empty()) {
    int is = stack.back();
    stack.pop_back();
    f.topo.push_back(is);
    for (auto it = f.children[is].rbegin(); it != f.children[is].rend(); ++it)
      for (auto jt = it->rbegin(); jt != it->rend(); ++jt) stack.push_back(*jt);
  }
  return f;
}

BestResponseResult best_response(const GameTree& game, const StrategyProfile& sigma, int player) {
  OwnForest forest = build_own_forest(game, player);  // throws if not PR
  ReachTable reach = compute_reach(game, sigma);

  std::vector<int> chosen(game.num_infosets(), -1);
  std::vector<double> memo(game.nodes.size(), std::numeric_limits<double>::quiet_NaN());

  // Value under (sigma_{-i}, response-so-far); callable once every own
  // infoset in the node's subtree has been decided.
  auto eval = [&](auto&& self, int s) -> double {
    if (!std::isnan(memo[s])) return memo[s];
    const GameNode& n = game.nodes[s];
    double v;
    if (n.kind == NodeKind::leaf) {
      v = n.utils[player].to_double();
    } else if (n.kind == NodeKind::decision && n.owner == player) {
      v = self(self, n.actions[chosen[n.infoset]].child);
    } else {
      v = 0.0;
      for (size_t a = 0; a < n.actions.size(); ++a) {
        double w = n.kind == NodeKind::chance ? n.actions[a].prob.to_double()
                                              : sigma[n.infoset][a];
        if (w != 0.0) v += w * self(self, n.actions[a].child);
      }
    }
    memo[s] = v;
    return v;
  };

  // Deepest own infosets first.
  for (auto it = forest.topo.rbegin(); it != forest.topo.rend(); ++it) {
    int is = *it;
    const GameInfoset& I = game.infosets[is];
    int best = 0;
    double best_q = -std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < I.labels.size(); ++a) {
      double q = 0.0;
      for (int s : I.members)
        q += reach.reach_excluding(s, player) * eval(eval, game.nodes[s].actions[a].child);
      if (q > best_q + 0.0) {
        best_q = q;
        best = static_cast<int>(a);
      }
    }
    chosen[is] = best;
  }

  BestResponseResult out;
  out.profile = sigma;
  for (int is : forest.own) {
    auto& row = out.profile[is];
    std::fill(row.begin(), row.end(), 0.0);
    row[chosen[is]] = 1.0;
  }
  out.value = eval(eval, game.root());
  return out;
}

namespace {

RegretReport regrets_impl(const GameTree& game, const StrategyProfile& sigma, bool w_everywhere) {
  sigma.validate(game);
  ReachTable reach = compute_reach(game, sigma);
  std::vector<std::vector<double>> values(game.num_players);
  for (int p = 0; p < game.num_players; ++p) values[p] = node_values(game, sigma, p);

  RegretReport rep;
  rep.action_regret.resize(game.num_infosets());
  rep.infoset_regret.assign(game.num_infosets(), 0.0);
  for (int is = 0; is < game.num_infosets(); ++is) {
    const GameInfoset& I = game.infosets[is];
    int p = I.owner;
    size_t na = I.labels.size();
    rep.action_regret[is].assign(na, 0.0);
    bool use_w = w_everywhere || !infoset_has_perfect_recall(game, is);

    std::vector<double> weights(I.members.size(), 0.0);
    double denom = 0.0;
    for (size_t m = 0; m < I.members.size(); ++m) {
      weights[m] = use_w ? reach.reach(I.members[m]) : reach.reach_excluding(I.members[m], p);
      denom += weights[m];
    }
    if (denom > 0.0) {
      for (double& w : weights) w /= denom;
    } else if (use_w) {
      // unreached set: uniform node distribution convention
      std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(I.members.size()));
    } else {
      // counterfactually unreached perfect-recall set: value 0 by definition
      continue;
    }

    double base = 0.0;
    for (size_t m = 0; m < I.members.size(); ++m) base += weights[m] * values[p][I.members[m]];
    double best = 0.0;
    for (size_t a = 0; a < na; ++a) {
      double va = 0.0;
      for (size_t m = 0; m < I.members.size(); ++m) {
        int child = game.nodes[I.members[m]].actions[a].child;
        va += weights[m] * values[p][child];
      }
      rep.action_regret[is][a] = va - base;
      best = std::max(best, va - base);
    }
    rep.infoset_regret[is] = best;
  }

  rep.full_game_regret.assign(game.num_players, std::numeric_limits<double>::quiet_NaN());
  for (int p = 0; p < game.num_players; ++p) {
    try {
      BestResponseResult br = best_response(game, sigma, p);
      rep.full_game_regret[p] = br.value - values[p][game.root()];
    } catch (const GameError&) {
      // imperfect recall for p: leave NaN
    }
  }
  return rep;
}

}  // namespace

RegretReport immediate_regrets(const GameTree& game, const StrategyProfile& sigma) {
  return regrets_impl(game, sigma, false);
}

RegretReport w_regrets(const GameTree& game, const StrategyProfile& sigma) {
  return regrets_impl(game, sigma, true);
}

}  // namespace efg
