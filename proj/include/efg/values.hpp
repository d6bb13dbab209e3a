#pragma once

#include <vector>

#include "efg/game.hpp"
#include "efg/strategy.hpp"

namespace efg {

struct InfosetValue {
  double value = 0.0;
  bool unreachable = false;  // reach-zero convention case; do not feed into bounds
};

// Expected utility V_i(s) of `player` from every node under sigma.
std::vector<double> node_values(const GameTree& game, const StrategyProfile& sigma, int player);

// Counterfactual value of a perfect-recall infoset of `player`
// (opponents-and-chance reach weights; 0 when unreached by them).
InfosetValue counterfactual_value(const GameTree& game, const ReachTable& reach,
                                  const std::vector<double>& values, int is, int player);
InfosetValue counterfactual_value(const GameTree& game, const StrategyProfile& sigma, int is,
                                  int player);

// Full-reach weighted infoset value W; reach zero yields 0 with a flag.
InfosetValue imperfect_value(const GameTree& game, const ReachTable& reach,
                             const std::vector<double>& values, int is);
InfosetValue imperfect_value(const GameTree& game, const StrategyProfile& sigma, int is);

// Player's own information-set forest (requires perfect recall for that
// player): every infoset has a unique own predecessor (infoset, action).
struct OwnForest {
  int player = -1;
  std::vector<int> own;                               // infoset indices of the player
  std::vector<int> parent_infoset;                    // per infoset; -1 if top / not owned
  std::vector<int> parent_action;                     // action index at parent infoset
  std::vector<std::vector<std::vector<int>>> children;  // [infoset][action] -> infosets
  std::vector<int> tops;                              // own infosets with no own predecessor
  std::vector<int> topo;                              // own infosets, parents first
};
OwnForest build_own_forest(const GameTree& game, int player);

struct BestResponseResult {
  StrategyProfile profile;  // sigma with the player's rows replaced by a pure response
  double value = 0.0;       // V_player at the root under (sigma_{-i}, response)
};
// One bottom-up pass maximizing counterfactual action values per infoset;
// ties break to the lowest action index. Throws unless the game has perfect
// recall for `player`.
BestResponseResult best_response(const GameTree& game, const StrategyProfile& sigma, int player);

struct RegretReport {
  std::vector<std::vector<double>> action_regret;  // r(I,a)
  std::vector<double> infoset_regret;              // r(I) = max_a r(I,a)
  // Best-response gain per player at the root; NaN for players without
  // perfect recall (no best-response oracle there).
  std::vector<double> full_game_regret;
};

// r(I,a) with counterfactual values at perfect-recall sets and W values at
// imperfect-recall sets.
RegretReport immediate_regrets(const GameTree& game, const StrategyProfile& sigma);

// W-based regrets at every set (the form the solution-quality bounds
// consume). Unreached sets use uniform node weights.
RegretReport w_regrets(const GameTree& game, const StrategyProfile& sigma);

}  // namespace efg
