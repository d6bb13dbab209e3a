#pragma once

#include <string>
#include <vector>

#include "efg/game.hpp"

namespace efg {

// Behavioral strategy profile: one distribution over actions per player
// infoset, indexed like GameTree::infosets. Nature is fixed in the tree.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  explicit StrategyProfile(const GameTree& game)
      : rows_(game.num_infosets()) {
    for (int i = 0; i < game.num_infosets(); ++i)
      rows_[i].assign(game.infosets[i].labels.size(), 0.0);
  }

  static StrategyProfile uniform(const GameTree& game);

  std::vector<double>& operator[](int is) { return rows_[is]; }
  const std::vector<double>& operator[](int is) const { return rows_[is]; }
  size_t size() const { return rows_.size(); }

  // Each row a distribution within `tol`; throws GameError otherwise.
  void validate(const GameTree& game, double tol = 1e-9) const;

 private:
  std::vector<std::vector<double>> rows_;
};

// CSV "infoset_id,action_label,probability" with 17 significant digits.
std::string strategy_to_csv(const GameTree& game, const StrategyProfile& sigma);
StrategyProfile strategy_from_csv(const GameTree& game, const std::string& csv);

// Reach probabilities under a profile. Stored factored: chance component and
// one per-player component per node, so pi_{-i} needs no division.
struct ReachTable {
  std::vector<double> chance;             // pi_0(s)
  std::vector<std::vector<double>> own;   // own[p][s]: product of p's choices
  int players = 0;

  double reach(int s) const {
    double r = chance[s];
    for (const auto& o : own) r *= o[s];
    return r;
  }
  double reach_excluding(int s, int player) const {
    double r = chance[s];
    for (int p = 0; p < players; ++p)
      if (p != player) r *= own[p][s];
    return r;
  }
  double infoset_reach(const GameTree& game, int is) const;
  double infoset_reach_excluding(const GameTree& game, int is, int player) const;
};

ReachTable compute_reach(const GameTree& game, const StrategyProfile& sigma);

}  // namespace efg
