#pragma once

#include <cstdint>
#include <vector>

#include "efg/abstraction.hpp"
#include "efg/game.hpp"
#include "efg/strategy.hpp"
#include "efg/values.hpp"

namespace efg {

// Vanilla counterfactual regret minimization with regret matching and
// alternating player updates. Works on any GameTree, including ones with
// merged (imperfect-recall) information sets: tables are keyed by the
// game's information sets while the tree is walked as-is. Deterministic;
// the seed is accepted for interface stability but vanilla updates never
// draw from it.
class CfrSolver {
 public:
  explicit CfrSolver(const GameTree& game, std::uint64_t seed = 0);

  void run(int iterations);  // throws on iterations <= 0
  int iteration() const { return iteration_; }

  StrategyProfile average_strategy() const;
  StrategyProfile current_strategy() const;

  const std::vector<std::vector<double>>& cumulative_regret() const { return regret_; }
  const std::vector<std::vector<double>>& cumulative_strategy() const { return strategy_sum_; }

 private:
  const GameTree& game_;
  int iteration_ = 0;
  std::vector<std::vector<double>> regret_;
  std::vector<std::vector<double>> strategy_sum_;
  std::vector<double> scratch_;  // per-depth sigma/value buffers
  size_t scratch_width_ = 0;
  std::vector<double> leaf_util_;
  std::vector<const double*> chance_prob_;
  std::vector<std::vector<double>> probs_store_;

  double traverse(int node, int updater, double reach_me, double reach_other, int depth);
  void matched_row(int is, double* out) const;
};

struct CfrResult {
  StrategyProfile average;
  RegretReport abstract_regrets;  // W-based immediate regrets of the average
};

CfrResult cfr_run(const GameTree& abstract_game, int iterations, std::uint64_t seed = 0);

// Full-game best-response gains of a profile, per player, plus their sum.
struct Exploitability {
  std::vector<double> regret;
  double sum = 0.0;
};
Exploitability evaluate_in_original(const GameTree& original, const StrategyProfile& sigma);

}  // namespace efg
