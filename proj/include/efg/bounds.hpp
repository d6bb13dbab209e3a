#pragma once

#include <string>
#include <vector>

#include "efg/abstraction.hpp"
#include "efg/merge_errors.hpp"
#include "efg/strategy.hpp"

namespace efg {

// with_regrets: regret-transfer bound for a profile with measured abstract
//   regrets (an approximate-equilibrium certificate for every refinement set).
// nash: same with the regret term dropped (exact abstract equilibria).
// worst_case: nash-mode with all players' choice nodes maximized and only
//   chance contributing weights; independent of any profile.
enum class BoundMode { with_regrets, nash, worst_case };

struct PsiBreakdown {
  double psi = 0.0;
  int arg_pair = -1;  // co-member attaining the max
  double regret_term = 0.0, error_term = 0.0, dist_term = 0.0;
};

struct BoundResult {
  std::vector<double> eps;  // per player
  double epsilon = 0.0;     // max over players
  std::vector<PsiBreakdown> psi;
  // per player: (infoset id, action label) chain attaining the max
  std::vector<std::vector<std::pair<std::string, std::string>>> best_sequence;
};

// Per-infoset penalty: max over same-class co-members J of
//   delta_{I,J} * r(class) + 2 * sum_s w(s) (eps0(I,J)(s) + epsR(I,J)(s)) + epsD(I,J),
// with node weights from the profile (uniform when unreached) or from chance
// reach in worst_case mode.
std::vector<PsiBreakdown> psi_table(const GameTree& game, const AbstractionMap& map,
                                    const VerifyResult& errors, BoundMode mode,
                                    const ReachTable* reach,
                                    const std::vector<double>* class_regret);
PsiBreakdown psi_term(const GameTree& game, const AbstractionMap& map, const VerifyResult& errors,
                      BoundMode mode, const ReachTable* reach,
                      const std::vector<double>* class_regret, int infoset);

BoundResult bound_from_psi(const GameTree& game, const std::vector<PsiBreakdown>& psi,
                           BoundMode mode, const ReachTable* reach);

// sigma: the abstract profile lifted to `game` (ignored in worst_case mode).
// class_regret: per abstract class, required in with_regrets mode.
BoundResult compute_bound(const GameTree& game, const AbstractionMap& map,
                          const VerifyResult& errors, BoundMode mode,
                          const StrategyProfile* sigma,
                          const std::vector<double>* class_regret);

}  // namespace efg
