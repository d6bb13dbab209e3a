#pragma once

#include <cstdint>
#include <unordered_map>

#include "efg/abstraction.hpp"
#include "efg/game.hpp"
#include "efg/strategy.hpp"

namespace efg {

// Two-round die poker. Each player antes one chip and privately rolls once
// per round; a betting round (fold/call/raise, at most two raises) follows
// each roll; larger sum of the two dice wins the pot, ties split. Raises
// are worth two chips in round one and four in round two, so a player can
// commit at most 13 chips. correlation > 0 skews each round's joint roll
// distribution toward equal values (see make_cdrp).
struct DrpSpec {
  int sides = 6;
  Rational correlation = Rational(0);

  static constexpr int ante = 1;
  static constexpr int raise_round1 = 2;
  static constexpr int raise_round2 = 4;
  static constexpr int max_raises = 2;
};

// Metadata for the second-round information sets (the abstraction level the
// experiments target).
struct DrpRound2Info {
  struct Entry {
    int player = -1;
    int own1 = 0, own2 = 0;  // the owner's two rolls
    std::string context;     // betting history and position
  };
  std::unordered_map<int, Entry> by_infoset;  // original infoset index ->
};

GameTree make_drp(const DrpSpec& spec, DrpRound2Info* info = nullptr);

// Correlated variant: per round, the joint roll probability is
//   q(v1,v2) = 1/sides^2 - (c/sides)*|v1-v2|,
// with the removed mass returned to the diagonal cells so the distribution
// is exact; rounds are independent. Requires c <= 1/(sides*(sides-1)).
GameTree make_cdrp(const DrpSpec& spec, DrpRound2Info* info = nullptr);

// The joint per-round roll probability used by make_cdrp.
Rational cdrp_pair_probability(int sides, const Rational& c, int v1, int v2);

// A small two-block game with a hand-checkable lossy merge: a half-half
// chance root over two subtrees, an acting player choosing a/b in each, a
// chance branch, then the other player choosing between two payoffs. The
// returned map merges the two subtrees' sets with unit scaling; its error
// report has transition error 2 and reward error 0.5 at the first subtree's
// top node and distribution error 2 at the first merged bottom set.
struct MergeExample {
  GameTree game;
  AbstractionMap map;
};
MergeExample make_merge_example();

// Random perfect-recall games with designated mergeable groups, built by
// cloning a subtree shape per group and jittering utilities and chance
// weights on an exact rational grid. Zero jitter makes the groups merge
// losslessly.
struct RandomGameSpec {
  std::uint64_t seed = 1;
  int groups = 2;         // opponent root actions, one candidate group each
  int group_size = 3;     // candidate information sets per group
  int set_nodes = 2;      // nodes per candidate set
  int actions = 2;        // candidate owner's actions
  bool below_chance = true;
  int util_base_max = 10;   // base utilities drawn from {0..util_base_max}
  int util_jitter = 2;      // per-clone utility jitter, units of 1/20
  int prob_jitter = 2;      // chance-weight jitter, integer weight units
  // boosts the first action at every candidate set so it dominates under
  // any beliefs; the abstract game then has a closed-form equilibrium
  bool dominant_first_action = false;
};
struct RandomGame {
  GameTree game;
  std::vector<std::vector<int>> candidate_groups;  // infoset indices
};
RandomGame make_random_game(const RandomGameSpec& spec);

// Equilibrium of a dominant_first_action game: the candidate owner plays the
// boosted action, the opponent best-responds at the root.
StrategyProfile dominant_equilibrium(const GameTree& abstract_game);

// Fold wherever a fold action exists, otherwise call, otherwise uniform.
StrategyProfile always_fold_profile(const GameTree& game);

}  // namespace efg
