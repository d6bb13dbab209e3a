#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "efg/game.hpp"
#include "efg/strategy.hpp"

namespace efg {

// Partition of a game's information sets into abstract classes, plus
// optional per-ordered-pair scaling factors. Leaf bijections are always
// recomputed from the game, never stored.
struct AbstractionMap {
  std::vector<int> abstract_of;             // original infoset -> class index
  std::vector<std::string> class_ids;       // class index -> id
  std::vector<std::vector<int>> members;    // class index -> original infosets

  // Explicit scaling factors delta_{I,J} for ordered original-infoset pairs.
  // Missing pairs fall back to `default_delta`.
  std::map<std::pair<int, int>, double> delta;
  enum class DefaultDelta { one, min_max } default_delta = DefaultDelta::one;

  static AbstractionMap identity(const GameTree& game);
  // Classes given as lists of original infoset ids; unlisted sets stay
  // singletons named after themselves.
  static AbstractionMap from_classes(const GameTree& game,
                                     const std::vector<std::pair<std::string, std::vector<std::string>>>& classes);

  int num_classes() const { return static_cast<int>(class_ids.size()); }
  bool is_identity() const;
  double delta_of(int I, int J) const {
    auto it = delta.find({I, J});
    return it == delta.end() ? 1.0 : it->second;
  }
  bool has_delta(int I, int J) const { return delta.count({I, J}) != 0; }
  void set_delta(int I, int J, double d);  // also stores the reciprocal
};

// Map file: `merge <class-id> = <iid>,<iid>,...` and optionally
// `delta <iid-a> <iid-b> = <num>/<den>`.
AbstractionMap load_abstraction(const GameTree& game, const std::string& text);
std::string save_abstraction(const GameTree& game, const AbstractionMap& map);

// True iff every class merges sets of one owner with identical action
// labels, i.e. the abstraction only merges information sets.
struct RefinementCheck {
  bool ok = true;
  std::string reason;
  int class_index = -1;
};
RefinementCheck check_refinement(const GameTree& game, const AbstractionMap& map);

// The abstract game: same tree, classes as information sets.
GameTree apply_abstraction(const GameTree& game, const AbstractionMap& map);

// Play at each original set exactly what `abstract_sigma` plays at its
// class. Throws on action-label mismatch.
StrategyProfile lift_strategy(const GameTree& abstract_game, const StrategyProfile& abstract_sigma,
                              const GameTree& original, const AbstractionMap& map);

}  // namespace efg
