#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "efg/rational.hpp"

namespace efg {

enum class NodeKind { decision, chance, leaf };

struct GameAction {
  std::string label;
  int child = -1;
  Rational prob;  // meaningful only when the parent is a chance node
};

struct GameNode {
  NodeKind kind = NodeKind::leaf;
  int owner = -1;    // player index for decision nodes
  int infoset = -1;  // infoset index for decision nodes
  int parent = -1;
  int depth = 0;
  bool padding = false;  // unary chance node inserted to equalize leaf depth
  std::vector<GameAction> actions;
  std::vector<Rational> utils;  // per player, leaf nodes only
};

struct GameInfoset {
  std::string id;
  int owner = -1;
  std::vector<int> members;          // node indices
  std::vector<std::string> labels;   // shared action labels
};

// Immutable extensive-form game tree. Nodes are stored in DFS preorder so
// each subtree is a contiguous node range and its leaves a contiguous slice
// of `leaves`. Chance probabilities and utilities are exact rationals;
// utilities are shifted to be non-negative at construction (shift recorded).
class GameTree {
 public:
  std::string name;
  int num_players = 2;
  std::vector<GameNode> nodes;
  std::vector<std::string> node_ids;
  std::vector<GameInfoset> infosets;
  std::unordered_map<std::string, int> infoset_index;
  std::vector<Rational> utility_shift;  // per player, amount added at load

  std::vector<int> leaves;             // leaf node indices in DFS order
  std::vector<int> leaf_lo, leaf_hi;   // per node: [lo,hi) into `leaves`
  std::vector<int> subtree_hi;         // per node: one past last node of subtree
  std::vector<Rational> chance_reach;  // per node: product of chance probs from root
  std::vector<double> chance_reach_d;
  int max_depth = 0;

  int root() const { return 0; }
  const GameNode& node(int s) const { return nodes[s]; }
  int height(int s) const { return max_depth - nodes[s].depth; }
  bool is_leaf(int s) const { return nodes[s].kind == NodeKind::leaf; }
  int num_infosets() const { return static_cast<int>(infosets.size()); }
  double max_utility() const;  // max over players and leaves, as double

  // Exact chance probability of the path s -> descendant t.
  Rational chance_between(int s, int t) const { return chance_reach[t] / chance_reach[s]; }

  // Heights at which a player owns nodes (player -1 = chance).
  std::vector<int> heights_of(int player) const;

  // Member node of infoset `is` on the path to leaf node z, or -1.
  int member_above(int is, int z) const;

  bool structurally_equal(const GameTree& other) const;
};

// Incremental construction; finalize() validates, shifts utilities, pads
// leaves to uniform depth and canonicalizes to DFS order.
class GameBuilder {
 public:
  GameBuilder(std::string name, int num_players);

  void add_decision(const std::string& id, int owner, const std::string& infoset_id);
  void add_chance(const std::string& id);
  void add_leaf(const std::string& id, std::vector<Rational> utils);
  // prob must be present iff `parent` is a chance node.
  void add_edge(const std::string& parent, const std::string& label, const std::string& child,
                std::optional<Rational> prob = std::nullopt);

  GameTree finalize();

 private:
  struct Raw {
    NodeKind kind;
    int owner = -1;
    std::string infoset_id;
    std::vector<Rational> utils;
    std::vector<GameAction> actions;  // child = raw index
    bool has_parent = false;
  };
  std::string name_;
  int num_players_;
  std::vector<Raw> raw_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, int> index_;

  int require(const std::string& id) const;
};

struct GameError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Perfect recall check: for every player infoset, all members must share the
// player's own (infoset, action) sequence from the root.
struct RecallViolation {
  int infoset = -1;
  int node_a = -1, node_b = -1;
};
std::optional<RecallViolation> find_recall_violation(const GameTree& game);
bool is_perfect_recall(const GameTree& game);
bool infoset_has_perfect_recall(const GameTree& game, int is);

// Action-sequence signatures (X machinery). Items are (tag, label) where tag
// identifies the acting infoset (optionally remapped through an abstraction)
// or -2 for chance. Padding nodes never contribute.
enum class SeqFilter { all, exclude_player, only_player, others_no_chance, no_chance };
struct SeqItem {
  int tag;
  std::string label;
  bool operator==(const SeqItem&) const = default;
};
// Sequence of (tag,label) on the path root -> s (exclusive of s itself).
// `remap` (original infoset idx -> tag) may be null for identity tags.
std::vector<SeqItem> action_sequence(const GameTree& game, int s, SeqFilter filter, int player,
                                     const std::vector<int>* remap = nullptr);
// Same, restricted to the path strictly below `from` down to `s` but
// including the action taken at `from` itself.
std::vector<SeqItem> action_sequence_between(const GameTree& game, int from, int s,
                                             SeqFilter filter, int player,
                                             const std::vector<int>* remap = nullptr);
std::string sequence_key(const std::vector<SeqItem>& seq);

// Chance action labels on the path root -> s (padding skipped).
std::string chance_label_key(const GameTree& game, int s);
// Chance labels strictly below `from` on the path to `s`.
std::string chance_label_key_between(const GameTree& game, int from, int s);

}  // namespace efg
