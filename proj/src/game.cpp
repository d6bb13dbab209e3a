#include "efg/game.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace efg {

double GameTree::max_utility() const {
  double best = 0.0;
  for (int z : leaves)
    for (const auto& u : nodes[z].utils) best = std::max(best, u.to_double());
  return best;
}

std::vector<int> GameTree::heights_of(int player) const {
  std::vector<bool> seen(max_depth + 1, false);
  for (const auto& n : nodes) {
    if (player == -1 ? n.kind == NodeKind::chance && !n.padding
                     : n.kind == NodeKind::decision && n.owner == player) {
      seen[max_depth - n.depth] = true;
    }
  }
  std::vector<int> out;
  for (int h = 0; h <= max_depth; ++h)
    if (seen[h]) out.push_back(h);
  return out;
}

int GameTree::member_above(int is, int z) const {
  for (int s = z; s != -1; s = nodes[s].parent)
    if (nodes[s].kind == NodeKind::decision && nodes[s].infoset == is) return s;
  return -1;
}

bool GameTree::structurally_equal(const GameTree& other) const {
  if (num_players != other.num_players || nodes.size() != other.nodes.size() ||
      infosets.size() != other.infosets.size() || name != other.name)
    return false;
  for (size_t i = 0; i < nodes.size(); ++i) {
    const auto& a = nodes[i];
    const auto& b = other.nodes[i];
    if (a.kind != b.kind || a.owner != b.owner || a.parent != b.parent || a.depth != b.depth ||
        a.padding != b.padding || a.utils != b.utils ||
        a.actions.size() != b.actions.size())
      return false;
    if (node_ids[i] != other.node_ids[i]) return false;
    if (a.infoset != b.infoset) return false;
    for (size_t j = 0; j < a.actions.size(); ++j) {
      if (a.actions[j].label != b.actions[j].label || a.actions[j].child != b.actions[j].child ||
          a.actions[j].prob != b.actions[j].prob)
        return false;
    }
  }
  for (size_t i = 0; i < infosets.size(); ++i)
    if (infosets[i].id != other.infosets[i].id || infosets[i].members != other.infosets[i].members)
      return false;
  return true;
}

GameBuilder::GameBuilder(std::string name, int num_players)
    : name_(std::move(name)), num_players_(num_players) {
  if (num_players < 1) throw GameError("game needs at least one player");
}

int GameBuilder::require(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw GameError("reference to undeclared node '" + id + "'");
  return it->second;
}

void GameBuilder::add_decision(const std::string& id, int owner, const std::string& infoset_id) {
  if (index_.count(id)) throw GameError("duplicate node id '" + id + "'");
  if (owner < 0 || owner >= num_players_) throw GameError("bad owner for node '" + id + "'");
  index_[id] = static_cast<int>(raw_.size());
  ids_.push_back(id);
  raw_.push_back(Raw{NodeKind::decision, owner, infoset_id, {}, {}, false});
}

void GameBuilder::add_chance(const std::string& id) {
  if (index_.count(id)) throw GameError("duplicate node id '" + id + "'");
  index_[id] = static_cast<int>(raw_.size());
  ids_.push_back(id);
  raw_.push_back(Raw{NodeKind::chance, -1, {}, {}, {}, false});
}

void GameBuilder::add_leaf(const std::string& id, std::vector<Rational> utils) {
  if (index_.count(id)) throw GameError("duplicate node id '" + id + "'");
  if (static_cast<int>(utils.size()) != num_players_)
    throw GameError("leaf '" + id + "' needs one utility per player");
  index_[id] = static_cast<int>(raw_.size());
  ids_.push_back(id);
  raw_.push_back(Raw{NodeKind::leaf, -1, {}, std::move(utils), {}, false});
}

void GameBuilder::add_edge(const std::string& parent, const std::string& label,
                           const std::string& child, std::optional<Rational> prob) {
  int p = require(parent);
  int c = require(child);
  if (raw_[p].kind == NodeKind::leaf) throw GameError("leaf '" + parent + "' cannot have actions");
  if (raw_[p].kind == NodeKind::chance && !prob)
    throw GameError("chance edge '" + parent + "' -> '" + child + "' needs a probability");
  if (raw_[p].kind == NodeKind::decision && prob)
    throw GameError("player edge '" + parent + "' -> '" + child + "' cannot carry a probability");
  if (raw_[c].has_parent) throw GameError("node '" + child + "' has two parents");
  raw_[c].has_parent = true;
  GameAction a;
  a.label = label;
  a.child = c;
  if (prob) a.prob = *prob;
  raw_[p].actions.push_back(std::move(a));
}

GameTree GameBuilder::finalize() {
  if (raw_.empty()) throw GameError("empty game");

  int root = -1;
  for (size_t i = 0; i < raw_.size(); ++i) {
    if (!raw_[i].has_parent) {
      if (root != -1)
        throw GameError("multiple roots: '" + ids_[root] + "' and '" + ids_[i] + "'");
      root = static_cast<int>(i);
    }
  }
  if (root == -1) throw GameError("no root node (cycle in edges)");
  if (raw_[root].kind == NodeKind::leaf)
    throw GameError("root must be a decision node, not a leaf");

  for (size_t i = 0; i < raw_.size(); ++i) {
    if (raw_[i].kind != NodeKind::leaf && raw_[i].actions.empty())
      throw GameError("internal node '" + ids_[i] + "' has no actions");
    if (raw_[i].kind == NodeKind::chance) {
      Rational sum(0);
      for (const auto& a : raw_[i].actions) {
        if (a.prob.is_negative())
          throw GameError("negative probability at chance node '" + ids_[i] + "'");
        sum += a.prob;
      }
      if (sum != Rational(1))
        throw GameError("probabilities at chance node '" + ids_[i] + "' sum to " + sum.str() +
                        ", expected 1");
    }
  }

  // Utility shift to make all payoffs non-negative.
  std::vector<Rational> shift(num_players_, Rational(0));
  for (const auto& r : raw_) {
    if (r.kind != NodeKind::leaf) continue;
    for (int p = 0; p < num_players_; ++p)
      if (r.utils[p] < -shift[p]) shift[p] = -r.utils[p];
  }

  GameTree g;
  g.name = name_;
  g.num_players = num_players_;
  g.utility_shift = shift;

  // DFS preorder copy (children in declaration order), reachability check.
  std::vector<int> new_of(raw_.size(), -1);
  std::function<void(int, int, int)> dfs = [&](int raw_idx, int parent_new, int depth) {
    int me = static_cast<int>(g.nodes.size());
    new_of[raw_idx] = me;
    GameNode n;
    n.kind = raw_[raw_idx].kind;
    n.owner = raw_[raw_idx].owner;
    n.parent = parent_new;
    n.depth = depth;
    if (n.kind == NodeKind::leaf) {
      n.utils = raw_[raw_idx].utils;
      for (int p = 0; p < num_players_; ++p) n.utils[p] += shift[p];
    }
    g.nodes.push_back(std::move(n));
    g.node_ids.push_back(ids_[raw_idx]);
    for (const auto& a : raw_[raw_idx].actions) {
      int child_new = static_cast<int>(g.nodes.size());
      GameAction na;
      na.label = a.label;
      na.prob = a.prob;
      na.child = child_new;
      g.nodes[me].actions.push_back(na);
      dfs(a.child, me, depth + 1);
    }
    g.subtree_hi.resize(std::max(g.subtree_hi.size(), size_t(me + 1)));
    g.subtree_hi[me] = static_cast<int>(g.nodes.size());
  };
  g.subtree_hi.reserve(raw_.size());
  dfs(root, -1, 0);
  if (g.nodes.size() != raw_.size()) {
    for (size_t i = 0; i < raw_.size(); ++i)
      if (new_of[i] == -1) throw GameError("node '" + ids_[i] + "' unreachable from root");
  }

  // Pad leaves to uniform depth with unary probability-1 chance nodes.
  int maxd = 0;
  for (const auto& n : g.nodes)
    if (n.kind == NodeKind::leaf) maxd = std::max(maxd, n.depth);
  {
    GameTree padded;
    padded.name = g.name;
    padded.num_players = g.num_players;
    padded.utility_shift = g.utility_shift;
    std::function<void(int, int, int)> copy = [&](int old_idx, int parent_new, int depth) {
      const GameNode& src = g.nodes[old_idx];
      if (src.kind == NodeKind::leaf && depth < maxd) {
        // chain of padding chance nodes, then the leaf
        int remaining = maxd - depth;
        int prev_parent = parent_new;
        for (int k = 0; k < remaining; ++k) {
          int me = static_cast<int>(padded.nodes.size());
          GameNode pad;
          pad.kind = NodeKind::chance;
          pad.padding = true;
          pad.parent = prev_parent;
          pad.depth = depth + k;
          GameAction a;
          a.label = "pad";
          a.prob = Rational(1);
          a.child = me + 1;
          pad.actions.push_back(a);
          padded.nodes.push_back(std::move(pad));
          padded.node_ids.push_back(g.node_ids[old_idx] + "#pad" + std::to_string(k));
          padded.subtree_hi.push_back(0);
          prev_parent = me;
        }
        int me = static_cast<int>(padded.nodes.size());
        GameNode leaf = src;
        leaf.parent = prev_parent;
        leaf.depth = maxd;
        padded.nodes.push_back(std::move(leaf));
        padded.node_ids.push_back(g.node_ids[old_idx]);
        padded.subtree_hi.push_back(me + 1);
        for (int k = 0; k < remaining; ++k) padded.subtree_hi[me - 1 - k] = me + 1;
        return;
      }
      int me = static_cast<int>(padded.nodes.size());
      GameNode n = src;
      n.parent = parent_new;
      n.depth = depth;
      n.actions.clear();
      padded.nodes.push_back(std::move(n));
      padded.node_ids.push_back(g.node_ids[old_idx]);
      padded.subtree_hi.push_back(0);
      for (const auto& a : src.actions) {
        GameAction na;
        na.label = a.label;
        na.prob = a.prob;
        na.child = static_cast<int>(padded.nodes.size());
        padded.nodes[me].actions.push_back(na);
        copy(a.child, me, depth + 1);
      }
      padded.subtree_hi[me] = static_cast<int>(padded.nodes.size());
    };
    copy(0, -1, 0);
    g = std::move(padded);
  }
  g.max_depth = maxd;

  // Infosets from declared ids; membership in DFS order.
  std::unordered_map<std::string, std::string> infoset_of_id;
  for (size_t i = 0; i < raw_.size(); ++i)
    if (raw_[i].kind == NodeKind::decision) infoset_of_id[ids_[i]] = raw_[i].infoset_id;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    GameNode& n = g.nodes[i];
    if (n.kind != NodeKind::decision) continue;
    const std::string& isid = infoset_of_id.at(g.node_ids[i]);
    auto it = g.infoset_index.find(isid);
    int idx;
    if (it == g.infoset_index.end()) {
      idx = static_cast<int>(g.infosets.size());
      g.infoset_index[isid] = idx;
      GameInfoset is;
      is.id = isid;
      is.owner = n.owner;
      for (const auto& a : n.actions) is.labels.push_back(a.label);
      g.infosets.push_back(std::move(is));
    } else {
      idx = it->second;
      const GameInfoset& is = g.infosets[idx];
      if (is.owner != n.owner)
        throw GameError("infoset '" + isid + "' mixes owners p" + std::to_string(is.owner + 1) +
                        " and p" + std::to_string(n.owner + 1));
      if (is.labels.size() != n.actions.size())
        throw GameError("infoset '" + isid + "' has nodes with different action counts");
      for (size_t j = 0; j < n.actions.size(); ++j)
        if (is.labels[j] != n.actions[j].label)
          throw GameError("infoset '" + isid + "' has nodes with different action labels");
    }
    n.infoset = idx;
    g.infosets[idx].members.push_back(static_cast<int>(i));
  }

  // Leaf ranges and chance reach.
  g.leaf_lo.assign(g.nodes.size(), 0);
  g.leaf_hi.assign(g.nodes.size(), 0);
  g.chance_reach.assign(g.nodes.size(), Rational(1));
  g.chance_reach_d.assign(g.nodes.size(), 1.0);
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const GameNode& n = g.nodes[i];
    if (n.kind == NodeKind::leaf) {
      g.leaf_lo[i] = static_cast<int>(g.leaves.size());
      g.leaves.push_back(static_cast<int>(i));
      g.leaf_hi[i] = static_cast<int>(g.leaves.size());
      if (n.depth != g.max_depth) throw GameError("internal error: ragged leaf depth");
    }
    if (n.kind == NodeKind::chance) {
      for (const auto& a : n.actions) {
        g.chance_reach[a.child] = g.chance_reach[i] * a.prob;
        g.chance_reach_d[a.child] = g.chance_reach[a.child].to_double();
      }
    } else {
      for (const auto& a : n.actions) {
        g.chance_reach[a.child] = g.chance_reach[i];
        g.chance_reach_d[a.child] = g.chance_reach_d[i];
      }
    }
  }
  // leaf ranges for internal nodes: subtree is contiguous, so scan backwards
  for (int i = static_cast<int>(g.nodes.size()) - 1; i >= 0; --i) {
    if (g.nodes[i].kind == NodeKind::leaf) continue;
    g.leaf_lo[i] = g.leaf_lo[i + 1];  // first node of subtree after i
    int last = g.subtree_hi[i] - 1;
    g.leaf_hi[i] = g.leaf_hi[last];
  }
  return g;
}

namespace {

// Collects (tag,label) items along root -> s. `stop_above`: only emit items
// strictly below that node (but include the action taken at it).
std::vector<SeqItem> sequence_impl(const GameTree& game, int s, SeqFilter filter, int player,
                                   const std::vector<int>* remap, int from) {
  std::vector<SeqItem> rev;
  int cur = s;
  while (true) {
    int par = game.nodes[cur].parent;
    if (par == -1) break;
    const GameNode& pn = game.nodes[par];
    if (!pn.padding) {
      bool include = false;
      bool is_chance = pn.kind == NodeKind::chance;
      int owner = pn.owner;
      switch (filter) {
        case SeqFilter::all: include = true; break;
        case SeqFilter::exclude_player: include = is_chance || owner != player; break;
        case SeqFilter::only_player: include = !is_chance && owner == player; break;
        case SeqFilter::others_no_chance: include = !is_chance && owner != player; break;
        case SeqFilter::no_chance: include = !is_chance; break;
      }
      if (include) {
        int tag = -2;
        if (!is_chance) {
          tag = pn.infoset;
          if (remap) tag = (*remap)[tag];
        }
        const GameAction* act = nullptr;
        for (const auto& a : pn.actions)
          if (a.child == cur) {
            act = &a;
            break;
          }
        rev.push_back(SeqItem{tag, act->label});
      }
    }
    if (par == from) break;
    cur = par;
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

}  // namespace

std::vector<SeqItem> action_sequence(const GameTree& game, int s, SeqFilter filter, int player,
                                     const std::vector<int>* remap) {
  return sequence_impl(game, s, filter, player, remap, -1);
}

std::vector<SeqItem> action_sequence_between(const GameTree& game, int from, int s,
                                             SeqFilter filter, int player,
                                             const std::vector<int>* remap) {
  return sequence_impl(game, s, filter, player, remap, from);
}

std::string sequence_key(const std::vector<SeqItem>& seq) {
  std::string out;
  for (const auto& it : seq) {
    out += std::to_string(it.tag);
    out += ':';
    out += it.label;
    out += '\x1f';
  }
  return out;
}

std::string chance_label_key(const GameTree& game, int s) {
  std::string out;
  std::vector<const std::string*> rev;
  int cur = s;
  while (true) {
    int par = game.nodes[cur].parent;
    if (par == -1) break;
    const GameNode& pn = game.nodes[par];
    if (pn.kind == NodeKind::chance && !pn.padding) {
      for (const auto& a : pn.actions)
        if (a.child == cur) {
          rev.push_back(&a.label);
          break;
        }
    }
    cur = par;
  }
  std::string key;
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    key += **it;
    key += '\x1f';
  }
  return key;
}

std::string chance_label_key_between(const GameTree& game, int from, int s) {
  std::vector<const std::string*> rev;
  int cur = s;
  while (cur != from) {
    int par = game.nodes[cur].parent;
    const GameNode& pn = game.nodes[par];
    if (pn.kind == NodeKind::chance && !pn.padding) {
      for (const auto& a : pn.actions)
        if (a.child == cur) {
          rev.push_back(&a.label);
          break;
        }
    }
    cur = par;
  }
  std::string key;
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    key += **it;
    key += '\x1f';
  }
  return key;
}

std::optional<RecallViolation> find_recall_violation(const GameTree& game) {
  for (int is = 0; is < game.num_infosets(); ++is) {
    const GameInfoset& I = game.infosets[is];
    if (I.members.size() < 2) continue;
    std::string first = sequence_key(
        action_sequence(game, I.members[0], SeqFilter::only_player, I.owner));
    for (size_t m = 1; m < I.members.size(); ++m) {
      std::string key = sequence_key(
          action_sequence(game, I.members[m], SeqFilter::only_player, I.owner));
      if (key != first) return RecallViolation{is, I.members[0], I.members[m]};
    }
  }
  return std::nullopt;
}

bool is_perfect_recall(const GameTree& game) { return !find_recall_violation(game).has_value(); }

bool infoset_has_perfect_recall(const GameTree& game, int is) {
  const GameInfoset& I = game.infosets[is];
  if (I.members.size() < 2) return true;
  std::string first =
      sequence_key(action_sequence(game, I.members[0], SeqFilter::only_player, I.owner));
  for (size_t m = 1; m < I.members.size(); ++m)
    if (sequence_key(action_sequence(game, I.members[m], SeqFilter::only_player, I.owner)) !=
        first)
      return false;
  return true;
}

}  // namespace efg
