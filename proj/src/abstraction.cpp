#include "efg/abstraction.hpp"

#include <sstream>

namespace efg {

AbstractionMap AbstractionMap::identity(const GameTree& game) {
  AbstractionMap m;
  m.abstract_of.resize(game.num_infosets());
  for (int i = 0; i < game.num_infosets(); ++i) {
    m.abstract_of[i] = i;
    m.class_ids.push_back(game.infosets[i].id);
    m.members.push_back({i});
  }
  return m;
}

AbstractionMap AbstractionMap::from_classes(
    const GameTree& game,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& classes) {
  AbstractionMap m;
  m.abstract_of.assign(game.num_infosets(), -1);
  for (const auto& [cid, ids] : classes) {
    int ci = static_cast<int>(m.class_ids.size());
    m.class_ids.push_back(cid);
    m.members.emplace_back();
    for (const auto& iid : ids) {
      auto it = game.infoset_index.find(iid);
      if (it == game.infoset_index.end())
        throw GameError("abstraction references unknown infoset '" + iid + "'");
      if (m.abstract_of[it->second] != -1)
        throw GameError("infoset '" + iid + "' appears in two classes");
      m.abstract_of[it->second] = ci;
      m.members.back().push_back(it->second);
    }
  }
  for (int i = 0; i < game.num_infosets(); ++i) {
    if (m.abstract_of[i] != -1) continue;
    int ci = static_cast<int>(m.class_ids.size());
    m.class_ids.push_back(game.infosets[i].id);
    m.members.push_back({i});
    m.abstract_of[i] = ci;
  }
  return m;
}

bool AbstractionMap::is_identity() const {
  for (const auto& ms : members)
    if (ms.size() != 1) return false;
  return true;
}

void AbstractionMap::set_delta(int I, int J, double d) {
  if (d <= 0.0) throw GameError("scaling factor must be positive");
  delta[{I, J}] = d;
  delta[{J, I}] = 1.0 / d;
  delta[{I, I}] = 1.0;
  delta[{J, J}] = 1.0;
}

AbstractionMap load_abstraction(const GameTree& game, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::string, std::vector<std::string>>> classes;
  std::vector<std::tuple<std::string, std::string, Rational>> deltas;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> toks;
    while (ls >> tok) {
      if (tok[0] == '#') break;
      toks.push_back(tok);
    }
    if (toks.empty()) continue;
    if (toks[0] == "merge") {
      // merge <class-id> = <iid>,<iid>,...
      if (toks.size() != 4 || toks[2] != "=")
        throw GameError("line " + std::to_string(lineno) +
                        ": merge needs: merge <class-id> = <iid>,<iid>,...");
      std::vector<std::string> ids;
      std::istringstream ms(toks[3]);
      std::string id;
      while (std::getline(ms, id, ',')) ids.push_back(id);
      classes.emplace_back(toks[1], std::move(ids));
    } else if (toks[0] == "delta") {
      if (toks.size() != 5 || toks[3] != "=")
        throw GameError("line " + std::to_string(lineno) +
                        ": delta needs: delta <iid-a> <iid-b> = <num>/<den>");
      deltas.emplace_back(toks[1], toks[2], Rational::parse(toks[4]));
    } else {
      throw GameError("line " + std::to_string(lineno) + ": unknown directive '" + toks[0] + "'");
    }
  }
  AbstractionMap m = AbstractionMap::from_classes(game, classes);
  for (const auto& [a, b, r] : deltas) {
    auto ia = game.infoset_index.find(a);
    auto ib = game.infoset_index.find(b);
    if (ia == game.infoset_index.end() || ib == game.infoset_index.end())
      throw GameError("delta references unknown infoset");
    m.set_delta(ia->second, ib->second, r.to_double());
  }
  return m;
}

std::string save_abstraction(const GameTree& game, const AbstractionMap& map) {
  std::ostringstream out;
  for (int c = 0; c < map.num_classes(); ++c) {
    if (map.members[c].size() < 2) continue;
    out << "merge " << map.class_ids[c] << " =";
    std::string sep = " ";
    for (int i : map.members[c]) {
      out << sep << game.infosets[i].id;
      sep = ",";
    }
    out << "\n";
  }
  return out.str();
}

RefinementCheck check_refinement(const GameTree& game, const AbstractionMap& map) {
  if (map.abstract_of.size() != static_cast<size_t>(game.num_infosets()))
    return {false, "partition does not cover the game's information sets", -1};
  for (int c = 0; c < map.num_classes(); ++c) {
    const auto& ms = map.members[c];
    if (ms.empty()) return {false, "empty class '" + map.class_ids[c] + "'", c};
    const GameInfoset& first = game.infosets[ms[0]];
    for (int i : ms) {
      const GameInfoset& is = game.infosets[i];
      if (is.owner != first.owner)
        return {false, "class '" + map.class_ids[c] + "' mixes owners", c};
      if (is.labels != first.labels)
        return {false,
                "class '" + map.class_ids[c] + "' merges sets with different action labels ('" +
                    first.id + "' vs '" + is.id + "')",
                c};
    }
  }
  return {};
}

GameTree apply_abstraction(const GameTree& game, const AbstractionMap& map) {
  RefinementCheck rc = check_refinement(game, map);
  if (!rc.ok) throw GameError("not an information-set merge abstraction: " + rc.reason);
  GameTree g = game;
  g.infosets.clear();
  g.infoset_index.clear();
  g.infosets.resize(map.num_classes());
  for (int c = 0; c < map.num_classes(); ++c) {
    GameInfoset& is = g.infosets[c];
    is.id = map.class_ids[c];
    is.owner = game.infosets[map.members[c][0]].owner;
    is.labels = game.infosets[map.members[c][0]].labels;
    g.infoset_index[is.id] = c;
  }
  for (size_t s = 0; s < g.nodes.size(); ++s) {
    GameNode& n = g.nodes[s];
    if (n.kind != NodeKind::decision) continue;
    n.infoset = map.abstract_of[n.infoset];
    g.infosets[n.infoset].members.push_back(static_cast<int>(s));
  }
  return g;
}

StrategyProfile lift_strategy(const GameTree& abstract_game, const StrategyProfile& abstract_sigma,
                              const GameTree& original, const AbstractionMap& map) {
  abstract_sigma.validate(abstract_game);
  StrategyProfile out(original);
  for (int i = 0; i < original.num_infosets(); ++i) {
    int c = map.abstract_of[i];
    auto it = abstract_game.infoset_index.find(map.class_ids[c]);
    if (it == abstract_game.infoset_index.end())
      throw GameError("abstract game lacks class '" + map.class_ids[c] + "'");
    const GameInfoset& ais = abstract_game.infosets[it->second];
    if (ais.labels != original.infosets[i].labels)
      throw GameError("action labels at '" + original.infosets[i].id +
                      "' do not match its class");
    out[i] = abstract_sigma[it->second];
  }
  return out;
}

}  // namespace efg
