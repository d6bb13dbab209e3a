#include "efg/strategy.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace efg {

StrategyProfile StrategyProfile::uniform(const GameTree& game) {
  StrategyProfile s(game);
  for (int i = 0; i < game.num_infosets(); ++i) {
    size_t n = game.infosets[i].labels.size();
    for (size_t a = 0; a < n; ++a) s.rows_[i][a] = 1.0 / static_cast<double>(n);
  }
  return s;
}

void StrategyProfile::validate(const GameTree& game, double tol) const {
  if (rows_.size() != static_cast<size_t>(game.num_infosets()))
    throw GameError("strategy profile does not cover every information set");
  for (int i = 0; i < game.num_infosets(); ++i) {
    if (rows_[i].size() != game.infosets[i].labels.size())
      throw GameError("strategy row size mismatch at infoset '" + game.infosets[i].id + "'");
    double sum = 0.0;
    for (double p : rows_[i]) {
      if (p < -tol || p > 1.0 + tol)
        throw GameError("probability out of range at infoset '" + game.infosets[i].id + "'");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > tol)
      throw GameError("distribution at infoset '" + game.infosets[i].id + "' sums to " +
                      std::to_string(sum));
  }
}

std::string strategy_to_csv(const GameTree& game, const StrategyProfile& sigma) {
  std::string out = "infoset_id,action_label,probability\n";
  char buf[64];
  for (int i = 0; i < game.num_infosets(); ++i) {
    const GameInfoset& is = game.infosets[i];
    for (size_t a = 0; a < is.labels.size(); ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", sigma[i][a]);
      out += is.id;
      out += ',';
      out += is.labels[a];
      out += ',';
      out += buf;
      out += '\n';
    }
  }
  return out;
}

StrategyProfile strategy_from_csv(const GameTree& game, const std::string& csv) {
  StrategyProfile s(game);
  std::istringstream in(csv);
  std::string line;
  bool first = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("infoset_id", 0) == 0) continue;
    }
    auto c1 = line.find(',');
    auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw GameError("bad strategy csv at line " + std::to_string(lineno));
    std::string iid = line.substr(0, c1);
    std::string label = line.substr(c1 + 1, c2 - c1 - 1);
    double prob = std::strtod(line.c_str() + c2 + 1, nullptr);
    auto it = game.infoset_index.find(iid);
    if (it == game.infoset_index.end())
      throw GameError("strategy csv references unknown infoset '" + iid + "'");
    const GameInfoset& is = game.infosets[it->second];
    bool found = false;
    for (size_t a = 0; a < is.labels.size(); ++a) {
      if (is.labels[a] == label) {
        s[it->second][a] = prob;
        found = true;
        break;
      }
    }
    if (!found)
      throw GameError("strategy csv references unknown action '" + label + "' at '" + iid + "'");
  }
  s.validate(game);
  return s;
}

double ReachTable::infoset_reach(const GameTree& game, int is) const {
  double sum = 0.0;
  for (int s : game.infosets[is].members) sum += reach(s);
  return sum;
}

double ReachTable::infoset_reach_excluding(const GameTree& game, int is, int player) const {
  double sum = 0.0;
  for (int s : game.infosets[is].members) sum += reach_excluding(s, player);
  return sum;
}

ReachTable compute_reach(const GameTree& game, const StrategyProfile& sigma) {
  sigma.validate(game);
  ReachTable rt;
  rt.players = game.num_players;
  size_t n = game.nodes.size();
  rt.chance.assign(n, 1.0);
  rt.own.assign(game.num_players, std::vector<double>(n, 1.0));
  for (size_t s = 0; s < n; ++s) {
    const GameNode& nd = game.nodes[s];
    for (size_t a = 0; a < nd.actions.size(); ++a) {
      int c = nd.actions[a].child;
      rt.chance[c] = rt.chance[s];
      for (int p = 0; p < game.num_players; ++p) rt.own[p][c] = rt.own[p][s];
      if (nd.kind == NodeKind::chance) {
        rt.chance[c] *= nd.actions[a].prob.to_double();
      } else {
        rt.own[nd.owner][c] *= sigma[nd.infoset][a];
      }
    }
  }
  return rt;
}

}  // namespace efg
