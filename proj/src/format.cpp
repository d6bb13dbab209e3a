#include "efg/format.hpp"

#include <sstream>
#include <vector>

namespace efg {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) {
    if (tok[0] == '#') break;
    out.push_back(tok);
  }
  return out;
}

// "key=value" -> value, or throw
std::string expect_kv(const std::string& tok, const std::string& key, int line) {
  if (tok.size() <= key.size() + 1 || tok.compare(0, key.size(), key) != 0 ||
      tok[key.size()] != '=')
    throw ParseError(line, "expected " + key + "=..., got '" + tok + "'");
  return tok.substr(key.size() + 1);
}

}  // namespace

GameTree parse_game(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  std::string name;
  int players = -1;
  struct Pending {
    int line;
    std::vector<std::string> toks;
  };
  std::vector<Pending> body;

  while (std::getline(in, line)) {
    ++lineno;
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "game") {
      if (players != -1) throw ParseError(lineno, "duplicate game header");
      if (toks.size() != 3) throw ParseError(lineno, "game header needs: game <name> players=<N>");
      name = toks[1];
      try {
        players = std::stoi(expect_kv(toks[2], "players", lineno));
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception&) {
        throw ParseError(lineno, "bad player count");
      }
      if (players < 1) throw ParseError(lineno, "bad player count");
      continue;
    }
    body.push_back(Pending{lineno, std::move(toks)});
  }
  if (players == -1) throw ParseError(lineno ? 1 : 0, "missing game header");

  GameBuilder b(name, players);
  auto wrap = [](int line, auto&& fn) {
    try {
      fn();
    } catch (const GameError& e) {
      throw ParseError(line, e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(line, e.what());
    }
  };

  for (const auto& p : body) {
    const auto& t = p.toks;
    if (t[0] == "node") {
      if (t.size() < 3) throw ParseError(p.line, "node needs: node <id> owner=... [infoset=...]");
      std::string owner = expect_kv(t[2], "owner", p.line);
      if (owner == "chance") {
        wrap(p.line, [&] { b.add_chance(t[1]); });
      } else {
        if (owner.size() < 2 || owner[0] != 'p')
          throw ParseError(p.line, "owner must be chance or p<k>");
        int idx = 0;
        try {
          idx = std::stoi(owner.substr(1));
        } catch (const std::exception&) {
          throw ParseError(p.line, "owner must be chance or p<k>");
        }
        if (idx < 1 || idx > players) throw ParseError(p.line, "player index out of range");
        if (t.size() != 4) throw ParseError(p.line, "player node needs infoset=<iid>");
        std::string iid = expect_kv(t[3], "infoset", p.line);
        wrap(p.line, [&] { b.add_decision(t[1], idx - 1, iid); });
      }
    } else if (t[0] == "edge") {
      if (t.size() != 4 && t.size() != 5)
        throw ParseError(p.line, "edge needs: edge <parent> <label> <child> [prob=n/d]");
      std::optional<Rational> prob;
      if (t.size() == 5) {
        wrap(p.line, [&] { prob = Rational::parse(expect_kv(t[4], "prob", p.line)); });
        if (prob->is_negative()) throw ParseError(p.line, "negative probability");
      }
      wrap(p.line, [&] { b.add_edge(t[1], t[2], t[3], prob); });
    } else if (t[0] == "leaf") {
      if (t.size() != 3) throw ParseError(p.line, "leaf needs: leaf <id> utils=<q1>,<q2>,...");
      std::string utils = expect_kv(t[2], "utils", p.line);
      std::vector<Rational> u;
      std::string cur;
      std::istringstream us(utils);
      while (std::getline(us, cur, ',')) {
        wrap(p.line, [&] { u.push_back(Rational::parse(cur)); });
      }
      wrap(p.line, [&] { b.add_leaf(t[1], std::move(u)); });
    } else {
      throw ParseError(p.line, "unknown directive '" + t[0] + "'");
    }
  }

  try {
    return b.finalize();
  } catch (const GameError& e) {
    throw ParseError(lineno, e.what());
  }
}

std::string emit_game(const GameTree& game) {
  std::ostringstream out;
  out << "game " << game.name << " players=" << game.num_players << "\n";
  // Skip padding chains: an edge into a padding node is re-targeted to the
  // leaf at the end of the chain.
  auto skip_pads = [&](int s) {
    while (game.nodes[s].padding) s = game.nodes[s].actions[0].child;
    return s;
  };
  for (size_t i = 0; i < game.nodes.size(); ++i) {
    const GameNode& n = game.nodes[i];
    if (n.padding) continue;
    if (n.kind == NodeKind::leaf) continue;
    if (n.kind == NodeKind::chance) {
      out << "node " << game.node_ids[i] << " owner=chance\n";
    } else {
      out << "node " << game.node_ids[i] << " owner=p" << n.owner + 1
          << " infoset=" << game.infosets[n.infoset].id << "\n";
    }
  }
  for (size_t i = 0; i < game.nodes.size(); ++i) {
    const GameNode& n = game.nodes[i];
    if (n.padding || n.kind != NodeKind::leaf) continue;
    out << "leaf " << game.node_ids[i] << " utils=";
    for (size_t p = 0; p < n.utils.size(); ++p) {
      if (p) out << ",";
      out << n.utils[p].str();
    }
    out << "\n";
  }
  for (size_t i = 0; i < game.nodes.size(); ++i) {
    const GameNode& n = game.nodes[i];
    if (n.padding || n.kind == NodeKind::leaf) continue;
    for (const auto& a : n.actions) {
      int child = skip_pads(a.child);
      out << "edge " << game.node_ids[i] << " " << a.label << " " << game.node_ids[child];
      if (n.kind == NodeKind::chance) out << " prob=" << a.prob.str();
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace efg
