#pragma once

#include <string>

#include "efg/game.hpp"

namespace efg {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
};

// Line-oriented EFG document:
//   game <name> players=<N>
//   node <id> owner=<p1|p2|...|chance> infoset=<iid>   (infoset= omitted for chance)
//   edge <parent> <label> <child> [prob=<num>/<den>]
//   leaf <id> utils=<q1>,<q2>,...
// '#' starts a comment. The root is the unique node that is never a child.
GameTree parse_game(const std::string& text);

// Inverse of parse_game. Padding chance nodes are elided; the parser
// re-inserts them, so parse_game(emit_game(g)) reproduces g exactly.
// Emitted utilities are the stored (already shifted) values.
std::string emit_game(const GameTree& game);

}  // namespace efg
