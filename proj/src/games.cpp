#include "efg/games.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <functional>
#include <random>
#include <unordered_set>

#include "efg/values.hpp"

namespace efg {

namespace {

std::string two_digits(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

}  // namespace

Rational cdrp_pair_probability(int sides, const Rational& c, int v1, int v2) {
  Rational base(1, static_cast<std::int64_t>(sides) * sides);
  Rational q = base - c * Rational(std::abs(v1 - v2), sides);
  if (v1 == v2) {
    // mass removed off the diagonal, returned equally to the diagonal cells
    q += c * Rational(static_cast<std::int64_t>(sides) * sides - 1, 3LL * sides);
  }
  return q;
}

GameTree make_drp(const DrpSpec& spec, DrpRound2Info* info) { return make_cdrp(spec, info); }

GameTree make_cdrp(const DrpSpec& spec, DrpRound2Info* info) {
  if (spec.sides < 2) throw GameError("die needs at least two sides");
  if (spec.correlation.is_negative()) throw GameError("correlation must be non-negative");
  int s = spec.sides;
  if (cdrp_pair_probability(s, spec.correlation, 1, s).is_negative())
    throw GameError("correlation too large: negative pair probability");

  std::string name = spec.correlation.is_zero()
                         ? "drp" + std::to_string(s)
                         : "cdrp" + std::to_string(s) + "_" + std::to_string(spec.correlation.num()) +
                               "_" + std::to_string(spec.correlation.den());
  GameBuilder b(name, 2);
  std::vector<std::pair<std::string, DrpRound2Info::Entry>> round2_meta;
  std::unordered_set<std::string> round2_seen;

  auto pair_prob = [&](int v1, int v2) {
    return cdrp_pair_probability(s, spec.correlation, v1, v2);
  };

  // One betting round. Lines that fold become leaves here; lines that close
  // with matched commitments invoke `close(closing node, closing label,
  // closed sequence, commitment)`.
  auto run_betting = [&](const std::string& prefix, int round, int r1p1, int r1p2, int r2p1,
                         int r2p2, const std::string& b1seq, int commit_in, auto&& close) {
    int raise_size = round == 1 ? DrpSpec::raise_round1 : DrpSpec::raise_round2;
    struct St {
      std::string seq;
      int to_act;
      bool pending;
      int raises;
      int commit[2];
    };
    std::function<void(St)> walk = [&](St st) {
      std::string node_id = prefix + "[" + st.seq + "]";
      std::string iid;
      if (round == 1) {
        int own = st.to_act == 0 ? r1p1 : r1p2;
        iid = "p" + std::to_string(st.to_act + 1) + ":r1=" + two_digits(own) + ":b1=" + st.seq;
      } else {
        int own1 = st.to_act == 0 ? r1p1 : r1p2;
        int own2 = st.to_act == 0 ? r2p1 : r2p2;
        iid = "p" + std::to_string(st.to_act + 1) + ":r1=" + two_digits(own1) +
              ":r2=" + two_digits(own2) + ":b1=" + b1seq + ":b2=" + st.seq;
        if (info && round2_seen.insert(iid).second) {
          DrpRound2Info::Entry e;
          e.player = st.to_act;
          e.own1 = own1;
          e.own2 = own2;
          e.context = "p" + std::to_string(st.to_act + 1) + ":b1=" + b1seq + ":b2=" + st.seq;
          round2_meta.emplace_back(iid, e);
        }
      }
      b.add_decision(node_id, st.to_act, iid);

      int me = st.to_act, other = 1 - me;
      if (st.pending) {  // folding is only possible against a raise
        std::string leaf = node_id + "f";
        std::vector<Rational> u(2);
        u[me] = Rational(-st.commit[me]);
        u[other] = Rational(st.commit[me]);
        b.add_leaf(leaf, std::move(u));
        b.add_edge(node_id, "fold", leaf);
      }
      {
        St nst = st;
        nst.commit[me] = st.commit[other];
        if (!st.seq.empty()) {  // a responding call/check closes the round
          close(node_id, "call", st.seq + "c", nst.commit[0]);
        } else {
          nst.seq += 'c';
          nst.to_act = other;
          nst.pending = false;
          walk(nst);
          b.add_edge(node_id, "call", prefix + "[" + nst.seq + "]");
        }
      }
      if (st.raises < DrpSpec::max_raises) {
        St nst = st;
        nst.commit[me] = st.commit[other] + raise_size;
        nst.seq += 'r';
        nst.to_act = other;
        nst.pending = true;
        nst.raises = st.raises + 1;
        walk(nst);
        b.add_edge(node_id, "raise", prefix + "[" + nst.seq + "]");
      }
    };
    walk(St{"", 0, false, 0, {commit_in, commit_in}});
  };

  b.add_chance("deal1");
  for (int v1 = 1; v1 <= s; ++v1) {
    for (int v2 = 1; v2 <= s; ++v2) {
      std::string d1 = two_digits(v1) + "_" + two_digits(v2);
      std::string p1 = "d[" + d1 + "]";
      run_betting(p1 + "b1", 1, v1, v2, 0, 0, "", DrpSpec::ante,
                  [&](const std::string& closing, const std::string& label,
                      const std::string& b1seq, int commit) {
                    std::string deal2 = p1 + "b1=" + b1seq + ":deal2";
                    b.add_chance(deal2);
                    b.add_edge(closing, label, deal2);
                    for (int v3 = 1; v3 <= s; ++v3) {
                      for (int v4 = 1; v4 <= s; ++v4) {
                        std::string d2 = two_digits(v3) + "_" + two_digits(v4);
                        std::string p2 = p1 + "b1=" + b1seq + ":d[" + d2 + "]";
                        run_betting(p2 + "b2", 2, v1, v2, v3, v4, b1seq, commit,
                                    [&](const std::string& closing2, const std::string& label2,
                                        const std::string&, int commit2) {
                                      std::string leaf = closing2 + "s";
                                      int sum1 = v1 + v3, sum2 = v2 + v4;
                                      std::vector<Rational> u(2);
                                      if (sum1 > sum2) {
                                        u[0] = Rational(commit2);
                                        u[1] = Rational(-commit2);
                                      } else if (sum2 > sum1) {
                                        u[0] = Rational(-commit2);
                                        u[1] = Rational(commit2);
                                      }
                                      b.add_leaf(leaf, std::move(u));
                                      b.add_edge(closing2, label2, leaf);
                                    });
                        b.add_edge(deal2, d2, p2 + "b2[]", pair_prob(v3, v4));
                      }
                    }
                  });
      b.add_edge("deal1", d1, p1 + "b1[]", pair_prob(v1, v2));
    }
  }

  GameTree g = b.finalize();
  if (info) {
    for (const auto& [iid, e] : round2_meta) info->by_infoset[g.infoset_index.at(iid)] = e;
  }
  return g;
}

MergeExample make_merge_example() {
  GameBuilder b("merge_example", 2);
  b.add_chance("root");
  auto subtree = [&](const std::string& tag, const Rational& pa0, const Rational& pa1,
                     int b_last_payoff) {
    std::string p2 = "s" + tag;
    b.add_decision(p2, 1, "p2" + tag);
    for (std::string act : {"a", "b"}) {
      std::string ch = p2 + act;
      b.add_chance(ch);
      b.add_edge(p2, act, ch);
      bool is_a = act == "a";
      Rational px = is_a ? pa0 : Rational(1, 2);
      Rational py = is_a ? pa1 : Rational(1, 2);
      std::string l1 = is_a ? "l" : "L";
      std::string l2 = is_a ? "r" : "R";
      for (int m = 0; m < 2; ++m) {
        std::string p1 = ch + (m == 0 ? "x" : "y");
        b.add_decision(p1, 0, "p1" + tag + act);
        b.add_edge(ch, m == 0 ? "x" : "y", p1, m == 0 ? px : py);
        int left_val = m == 0 ? 10 : 0;
        int right_val = m == 0 ? 0 : (is_a ? 10 : b_last_payoff);
        std::string zl = p1 + "_" + l1;
        std::string zr = p1 + "_" + l2;
        b.add_leaf(zl, {Rational(left_val), Rational(left_val)});
        b.add_leaf(zr, {Rational(right_val), Rational(right_val)});
        b.add_edge(p1, l1, zl);
        b.add_edge(p1, l2, zr);
      }
    }
  };
  subtree("L", Rational(1, 2), Rational(1, 2), 9);
  subtree("R", Rational(2, 5), Rational(3, 5), 10);
  b.add_edge("root", "L", "sL", Rational(1, 2));
  b.add_edge("root", "R", "sR", Rational(1, 2));

  MergeExample ex{b.finalize(), {}};
  ex.map = AbstractionMap::from_classes(
      ex.game, {{"p2", {"p2L", "p2R"}}, {"p1a", {"p1La", "p1Ra"}}, {"p1b", {"p1Lb", "p1Rb"}}});
  auto at = [&](const char* id) { return ex.game.infoset_index.at(id); };
  ex.map.set_delta(at("p2L"), at("p2R"), 1.0);
  ex.map.set_delta(at("p1La"), at("p1Ra"), 1.0);
  ex.map.set_delta(at("p1Lb"), at("p1Rb"), 1.0);
  return ex;
}

RandomGame make_random_game(const RandomGameSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  GameBuilder b("random" + std::to_string(spec.seed), 2);
  b.add_decision("root", 1, "root");

  RandomGame out;
  std::vector<std::vector<std::string>> group_ids(spec.groups);
  int leaves_per_action = spec.below_chance ? 2 : 1;

  for (int g = 0; g < spec.groups; ++g) {
    std::string sel = "g" + std::to_string(g);
    b.add_chance(sel);
    b.add_edge("root", "go" + std::to_string(g), sel);

    // base pattern shared by the group's clones
    std::vector<int> base_weight(spec.set_nodes);
    for (int& w : base_weight) w = uni(1, 6);
    std::vector<std::vector<std::vector<std::array<int, 2>>>> base_util(spec.set_nodes);
    std::vector<std::vector<int>> below_weight(spec.set_nodes);
    for (int m = 0; m < spec.set_nodes; ++m) {
      base_util[m].resize(spec.actions);
      below_weight[m].assign(spec.actions, 0);
      for (int a = 0; a < spec.actions; ++a) {
        base_util[m][a].resize(leaves_per_action);
        for (int o = 0; o < leaves_per_action; ++o)
          base_util[m][a][o] = {uni(0, spec.util_base_max), uni(0, spec.util_base_max)};
        below_weight[m][a] = uni(1, 6);
      }
    }

    std::vector<int> sel_weight(spec.group_size);
    int sel_total = 0;
    for (int& w : sel_weight) {
      w = uni(1, 6);
      sel_total += w;
    }

    for (int t = 0; t < spec.group_size; ++t) {
      std::string mem = sel + "t" + std::to_string(t);
      b.add_chance(mem);
      b.add_edge(sel, "t" + std::to_string(t), mem, Rational(sel_weight[t], sel_total));

      std::string iid = "I" + std::to_string(g) + "_" + std::to_string(t);
      group_ids[g].push_back(iid);

      std::vector<int> w(spec.set_nodes);
      int wtot = 0;
      for (int m = 0; m < spec.set_nodes; ++m) {
        w[m] = std::max(1, base_weight[m] + uni(-spec.prob_jitter, spec.prob_jitter));
        wtot += w[m];
      }
      for (int m = 0; m < spec.set_nodes; ++m) {
        std::string dec = mem + "m" + std::to_string(m);
        b.add_decision(dec, 0, iid);
        b.add_edge(mem, "m" + std::to_string(m), dec, Rational(w[m], wtot));
        for (int a = 0; a < spec.actions; ++a) {
          std::string alabel = "a" + std::to_string(a);
          auto leaf_util = [&](int o) {
            std::array<Rational, 2> u;
            for (int p = 0; p < 2; ++p) {
              Rational v = Rational(base_util[m][a][o][p]) +
                           Rational(uni(-spec.util_jitter, spec.util_jitter), 20);
              if (p == 0 && a == 0 && spec.dominant_first_action) v += Rational(20);
              if (v.is_negative()) v = Rational(0);
              u[p] = v;
            }
            return u;
          };
          if (spec.below_chance) {
            std::string ch = dec + alabel;
            b.add_chance(ch);
            b.add_edge(dec, alabel, ch);
            int bw = std::max(1, below_weight[m][a] + uni(-spec.prob_jitter, spec.prob_jitter));
            int btot = bw + 6;
            for (int o = 0; o < 2; ++o) {
              std::string z = ch + "o" + std::to_string(o);
              auto u = leaf_util(o);
              b.add_leaf(z, {u[0], u[1]});
              b.add_edge(ch, "o" + std::to_string(o), z,
                         o == 0 ? Rational(bw, btot) : Rational(6, btot));
            }
          } else {
            std::string z = dec + alabel + "z";
            auto u = leaf_util(0);
            b.add_leaf(z, {u[0], u[1]});
            b.add_edge(dec, alabel, z);
          }
        }
      }
    }
  }

  out.game = b.finalize();
  for (int g = 0; g < spec.groups; ++g) {
    std::vector<int> idxs;
    for (const auto& id : group_ids[g]) idxs.push_back(out.game.infoset_index.at(id));
    out.candidate_groups.push_back(std::move(idxs));
  }
  return out;
}

StrategyProfile dominant_equilibrium(const GameTree& abstract_game) {
  StrategyProfile s = StrategyProfile::uniform(abstract_game);
  for (int i = 0; i < abstract_game.num_infosets(); ++i) {
    if (abstract_game.infosets[i].owner != 0) continue;
    auto& row = s[i];
    std::fill(row.begin(), row.end(), 0.0);
    row[0] = 1.0;
  }
  for (int i = 0; i < abstract_game.num_infosets(); ++i) {
    if (abstract_game.infosets[i].owner != 1) continue;
    auto values = node_values(abstract_game, s, 1);
    const GameInfoset& is = abstract_game.infosets[i];
    int best = 0;
    double bq = -std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < is.labels.size(); ++a) {
      double q = 0.0;
      for (int m : is.members)
        q += abstract_game.chance_reach_d[m] * values[abstract_game.nodes[m].actions[a].child];
      if (q > bq) {
        bq = q;
        best = static_cast<int>(a);
      }
    }
    auto& row = s[i];
    std::fill(row.begin(), row.end(), 0.0);
    row[best] = 1.0;
  }
  return s;
}

StrategyProfile always_fold_profile(const GameTree& game) {
  StrategyProfile s = StrategyProfile::uniform(game);
  for (int i = 0; i < game.num_infosets(); ++i) {
    const auto& labels = game.infosets[i].labels;
    int pick = -1;
    for (size_t a = 0; a < labels.size(); ++a)
      if (labels[a] == "fold") pick = static_cast<int>(a);
    if (pick == -1)
      for (size_t a = 0; a < labels.size(); ++a)
        if (labels[a] == "call") pick = static_cast<int>(a);
    if (pick == -1) continue;
    auto& row = s[i];
    std::fill(row.begin(), row.end(), 0.0);
    row[pick] = 1.0;
  }
  return s;
}

}  // namespace efg
