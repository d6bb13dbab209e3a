#include "efg/merge_errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

namespace efg {

namespace {

struct LeafEntry {
  std::string group;    // matching key
  std::string sortkey;  // full chance label sequence
  int leaf = -1;
  int member_pos = -1;
};

std::vector<LeafEntry> collect_side(const GameTree& game, const AbstractionMap& context, int is,
                                    FutureTags tags) {
  const GameInfoset& I = game.infosets[is];
  int player = I.owner;
  const std::vector<int>* remap = &context.abstract_of;
  std::vector<LeafEntry> out;
  for (size_t m = 0; m < I.members.size(); ++m) {
    int s = I.members[m];
    for (int li = game.leaf_lo[s]; li < game.leaf_hi[s]; ++li) {
      int z = game.leaves[li];
      LeafEntry e;
      e.leaf = z;
      e.member_pos = static_cast<int>(m);
      auto others = action_sequence(game, z, SeqFilter::others_no_chance, player, remap);
      auto own = action_sequence_between(game, s, z, SeqFilter::only_player, player, remap);
      if (tags == FutureTags::labels_only)
        for (auto& it : own) it.tag = -3;
      e.group = sequence_key(others);
      e.group += '\x1e';
      e.group += sequence_key(own);
      e.group += '\x1e';
      e.group += chance_label_key_between(game, s, z);
      e.sortkey = chance_label_key(game, z);
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace

std::optional<LeafPairing> find_leaf_bijection(const GameTree& game,
                                               const AbstractionMap& context, int I, int J,
                                               FutureTags tags, PairingFailure* failure) {
  auto fail = [&](const std::string& why, int leaf) -> std::optional<LeafPairing> {
    if (failure) *failure = PairingFailure{why, leaf};
    return std::nullopt;
  };
  const GameInfoset& A = game.infosets[I];
  const GameInfoset& B = game.infosets[J];
  if (A.owner != B.owner) return fail("different owners", -1);
  if (A.labels != B.labels) return fail("different action labels", -1);
  if (A.members.size() != B.members.size()) return fail("different node counts", -1);

  auto side_a = collect_side(game, context, I, tags);
  auto side_b = collect_side(game, context, J, tags);
  if (side_a.size() != side_b.size()) return fail("different leaf counts", -1);

  auto order = [](const LeafEntry& x, const LeafEntry& y) {
    if (x.group != y.group) return x.group < y.group;
    if (x.sortkey != y.sortkey) return x.sortkey < y.sortkey;
    return x.leaf < y.leaf;
  };
  std::sort(side_a.begin(), side_a.end(), order);
  std::sort(side_b.begin(), side_b.end(), order);

  LeafPairing p;
  p.from = I;
  p.to = J;
  std::vector<int> partner(A.members.size(), -1);
  for (size_t i = 0; i < side_a.size(); ++i) {
    if (side_a[i].group != side_b[i].group)
      return fail("no match for leaf key (" +
                      (side_a[i].group < side_b[i].group ? game.node_ids[side_a[i].leaf]
                                                         : game.node_ids[side_b[i].leaf]) +
                      ")",
                  side_a[i].group < side_b[i].group ? side_a[i].leaf : side_b[i].leaf);
    p.leaf_pairs.emplace_back(side_a[i].leaf, side_b[i].leaf);
    int ma = side_a[i].member_pos, mb = side_b[i].member_pos;
    if (partner[ma] == -1) {
      partner[ma] = mb;
    } else if (partner[ma] != mb) {
      return fail("leaf map does not induce a node map (node '" +
                      game.node_ids[A.members[ma]] + "')",
                  side_a[i].leaf);
    }
  }
  std::vector<bool> hit(B.members.size(), false);
  for (size_t m = 0; m < partner.size(); ++m) {
    if (partner[m] == -1 || hit[partner[m]])
      return fail("node map is not a bijection", -1);
    hit[partner[m]] = true;
    p.node_pairs.emplace_back(A.members[m], B.members[partner[m]]);
  }
  return p;
}

PairErrors compute_pair_errors(const GameTree& game, const LeafPairing& pairing, double delta,
                               bool keep_leaf_detail) {
  const GameInfoset& A = game.infosets[pairing.from];
  int players = game.num_players;

  PairErrors pe;
  pe.delta = delta;
  size_t nm = A.members.size();
  pe.reward_node.assign(nm, 0.0);
  pe.transition_node.assign(nm, 0.0);
  pe.transition_raw.assign(nm, 0.0);
  pe.dist_raw.assign(nm, 0.0);
  pe.ubar.assign(nm, 0.0);
  pe.has_leaf_detail = keep_leaf_detail;

  // Leaf-level errors, indexed by leaf node on the I side.
  std::unordered_map<int, double> eps_r, eps_0;
  eps_r.reserve(pairing.leaf_pairs.size());
  eps_0.reserve(pairing.leaf_pairs.size());
  std::unordered_map<int, int> member_pos;
  for (size_t m = 0; m < nm; ++m) member_pos[A.members[m]] = static_cast<int>(m);
  std::vector<int> node_partner(nm, -1);
  for (size_t m = 0; m < nm; ++m) node_partner[m] = pairing.node_pairs[m].second;

  auto member_of = [&](int z) {
    for (int s = z; s != -1; s = game.nodes[s].parent) {
      auto it = member_pos.find(s);
      if (it != member_pos.end()) return it->second;
    }
    return -1;
  };

  for (const auto& [z, zj] : pairing.leaf_pairs) {
    double er = 0.0;
    for (int p = 0; p < players; ++p) {
      double u = game.nodes[z].utils[p].to_double();
      double v = game.nodes[zj].utils[p].to_double();
      er = std::max(er, std::fabs(u - delta * v));
    }
    int m = member_of(z);
    int sj = node_partner[m];
    int si = A.members[m];
    double p0i = (game.chance_reach[z] / game.chance_reach[si]).to_double();
    double p0j = (game.chance_reach[zj] / game.chance_reach[sj]).to_double();
    double e0 = std::fabs(p0i - p0j);
    eps_r[z] = er;
    eps_0[z] = e0;
    pe.reward_leaf_max = std::max(pe.reward_leaf_max, er);
    if (keep_leaf_detail) {
      pe.leaf_reward.push_back(er);
      pe.leaf_transition.push_back(e0);
    }
  }

  // Node distributions within the pair (chance reach, exact).
  Rational tot_i(0), tot_j(0);
  for (size_t m = 0; m < nm; ++m) {
    tot_i += game.chance_reach[A.members[m]];
    tot_j += game.chance_reach[node_partner[m]];
  }
  pe.weights_degenerate = tot_i.is_zero() || tot_j.is_zero();

  for (size_t m = 0; m < nm; ++m) {
    int s = A.members[m];
    int sj = node_partner[m];

    // reward aggregation: weighted sum at chance, max at player nodes
    std::function<double(int)> agg_r = [&](int t) -> double {
      const GameNode& n = game.nodes[t];
      if (n.kind == NodeKind::leaf) return eps_r.at(t);
      double v = 0.0;
      if (n.kind == NodeKind::chance) {
        for (const auto& a : n.actions) v += a.prob.to_double() * agg_r(a.child);
      } else {
        for (const auto& a : n.actions) v = std::max(v, agg_r(a.child));
      }
      return v;
    };
    pe.reward_node[m] = agg_r(s);

    // ubar
    double ub = 0.0;
    for (int li = game.leaf_lo[s]; li < game.leaf_hi[s]; ++li) {
      int z = game.leaves[li];
      double umax = 0.0;
      for (int p = 0; p < players; ++p)
        umax = std::max(umax, game.nodes[z].utils[p].to_double());
      ub = std::max(ub, umax + eps_r.at(z));
    }
    pe.ubar[m] = ub;

    // transition: max over player-action sequence classes of the summed leaf
    // probability errors
    std::unordered_map<std::string, double> class_sum;
    for (int li = game.leaf_lo[s]; li < game.leaf_hi[s]; ++li) {
      int z = game.leaves[li];
      auto seq = action_sequence_between(game, s, z, SeqFilter::no_chance, -1, nullptr);
      for (auto& it : seq) it.tag = -3;  // sequences are label vectors
      class_sum[sequence_key(seq)] += eps_0.at(z);
    }
    double worst = 0.0;
    for (const auto& [k, v] : class_sum) worst = std::max(worst, v);
    pe.transition_raw[m] = worst;
    pe.transition_node[m] = worst * ub;

    // distribution error
    double wi = pe.weights_degenerate ? 1.0 / static_cast<double>(nm)
                                      : (game.chance_reach[s] / tot_i).to_double();
    double wj = pe.weights_degenerate ? 1.0 / static_cast<double>(nm)
                                      : (game.chance_reach[sj] / tot_j).to_double();
    pe.dist_raw[m] = std::fabs(wi - wj);
    pe.dist_pair += pe.dist_raw[m] * ub;
  }
  return pe;
}

DeltaChoice choose_min_max_delta(const GameTree& game, const LeafPairing& pairing) {
  // constraints |a_k - delta * b_k| <= t over (leaf pair, player)
  std::vector<std::pair<double, double>> cons;
  for (const auto& [z, zj] : pairing.leaf_pairs) {
    for (size_t p = 0; p < game.nodes[z].utils.size(); ++p) {
      cons.emplace_back(game.nodes[z].utils[p].to_double(),
                        game.nodes[zj].utils[p].to_double());
    }
  }
  DeltaChoice out;
  bool any_b = false, any_a = false;
  double t = 0.0;
  for (const auto& [a, b] : cons) {
    if (b > 0.0) any_b = true;
    if (a > 0.0) any_a = true;
    if (b == 0.0) t = std::max(t, a);
  }
  if (!any_b) {
    out.delta = 1.0;
    out.max_error = t;
    out.degenerate = any_a;
    return out;
  }
  for (const auto& [ak, bk] : cons) {
    if (bk == 0.0) continue;
    for (const auto& [al, bl] : cons) {
      if (bl == 0.0) continue;
      t = std::max(t, (ak * bl - al * bk) / (bk + bl));
    }
  }
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : cons) {
    if (b == 0.0) continue;
    lo = std::max(lo, (a - t) / b);
    hi = std::min(hi, (a + t) / b);
  }
  out.max_error = t;
  out.delta = lo > 0.0 ? lo : std::min(1.0, hi);
  return out;
}

std::string merge_signature(const GameTree& game, const AbstractionMap& context, int is,
                            FutureTags tags) {
  const GameInfoset& I = game.infosets[is];
  std::string sig = "o" + std::to_string(I.owner) + "#n" + std::to_string(I.members.size()) + "#";
  for (const auto& l : I.labels) {
    sig += l;
    sig += ',';
  }
  auto side = collect_side(game, context, is, tags);
  std::vector<std::string> keys;
  keys.reserve(side.size());
  for (auto& e : side) keys.push_back(std::move(e.group));
  std::sort(keys.begin(), keys.end());
  for (auto& k : keys) {
    sig += k;
    sig += '\x1d';
  }
  return sig;
}

VerifyResult verify_crswf(const GameTree& game, const AbstractionMap& map, bool keep_leaf_detail,
                          FutureTags tags) {
  VerifyResult res;
  RefinementCheck rc = check_refinement(game, map);
  if (!rc.ok) {
    res.failure = VerifyFailure{-1, -1, rc.reason, -1};
    return res;
  }
  for (int c = 0; c < map.num_classes(); ++c) {
    const auto& ms = map.members[c];
    for (size_t i = 0; i < ms.size(); ++i) {
      for (size_t j = i + 1; j < ms.size(); ++j) {
        int I = ms[i], J = ms[j];
        PairingFailure pf;
        auto fwd = find_leaf_bijection(game, map, I, J, tags, &pf);
        if (!fwd) {
          res.failure = VerifyFailure{I, J, pf.reason, pf.leaf};
          return res;
        }
        LeafPairing bwd;
        bwd.from = J;
        bwd.to = I;
        // reorder reversed pairs into J's member/leaf order
        bwd.leaf_pairs.reserve(fwd->leaf_pairs.size());
        for (auto [a, b] : fwd->leaf_pairs) bwd.leaf_pairs.emplace_back(b, a);
        std::sort(bwd.leaf_pairs.begin(), bwd.leaf_pairs.end());
        std::unordered_map<int, int> back;
        for (auto [a, b] : fwd->node_pairs) back[b] = a;
        for (int s : game.infosets[J].members) bwd.node_pairs.emplace_back(s, back.at(s));

        double d;
        if (map.has_delta(I, J)) {
          d = map.delta_of(I, J);
        } else if (map.default_delta == AbstractionMap::DefaultDelta::one) {
          d = 1.0;
        } else {
          // canonical: optimize the lower-indexed direction, reciprocate
          d = choose_min_max_delta(game, *fwd).delta;
        }
        res.pairs[{I, J}] = compute_pair_errors(game, *fwd, d, keep_leaf_detail);
        res.pairs[{J, I}] = compute_pair_errors(game, bwd, 1.0 / d, keep_leaf_detail);
      }
    }
  }
  res.ok = true;
  return res;
}

}  // namespace efg
