#include "efg/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace efg {

namespace {

std::vector<double> chance_node_weights(const GameTree& game, int is) {
  const auto& members = game.infosets[is].members;
  std::vector<double> w(members.size());
  Rational tot(0);
  for (int s : members) tot += game.chance_reach[s];
  for (size_t m = 0; m < members.size(); ++m) {
    w[m] = tot.is_zero() ? 1.0 / static_cast<double>(members.size())
                         : (game.chance_reach[members[m]] / tot).to_double();
  }
  return w;
}

double weighted_direction(const GameTree& game, const PairErrors& pe, int I) {
  auto w = chance_node_weights(game, I);
  double acc = 0.0;
  for (size_t m = 0; m < w.size(); ++m)
    acc += w[m] * (pe.transition_node[m] + pe.reward_node[m]);
  return 2.0 * acc + pe.dist_pair;
}

double weighted_reward_sum(const GameTree& game, const PairErrors& pe, int I) {
  auto w = chance_node_weights(game, I);
  double acc = 0.0;
  for (size_t m = 0; m < w.size(); ++m) acc += w[m] * pe.reward_node[m];
  return acc;
}

}  // namespace

double slap_distance_from_errors(const PairErrors& fwd, const PairErrors& bwd, double scale) {
  auto dir = [scale](const PairErrors& pe) {
    double trans = 0.0, dist = 0.0;
    for (double t : pe.transition_raw) trans = std::max(trans, t);
    for (double d : pe.dist_raw) dist += d;
    return 2.0 * (pe.reward_leaf_max + trans * scale) + dist * scale;
  };
  return std::max(dir(fwd), dir(bwd));
}

double weighted_distance_from_errors(const GameTree& game, const PairErrors& fwd,
                                     const PairErrors& bwd, int I, int J) {
  return std::max(weighted_direction(game, fwd, I), weighted_direction(game, bwd, J));
}

std::optional<PairDistance> pair_distance(const GameTree& game, const AbstractionMap& base,
                                          int I, int J, DeltaMode mode, double scale,
                                          PairingFailure* failure) {
  if (I == J) return PairDistance{0.0, 1.0, 0.0, 0.0};
  auto fwd = find_leaf_bijection(game, base, I, J, FutureTags::labels_only, failure);
  if (!fwd) return std::nullopt;
  LeafPairing bwd;
  bwd.from = J;
  bwd.to = I;
  for (auto [a, b] : fwd->leaf_pairs) bwd.leaf_pairs.emplace_back(b, a);
  std::sort(bwd.leaf_pairs.begin(), bwd.leaf_pairs.end());
  {
    std::vector<std::pair<int, int>> np;
    for (auto [a, b] : fwd->node_pairs) np.emplace_back(b, a);
    std::sort(np.begin(), np.end());
    // node_pairs in J's member order
    for (int s : game.infosets[J].members)
      for (auto& [x, y] : np)
        if (x == s) bwd.node_pairs.emplace_back(x, y);
  }

  if (scale <= 0.0) {
    scale = 0.0;
    for (auto [a, b] : fwd->leaf_pairs)
      for (size_t p = 0; p < game.nodes[a].utils.size(); ++p)
        scale = std::max({scale, game.nodes[a].utils[p].to_double(),
                          game.nodes[b].utils[p].to_double()});
  }

  PairDistance out;
  if (mode == DeltaMode::fixed_one) {
    PairErrors fe = compute_pair_errors(game, *fwd, 1.0);
    PairErrors be = compute_pair_errors(game, bwd, 1.0);
    out.delta = 1.0;
    out.distance = slap_distance_from_errors(fe, be, scale);
    out.reward_fwd = weighted_reward_sum(game, fe, I);
    out.reward_bwd = weighted_reward_sum(game, be, J);
    return out;
  }

  // optimized scaling: minimize the reach-weighted bound increase over the
  // candidate breakpoints (utility ratios), then refine locally
  auto objective = [&](double delta) {
    PairErrors fe = compute_pair_errors(game, *fwd, delta);
    PairErrors be = compute_pair_errors(game, bwd, 1.0 / delta);
    return std::max(weighted_direction(game, fe, I), weighted_direction(game, be, J));
  };
  std::vector<double> cand{1.0};
  for (auto [a, b] : fwd->leaf_pairs) {
    for (size_t p = 0; p < game.nodes[a].utils.size(); ++p) {
      double u = game.nodes[a].utils[p].to_double();
      double v = game.nodes[b].utils[p].to_double();
      if (u > 0.0 && v > 0.0) {
        cand.push_back(u / v);
        cand.push_back(v / u);
      }
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  double best_delta = 1.0, best = std::numeric_limits<double>::infinity();
  for (double d : cand) {
    double v = objective(d);
    if (v < best - 1e-15) {
      best = v;
      best_delta = d;
    }
  }
  // golden-section within the bracketing candidate interval
  auto refine = [&](double lo, double hi) {
    const double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = objective(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = objective(x2);
      }
    }
    double mid = (a + b) / 2.0, fm = objective(mid);
    if (fm < best - 1e-12) {
      best = fm;
      best_delta = mid;
    }
  };
  auto pos = std::lower_bound(cand.begin(), cand.end(), best_delta) - cand.begin();
  if (pos > 0) refine(cand[pos - 1], best_delta);
  if (pos + 1 < static_cast<long>(cand.size())) refine(best_delta, cand[pos + 1]);

  PairErrors fe = compute_pair_errors(game, *fwd, best_delta);
  PairErrors be = compute_pair_errors(game, bwd, 1.0 / best_delta);
  out.delta = best_delta;
  out.distance = best;
  out.reward_fwd = weighted_reward_sum(game, fe, I);
  out.reward_bwd = weighted_reward_sum(game, be, J);
  return out;
}

ClusterProblem build_cluster_problem(const GameTree& game, const AbstractionMap& base,
                                     const std::vector<int>& candidates, DeltaMode mode,
                                     const std::vector<double>* weights) {
  ClusterProblem p;
  p.candidates = candidates;
  p.delta_mode = mode;
  size_t n = candidates.size();
  if (weights) {
    if (weights->size() != n) throw GameError("weight vector size mismatch");
    p.weight = *weights;
  } else {
    p.weight.resize(n);
    for (size_t i = 0; i < n; ++i) {
      Rational tot(0);
      for (int s : game.infosets[candidates[i]].members) tot += game.chance_reach[s];
      p.weight[i] = tot.to_double();
    }
  }
  p.scale = 0.0;
  for (int is : candidates)
    for (int s : game.infosets[is].members)
      for (int li = game.leaf_lo[s]; li < game.leaf_hi[s]; ++li)
        for (const auto& u : game.nodes[game.leaves[li]].utils)
          p.scale = std::max(p.scale, u.to_double());
  p.d.assign(n, std::vector<double>(n, 0.0));
  p.delta.assign(n, std::vector<double>(n, 1.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      PairingFailure pf;
      auto pd = pair_distance(game, base, candidates[i], candidates[j], mode, p.scale, &pf);
      if (!pd)
        throw GameError("candidates '" + game.infosets[candidates[i]].id + "' and '" +
                        game.infosets[candidates[j]].id + "' cannot merge: " + pf.reason);
      p.d[i][j] = p.d[j][i] = pd->distance;
      p.delta[i][j] = pd->delta;
      p.delta[j][i] = 1.0 / pd->delta;
    }
  }
  return p;
}

MetricCheck validate_metric(const ClusterProblem& p, double tol) {
  size_t n = p.candidates.size();
  // pre-merge zero-distance candidates (identity of indiscernibles holds on
  // the merged classes); representative = lowest index of the class
  std::vector<int> rep(n);
  std::iota(rep.begin(), rep.end(), 0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < i; ++j)
      if (p.d[i][j] <= tol && rep[i] == static_cast<int>(i)) rep[i] = rep[j];

  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (p.d[i][j] < 0.0) return {false, "non-negativity", static_cast<int>(i), static_cast<int>(j), -1};
      if (p.d[i][j] != p.d[j][i])
        return {false, "symmetry", static_cast<int>(i), static_cast<int>(j), -1};
      if (rep[i] != rep[j] && p.d[i][j] <= tol)
        return {false, "identity of indiscernibles", static_cast<int>(i), static_cast<int>(j), -1};
      if (rep[i] == rep[j] && p.d[i][j] > tol && i != j)
        return {false, "identity of indiscernibles", static_cast<int>(i), static_cast<int>(j), -1};
    }
  }
  for (size_t x = 0; x < n; ++x)
    for (size_t y = 0; y < n; ++y)
      for (size_t z = 0; z < n; ++z)
        if (p.d[x][y] > p.d[x][z] + p.d[z][y] + tol)
          return {false, "triangle inequality", static_cast<int>(x), static_cast<int>(y),
                  static_cast<int>(z)};
  return {};
}

double diameter_objective(const ClusterProblem& p, const std::vector<int>& cluster_of) {
  double worst = 0.0;
  for (size_t i = 0; i < cluster_of.size(); ++i)
    for (size_t j = i + 1; j < cluster_of.size(); ++j)
      if (cluster_of[i] == cluster_of[j]) worst = std::max(worst, p.d[i][j]);
  return worst;
}

double weighted_sum_objective(const ClusterProblem& p, const std::vector<int>& cluster_of) {
  double total = 0.0;
  for (size_t i = 0; i < cluster_of.size(); ++i) {
    double far = 0.0;
    for (size_t j = 0; j < cluster_of.size(); ++j)
      if (cluster_of[i] == cluster_of[j]) far = std::max(far, p.d[i][j]);
    total += p.weight[i] * far;
  }
  return total;
}

Clustering gonzalez_cluster(const ClusterProblem& p, int k) {
  int n = static_cast<int>(p.candidates.size());
  if (k <= 0 || k > n) throw GameError("cluster count out of range");
  std::vector<int> centers{0};
  std::vector<double> mind(n);
  for (int i = 0; i < n; ++i) mind[i] = p.d[0][i];
  while (static_cast<int>(centers.size()) < k) {
    int far = 0;
    for (int i = 1; i < n; ++i)
      if (mind[i] > mind[far]) far = i;
    centers.push_back(far);
    for (int i = 0; i < n; ++i) mind[i] = std::min(mind[i], p.d[far][i]);
  }
  Clustering c;
  c.k = k;
  c.cluster_of.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    for (int j = 1; j < k; ++j)
      if (p.d[centers[j]][i] < p.d[centers[best]][i]) best = j;
    c.cluster_of[i] = best;
  }
  c.representative.assign(k, -1);
  for (int i = 0; i < n; ++i)
    if (c.representative[c.cluster_of[i]] == -1) c.representative[c.cluster_of[i]] = i;
  c.objective = diameter_objective(p, c.cluster_of);
  return c;
}

namespace {

struct BnB {
  const ClusterProblem& p;
  int n, k;
  ClusterObjective objective;
  const std::function<double(const std::vector<int>&)>* custom;
  std::vector<int> assign;
  std::vector<int> best_assign;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> maxd;  // weighted mode: current max distance per point

  BnB(const ClusterProblem& prob, int n_, int k_, ClusterObjective obj,
      const std::function<double(const std::vector<int>&)>* cust)
      : p(prob), n(n_), k(k_), objective(obj), custom(cust) {}

  double partial_cost(int upto) {
    if (custom) {
      // unassigned points as fresh singletons; objective must be monotone
      std::vector<int> full(assign.begin(), assign.end());
      int next = k;
      for (int i = upto; i < n; ++i) full[i] = next++;
      return (*custom)(full);
    }
    if (objective == ClusterObjective::diameter) {
      double worst = 0.0;
      for (int i = 0; i < upto; ++i)
        for (int j = i + 1; j < upto; ++j)
          if (assign[i] == assign[j]) worst = std::max(worst, p.d[i][j]);
      return worst;
    }
    double total = 0.0;
    for (int i = 0; i < upto; ++i) total += p.weight[i] * maxd[i];
    return total;
  }

  void rec(int idx, int used, double cur) {
    if (cur >= best - 1e-12) return;
    if (idx == n) {
      best = cur;
      best_assign = assign;
      return;
    }
    int limit = std::min(used + 1, k);
    for (int c = 0; c < limit; ++c) {
      assign[idx] = c;
      std::vector<std::pair<int, double>> touched;
      double nxt;
      if (custom) {
        nxt = partial_cost(idx + 1);
      } else if (objective == ClusterObjective::diameter) {
        nxt = cur;
        for (int j = 0; j < idx; ++j)
          if (assign[j] == c) nxt = std::max(nxt, p.d[idx][j]);
      } else {
        double mi = 0.0;
        nxt = cur;
        for (int j = 0; j < idx; ++j) {
          if (assign[j] != c) continue;
          mi = std::max(mi, p.d[idx][j]);
          if (p.d[idx][j] > maxd[j]) {
            touched.emplace_back(j, maxd[j]);
            nxt += p.weight[j] * (p.d[idx][j] - maxd[j]);
            maxd[j] = p.d[idx][j];
          }
        }
        maxd[idx] = mi;
        nxt += p.weight[idx] * mi;
      }
      rec(idx + 1, c == used ? used + 1 : used, nxt);
      for (auto [j, old] : touched) maxd[j] = old;
    }
    assign[idx] = -1;
  }
};

}  // namespace

Clustering exact_cluster(const ClusterProblem& p, int k, ClusterObjective objective, int guard,
                         const std::function<double(const std::vector<int>&)>* custom) {
  int n = static_cast<int>(p.candidates.size());
  if (k <= 0 || k > n) throw GameError("cluster count out of range");

  // merge zero-distance candidates first
  std::vector<int> rep(n, -1);
  std::vector<int> reps;
  for (int i = 0; i < n; ++i) {
    for (int r : reps)
      if (p.d[i][r] <= 1e-12) {
        rep[i] = r;
        break;
      }
    if (rep[i] == -1) {
      rep[i] = i;
      reps.push_back(i);
    }
  }
  int m = static_cast<int>(reps.size());
  if (m > guard)
    throw LimitError("instance too large for exact clustering (" + std::to_string(m) +
                     " effective points, guard " + std::to_string(guard) + ")");

  ClusterProblem q;
  q.scale = p.scale;
  q.delta_mode = p.delta_mode;
  q.candidates.resize(m);
  q.weight.assign(m, 0.0);
  q.d.assign(m, std::vector<double>(m, 0.0));
  std::vector<int> pos_of(n, -1);
  for (int i = 0; i < m; ++i) {
    q.candidates[i] = p.candidates[reps[i]];
    pos_of[reps[i]] = i;
  }
  for (int i = 0; i < n; ++i) q.weight[pos_of[rep[i]]] += p.weight[i];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) q.d[i][j] = p.d[reps[i]][reps[j]];

  int kk = std::min(k, m);
  BnB b(q, m, kk, objective, custom);
  b.assign.assign(m, -1);
  b.maxd.assign(m, 0.0);
  // incumbent from farthest-point traversal
  {
    Clustering g = gonzalez_cluster(q, kk);
    b.best_assign = g.cluster_of;
    if (custom) {
      b.best = (*custom)(g.cluster_of);
    } else {
      b.best = objective == ClusterObjective::diameter ? diameter_objective(q, g.cluster_of)
                                                       : weighted_sum_objective(q, g.cluster_of);
    }
  }
  b.rec(0, 0, 0.0);

  Clustering out;
  out.k = kk;
  out.cluster_of.assign(n, -1);
  for (int i = 0; i < n; ++i) out.cluster_of[i] = b.best_assign[pos_of[rep[i]]];
  out.objective = b.best;
  out.representative.assign(kk, -1);
  for (int i = 0; i < n; ++i)
    if (out.representative[out.cluster_of[i]] == -1) out.representative[out.cluster_of[i]] = i;
  return out;
}

AbstractionMap build_abstraction(
    const GameTree& game,
    const std::vector<std::pair<const ClusterProblem*, const Clustering*>>& groups, double tol,
    bool check_distances, const AbstractionMap* base) {
  std::vector<std::pair<std::string, std::vector<std::string>>> classes;
  if (base) {
    for (int c = 0; c < base->num_classes(); ++c) {
      if (base->members[c].size() < 2) continue;
      std::vector<std::string> ids;
      for (int i : base->members[c]) ids.push_back(game.infosets[i].id);
      classes.emplace_back(base->class_ids[c], std::move(ids));
    }
    for (const auto& [prob, clus] : groups)
      for (int cand : prob->candidates)
        if (base->members[base->abstract_of[cand]].size() > 1)
          throw GameError("candidate '" + game.infosets[cand].id +
                          "' is already merged by the base abstraction");
  }
  for (const auto& [prob, clus] : groups) {
    for (int c = 0; c < clus->k; ++c) {
      std::vector<std::string> ids;
      for (size_t i = 0; i < prob->candidates.size(); ++i)
        if (clus->cluster_of[i] == c) ids.push_back(game.infosets[prob->candidates[i]].id);
      if (ids.size() < 2) continue;
      classes.emplace_back("c:" + ids.front(), std::move(ids));
    }
  }
  AbstractionMap map = AbstractionMap::from_classes(game, classes);
  for (const auto& [prob, clus] : groups) {
    if (prob->delta_mode != DeltaMode::optimized) continue;
    for (size_t i = 0; i < prob->candidates.size(); ++i)
      for (size_t j = i + 1; j < prob->candidates.size(); ++j)
        if (clus->cluster_of[i] == clus->cluster_of[j])
          map.set_delta(prob->candidates[i], prob->candidates[j], prob->delta[i][j]);
  }

  VerifyResult vr = verify_crswf(game, map);
  if (!vr.ok)
    throw GameError("proposed clusters are not mergeable: " + vr.failure->reason);

  if (check_distances) {
    for (const auto& [prob, clus] : groups) {
      for (size_t i = 0; i < prob->candidates.size(); ++i) {
        for (size_t j = i + 1; j < prob->candidates.size(); ++j) {
          if (clus->cluster_of[i] != clus->cluster_of[j]) continue;
          int I = prob->candidates[i], J = prob->candidates[j];
          double re;
          if (prob->delta_mode == DeltaMode::fixed_one) {
            re = slap_distance_from_errors(vr.at(I, J), vr.at(J, I), prob->scale);
          } else {
            re = weighted_distance_from_errors(game, vr.at(I, J), vr.at(J, I), I, J);
          }
          if (std::fabs(re - prob->d[i][j]) > tol)
            throw GameError("recomputed distance disagrees with the cluster instance at '" +
                            game.infosets[I].id + "','" + game.infosets[J].id + "'");
        }
      }
    }
  }
  return map;
}

}  // namespace efg
