#include "efg/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <map>
#include <thread>

#include "efg/cfr.hpp"

namespace efg {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RollClassInstance build_roll_class_instance(const DrpSpec& spec) {
  RollClassInstance inst;
  inst.sides = spec.sides;
  inst.classes = spec.sides * spec.sides;
  inst.game = make_cdrp(spec, &inst.info);

  std::map<std::string, std::vector<int>> by_context;
  for (const auto& [is, e] : inst.info.by_infoset) {
    auto& v = by_context[e.context];
    if (v.empty()) v.assign(inst.classes, -1);
    v[(e.own1 - 1) * spec.sides + (e.own2 - 1)] = is;
  }
  for (auto& [ctx, v] : by_context) {
    for (int i : v)
      if (i == -1) throw GameError("incomplete roll-class block in context " + ctx);
    inst.contexts.push_back(v);
  }

  // class-level distances: mean over contexts of the per-context pair
  // distance at unit scaling; weights are the owner's roll probabilities
  AbstractionMap identity = AbstractionMap::identity(inst.game);
  int n = inst.classes;
  inst.problem.candidates = inst.contexts.front();
  inst.problem.delta_mode = DeltaMode::fixed_one;
  inst.problem.scale = inst.game.max_utility();
  inst.problem.d.assign(n, std::vector<double>(n, 0.0));
  inst.problem.delta.assign(n, std::vector<double>(n, 1.0));
  inst.problem.weight.assign(n, 0.0);

  // marginal roll distribution (rows of the joint)
  std::vector<double> marginal(spec.sides, 0.0);
  for (int v1 = 1; v1 <= spec.sides; ++v1) {
    Rational row(0);
    for (int v2 = 1; v2 <= spec.sides; ++v2)
      row += cdrp_pair_probability(spec.sides, spec.correlation, v1, v2);
    marginal[v1 - 1] = row.to_double();
  }
  for (int a = 0; a < n; ++a)
    inst.problem.weight[a] = marginal[a / spec.sides] * marginal[a % spec.sides];

  for (int a = 0; a < n; ++a) {
    for (int bcl = a + 1; bcl < n; ++bcl) {
      double acc = 0.0;
      for (const auto& ctx : inst.contexts) {
        PairingFailure pf;
        auto pd = pair_distance(inst.game, identity, ctx[a], ctx[bcl], DeltaMode::fixed_one,
                                inst.problem.scale, &pf);
        if (!pd)
          throw GameError("roll classes fail to match in context: " + pf.reason);
        acc += pd->distance;
      }
      inst.problem.d[a][bcl] = inst.problem.d[bcl][a] =
          acc / static_cast<double>(inst.contexts.size());
    }
  }
  return inst;
}

AbstractionMap roll_class_abstraction(const RollClassInstance& inst,
                                      const std::vector<int>& cluster_of) {
  int k = 0;
  for (int c : cluster_of) k = std::max(k, c + 1);
  std::vector<std::pair<std::string, std::vector<std::string>>> classes;
  int ctx_idx = 0;
  for (const auto& ctx : inst.contexts) {
    for (int c = 0; c < k; ++c) {
      std::vector<std::string> ids;
      for (int a = 0; a < inst.classes; ++a)
        if (cluster_of[a] == c) ids.push_back(inst.game.infosets[ctx[a]].id);
      if (ids.size() < 2) continue;
      classes.emplace_back("x" + std::to_string(ctx_idx) + "c" + std::to_string(c) + ":" +
                               ids.front(),
                           std::move(ids));
    }
    ++ctx_idx;
  }
  return AbstractionMap::from_classes(inst.game, classes);
}

BoundsExperimentResult run_bounds_experiment(const BoundsExperimentConfig& cfg) {
  DrpSpec spec;
  spec.sides = cfg.sides;
  RollClassInstance inst = build_roll_class_instance(spec);

  BoundsExperimentResult res;
  res.candidates = inst.classes;
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    Clustering cl = exact_cluster(inst.problem, k, ClusterObjective::weighted_sum);
    AbstractionMap map = roll_class_abstraction(inst, cl.cluster_of);
    VerifyResult vr = verify_crswf(inst.game, map);
    if (!vr.ok) throw GameError("bound experiment produced an invalid abstraction");
    BoundResult bound =
        compute_bound(inst.game, map, vr, BoundMode::worst_case, nullptr, nullptr);
    res.rows.push_back(BoundsRow{k, cl.objective, bound.epsilon});
  }
  return res;
}

std::vector<int> log_spaced_checkpoints(int iterations) {
  std::vector<int> pts;
  for (long long decade = 1; decade <= iterations; decade *= 10) {
    for (int m : {1, 2, 3, 5, 7}) {
      long long v = m * decade;
      if (v <= iterations) pts.push_back(static_cast<int>(v));
    }
  }
  if (pts.empty() || pts.back() != iterations) pts.push_back(iterations);
  return pts;
}

namespace {

std::vector<ConvergenceRow> convergence_series(const DrpSpec& spec, int clusters, int iterations,
                                               std::uint64_t seed) {
  RollClassInstance inst = build_roll_class_instance(spec);
  Clustering cl = exact_cluster(inst.problem, clusters, ClusterObjective::weighted_sum);
  AbstractionMap map = roll_class_abstraction(inst, cl.cluster_of);
  VerifyResult vr = verify_crswf(inst.game, map);
  if (!vr.ok) throw GameError("convergence experiment produced an invalid abstraction");
  BoundResult bound = compute_bound(inst.game, map, vr, BoundMode::worst_case, nullptr, nullptr);
  double line = 0.0;
  for (double e : bound.eps) line += e;  // comparable to the plotted regret sum

  GameTree abstract_game = apply_abstraction(inst.game, map);
  CfrSolver solver(abstract_game, seed);
  std::vector<ConvergenceRow> rows;
  int done = 0;
  for (int cp : log_spaced_checkpoints(iterations)) {
    solver.run(cp - done);
    done = cp;
    StrategyProfile lifted =
        lift_strategy(abstract_game, solver.average_strategy(), inst.game, map);
    Exploitability ex = evaluate_in_original(inst.game, lifted);
    rows.push_back(ConvergenceRow{spec.correlation, cp, ex.sum, line});
  }
  return rows;
}

}  // namespace

std::vector<ConvergenceRow> run_convergence_experiment(const ConvergenceConfig& cfg) {
  std::vector<Rational> cs = cfg.correlations;
  if (cs.empty())
    for (int i = 0; i <= 7; ++i) cs.emplace_back(i, 100);
  int clusters = cfg.clusters > 0 ? cfg.clusters : 2 * cfg.sides - 1;

  std::vector<std::vector<ConvergenceRow>> series(cs.size());
  if (cfg.parallel && cs.size() > 1) {
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<std::vector<ConvergenceRow>>> futs;
    for (size_t i = 0; i < cs.size(); ++i) {
      DrpSpec spec;
      spec.sides = cfg.sides;
      spec.correlation = cs[i];
      futs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                convergence_series, spec, clusters, cfg.iterations, cfg.seed));
    }
    for (size_t i = 0; i < cs.size(); ++i) series[i] = futs[i].get();
  } else {
    for (size_t i = 0; i < cs.size(); ++i) {
      DrpSpec spec;
      spec.sides = cfg.sides;
      spec.correlation = cs[i];
      series[i] = convergence_series(spec, clusters, cfg.iterations, cfg.seed);
    }
  }
  std::vector<ConvergenceRow> rows;
  for (auto& s : series)
    for (auto& r : s) rows.push_back(std::move(r));
  return rows;
}

std::string bounds_csv(const BoundsExperimentResult& res) {
  std::string out = "k,objective,bound\n";
  for (const auto& r : res.rows) {
    out += std::to_string(r.k);
    out += ',';
    out += format_double(r.objective);
    out += ',';
    out += format_double(r.bound);
    out += '\n';
  }
  return out;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "c,iteration,regret_sum,bound\n";
  for (const auto& r : rows) {
    out += r.c.str();
    out += ',';
    out += std::to_string(r.iteration);
    out += ',';
    out += format_double(r.regret_sum);
    out += ',';
    out += format_double(r.bound);
    out += '\n';
  }
  return out;
}

}  // namespace efg
