#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "efg/cfr.hpp"
#include "efg/experiments.hpp"
#include "efg/format.hpp"

namespace fs = std::filesystem;
using namespace efg;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitLimit = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GameError("cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GameError("cannot write '" + path + "'");
  out << data;
}

// "drp:<sides>", "cdrp:<sides>:<c>", "demo", or a file path
GameTree load_game(const std::string& spec) {
  if (spec == "demo") return make_merge_example().game;
  if (spec.rfind("drp:", 0) == 0) {
    DrpSpec s;
    s.sides = std::stoi(spec.substr(4));
    return make_drp(s);
  }
  if (spec.rfind("cdrp:", 0) == 0) {
    auto rest = spec.substr(5);
    auto colon = rest.find(':');
    if (colon == std::string::npos)
      throw GameError("cdrp spec needs cdrp:<sides>:<correlation>");
    DrpSpec s;
    s.sides = std::stoi(rest.substr(0, colon));
    s.correlation = Rational::parse(rest.substr(colon + 1));
    return make_cdrp(s);
  }
  return parse_game(read_file(spec));
}

int cmd_validate(const std::string& game_spec, const std::string& map_path) {
  GameTree game = load_game(game_spec);
  AbstractionMap map = load_abstraction(game, read_file(map_path));
  VerifyResult vr = verify_crswf(game, map);
  if (!vr.ok) {
    std::string where;
    if (vr.failure->I >= 0)
      where = " at pair '" + game.infosets[vr.failure->I].id + "','" +
              game.infosets[vr.failure->J].id + "'";
    std::cout << "invalid: " << vr.failure->reason << where << "\n";
    return kExitValidation;
  }
  for (const auto& [key, pe] : vr.pairs) {
    double reward = 0.0, transition = 0.0;
    for (double v : pe.reward_node) reward = std::max(reward, v);
    for (double v : pe.transition_node) transition = std::max(transition, v);
    std::printf("pair %s %s: reward=%g transition=%g distribution=%g\n",
                game.infosets[key.first].id.c_str(), game.infosets[key.second].id.c_str(), reward,
                transition, pe.dist_pair);
  }
  BoundResult b = compute_bound(game, map, vr, BoundMode::worst_case, nullptr, nullptr);
  std::printf("bound: %g\n", b.epsilon);
  return 0;
}

int cmd_abstract(const std::string& game_spec, int level, int k, const std::string& method,
                 const std::string& objective, const std::string& delta,
                 const std::string& base_path, const std::string& out) {
  GameTree game = load_game(game_spec);
  AbstractionMap base = base_path.empty() ? AbstractionMap::identity(game)
                                          : load_abstraction(game, read_file(base_path));
  DeltaMode dmode = delta == "optimized" ? DeltaMode::optimized : DeltaMode::fixed_one;
  ClusterObjective obj =
      objective == "weighted" ? ClusterObjective::weighted_sum : ClusterObjective::diameter;
  if (dmode == DeltaMode::optimized && method == "gonzalez")
    throw GameError("optimized scaling is not metric; use --method exact");

  // group the level's information sets by mergeability signature, under the
  // merges already committed below
  std::map<std::string, std::vector<int>> groups;
  for (int is = 0; is < game.num_infosets(); ++is) {
    bool at_level = true;
    for (int s : game.infosets[is].members)
      if (game.height(s) != level) at_level = false;
    if (!at_level || base.members[base.abstract_of[is]].size() > 1) continue;
    groups[merge_signature(game, base, is)].push_back(is);
  }

  std::vector<ClusterProblem> problems;
  std::vector<Clustering> clusterings;
  for (const auto& [sig, candidates] : groups) {
    if (candidates.size() < 2) continue;
    ClusterProblem p = build_cluster_problem(game, base, candidates, dmode);
    int kk = std::min<int>(k, static_cast<int>(candidates.size()));
    Clustering c = method == "gonzalez" ? gonzalez_cluster(p, kk) : exact_cluster(p, kk, obj);
    problems.push_back(std::move(p));
    clusterings.push_back(std::move(c));
  }
  std::vector<std::pair<const ClusterProblem*, const Clustering*>> refs;
  for (size_t i = 0; i < problems.size(); ++i) refs.emplace_back(&problems[i], &clusterings[i]);
  AbstractionMap map =
      build_abstraction(game, refs, 1e-9, true, base_path.empty() ? nullptr : &base);
  write_file(out, save_abstraction(game, map));
  int merged = 0;
  for (const auto& ms : map.members)
    if (ms.size() > 1) ++merged;
  std::printf("groups=%zu merged_classes=%d infosets=%d->%d\n", problems.size(), merged,
              game.num_infosets(), map.num_classes());
  return 0;
}

int cmd_solve(const std::string& game_spec, const std::string& map_path, int iters,
              std::uint64_t seed, const std::string& out) {
  GameTree game = load_game(game_spec);
  GameTree target = game;
  if (!map_path.empty()) {
    AbstractionMap map = load_abstraction(game, read_file(map_path));
    target = apply_abstraction(game, map);
  }
  CfrResult res = cfr_run(target, iters, seed);
  write_file(out, strategy_to_csv(target, res.average));
  double worst = 0.0;
  for (double r : res.abstract_regrets.infoset_regret) worst = std::max(worst, r);
  std::printf("iterations=%d max_immediate_regret=%g strategy=%s\n", iters, worst, out.c_str());
  return 0;
}

int cmd_eval(const std::string& game_spec, const std::string& strategy_path,
             const std::string& map_path) {
  GameTree game = load_game(game_spec);
  StrategyProfile sigma(game);
  if (!map_path.empty()) {
    AbstractionMap map = load_abstraction(game, read_file(map_path));
    GameTree abstract_game = apply_abstraction(game, map);
    StrategyProfile abs_sigma = strategy_from_csv(abstract_game, read_file(strategy_path));
    sigma = lift_strategy(abstract_game, abs_sigma, game, map);
  } else {
    sigma = strategy_from_csv(game, read_file(strategy_path));
  }
  Exploitability ex = evaluate_in_original(game, sigma);
  for (size_t p = 0; p < ex.regret.size(); ++p)
    std::printf("regret_p%zu=%.17g\n", p + 1, ex.regret[p]);
  std::printf("regret_sum=%.17g\n", ex.sum);
  return 0;
}

int cmd_experiment(const std::string& kind, int sides, int kmin, int kmax, int iters, int clusters,
                   const std::string& cs, std::uint64_t seed, int jobs,
                   const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (kind == "bounds") {
    BoundsExperimentConfig cfg;
    cfg.sides = sides;
    cfg.k_min = kmin;
    cfg.k_max = kmax;
    BoundsExperimentResult res = run_bounds_experiment(cfg);
    write_file(out_dir + "/bounds.csv", bounds_csv(res));
    std::printf("candidates=%d rows=%zu -> %s/bounds.csv\n", res.candidates, res.rows.size(),
                out_dir.c_str());
    return 0;
  }
  if (kind == "convergence") {
    ConvergenceConfig cfg;
    cfg.sides = sides;
    cfg.iterations = iters;
    cfg.clusters = clusters;
    cfg.seed = seed;
    cfg.parallel = jobs != 1;
    if (!cs.empty()) {
      std::istringstream in(cs);
      std::string tok;
      while (std::getline(in, tok, ',')) cfg.correlations.push_back(Rational::parse(tok));
    }
    auto rows = run_convergence_experiment(cfg);
    write_file(out_dir + "/convergence.csv", convergence_csv(rows));
    std::printf("series=%zu rows=%zu -> %s/convergence.csv\n",
                cfg.correlations.empty() ? 8 : cfg.correlations.size(), rows.size(),
                out_dir.c_str());
    return 0;
  }
  std::fprintf(stderr, "unknown experiment kind '%s'\n", kind.c_str());
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extensive-form game abstraction toolkit"};
  app.set_config("--config", "", "key=value config file; flags override");
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "check an abstraction and print its errors");
  std::string v_game, v_map;
  validate->add_option("game", v_game, "game spec or file")->required();
  validate->add_option("map", v_map, "abstraction map file")->required();

  auto* abstract_cmd = app.add_subcommand("abstract", "cluster one level into an abstraction");
  std::string a_game, a_method = "exact", a_objective = "weighted", a_delta = "fixed", a_out,
              a_base;
  int a_level = 0, a_k = 1;
  abstract_cmd->add_option("--game", a_game)->required();
  abstract_cmd->add_option("--level", a_level, "height of the candidate sets")->required();
  abstract_cmd->add_option("--k", a_k, "clusters per mergeable group")->required();
  abstract_cmd->add_option("--method", a_method)->check(CLI::IsMember({"gonzalez", "exact"}));
  abstract_cmd->add_option("--objective", a_objective)
      ->check(CLI::IsMember({"diameter", "weighted"}));
  abstract_cmd->add_option("--delta", a_delta)->check(CLI::IsMember({"fixed", "optimized"}));
  abstract_cmd->add_option("--base", a_base, "merges already committed at deeper levels");
  abstract_cmd->add_option("--out", a_out)->required();

  auto* solve = app.add_subcommand("solve", "run regret matching self-play");
  std::string s_game, s_map, s_out;
  int s_iters = 10000;
  std::uint64_t s_seed = 0;
  solve->add_option("--game", s_game)->required();
  solve->add_option("--map", s_map, "optional abstraction to solve instead");
  solve->add_option("--iters", s_iters);
  solve->add_option("--seed", s_seed);
  solve->add_option("--out", s_out)->required();

  auto* eval = app.add_subcommand("eval", "best-response regrets of a strategy");
  std::string e_game, e_strategy, e_map;
  eval->add_option("--game", e_game)->required();
  eval->add_option("--strategy", e_strategy)->required();
  eval->add_option("--map", e_map, "abstraction the strategy was computed in");

  auto* exp = app.add_subcommand("experiment", "abstraction quality sweeps, CSV output");
  std::string x_kind, x_cs, x_out = ".";
  int x_sides = 6, x_kmin = 1, x_kmax = 12, x_iters = 100000, x_clusters = -1, x_jobs = 0;
  std::uint64_t x_seed = 0;
  exp->add_option("--kind", x_kind)->required()->check(CLI::IsMember({"bounds", "convergence"}));
  exp->add_option("--sides", x_sides);
  exp->add_option("--kmin", x_kmin);
  exp->add_option("--kmax", x_kmax);
  exp->add_option("--iters", x_iters);
  exp->add_option("--clusters", x_clusters);
  exp->add_option("--cs", x_cs, "comma-separated correlation list, e.g. 0,1/100");
  exp->add_option("--seed", x_seed);
  exp->add_option("--jobs", x_jobs, "1 disables parallel series");
  exp->add_option("--out-dir", x_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(v_game, v_map);
    if (abstract_cmd->parsed())
      return cmd_abstract(a_game, a_level, a_k, a_method, a_objective, a_delta, a_base, a_out);
    if (solve->parsed()) return cmd_solve(s_game, s_map, s_iters, s_seed, s_out);
    if (eval->parsed()) return cmd_eval(e_game, e_strategy, e_map);
    if (exp->parsed())
      return cmd_experiment(x_kind, x_sides, x_kmin, x_kmax, x_iters, x_clusters, x_cs, x_seed,
                            x_jobs, x_out);
  } catch (const LimitError& e) {
    std::fprintf(stderr, "limit exceeded: %s\n", e.what());
    return kExitLimit;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitValidation;
  } catch (const GameError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
