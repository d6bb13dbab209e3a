#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "efg/bounds.hpp"
#include "efg/clustering.hpp"
#include "efg/games.hpp"

namespace efg {

// Roll-pair class structure of the second-round information sets: every
// betting context carries one information set per (first roll, second roll)
// pair of the acting player, and the same class partition must be applied in
// every context for the merged sets to keep matching future structure.
struct RollClassInstance {
  GameTree game;
  DrpRound2Info info;
  int sides = 0;
  int classes = 0;                          // sides^2
  std::vector<std::vector<int>> contexts;   // per context: infoset by class
  ClusterProblem problem;                   // class-level distances/weights
};

RollClassInstance build_roll_class_instance(const DrpSpec& spec);

// Apply a class partition in every betting context.
AbstractionMap roll_class_abstraction(const RollClassInstance& inst,
                                      const std::vector<int>& cluster_of);

struct BoundsExperimentConfig {
  int sides = 6;
  int k_min = 1, k_max = 12;
};
struct BoundsRow {
  int k = 0;
  double objective = 0.0;  // optimal clustering objective at k
  double bound = 0.0;      // worst-case bound of the induced abstraction
};
struct BoundsExperimentResult {
  int candidates = 0;  // roll-pair classes per context
  std::vector<BoundsRow> rows;
};
BoundsExperimentResult run_bounds_experiment(const BoundsExperimentConfig& cfg);

struct ConvergenceConfig {
  int sides = 4;
  std::vector<Rational> correlations;  // defaults to 0, 1/100, ..., 7/100
  int iterations = 100000;
  int clusters = -1;  // default 2*sides-1 (lossless count at zero correlation)
  std::uint64_t seed = 0;
  bool parallel = true;
};
struct ConvergenceRow {
  Rational c;
  int iteration = 0;
  double regret_sum = 0.0;  // full-game best-response gains of both players
  double bound = 0.0;       // worst-case bound line (both players summed)
};
std::vector<ConvergenceRow> run_convergence_experiment(const ConvergenceConfig& cfg);

std::vector<int> log_spaced_checkpoints(int iterations);

std::string bounds_csv(const BoundsExperimentResult& res);
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

std::string format_double(double v);  // %.17g

}  // namespace efg
