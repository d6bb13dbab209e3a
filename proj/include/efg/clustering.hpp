#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "efg/abstraction.hpp"
#include "efg/game.hpp"
#include "efg/merge_errors.hpp"

namespace efg {

struct LimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DeltaMode { fixed_one, optimized };
enum class ClusterObjective { diameter, weighted_sum };

// Distance between two mergeable information sets: the bound increase from
// merging the pair, maximized over the two mapping directions. With
// delta = 1 the per-direction form is
//   2 * (max-node reward error + max-node transition sum * scale)
//     + (summed node distribution error) * scale,
// which is symmetric and satisfies the triangle inequality on any family of
// pairwise-mergeable sets sharing `scale`. Optimized mode instead picks the
// scaling factor minimizing the reach-weighted form; no metric guarantees.
struct PairDistance {
  double distance = 0.0;
  double delta = 1.0;          // factor applied when mapping I onto J
  double reward_fwd = 0.0;     // reach-weighted reward error, I onto J
  double reward_bwd = 0.0;     // and J onto I
};
std::optional<PairDistance> pair_distance(const GameTree& game, const AbstractionMap& base,
                                          int I, int J, DeltaMode mode, double scale = -1.0,
                                          PairingFailure* failure = nullptr);

// Recompute the fixed-delta distance from stored pair errors.
double slap_distance_from_errors(const PairErrors& fwd, const PairErrors& bwd, double scale);
// Reach-weighted form used in optimized mode.
double weighted_distance_from_errors(const GameTree& game, const PairErrors& fwd,
                                     const PairErrors& bwd, int I, int J);

struct ClusterProblem {
  std::vector<int> candidates;  // original infoset indices
  std::vector<double> weight;
  std::vector<std::vector<double>> d;
  std::vector<std::vector<double>> delta;  // scaling factors behind d
  double scale = 0.0;  // common utility scale of the family
  DeltaMode delta_mode = DeltaMode::fixed_one;
};

// weights default to the candidates' chance reach probabilities.
ClusterProblem build_cluster_problem(const GameTree& game, const AbstractionMap& base,
                                     const std::vector<int>& candidates, DeltaMode mode,
                                     const std::vector<double>* weights = nullptr);

struct MetricCheck {
  bool ok = true;
  std::string condition;  // violated axiom
  int x = -1, y = -1, z = -1;
};
// Checks the metric axioms after merging zero-distance candidates.
MetricCheck validate_metric(const ClusterProblem& problem, double tol = 1e-9);

struct Clustering {
  std::vector<int> cluster_of;      // per candidate position
  int k = 0;
  double objective = 0.0;
  std::vector<int> representative;  // per cluster: lowest candidate position
};

double diameter_objective(const ClusterProblem& p, const std::vector<int>& cluster_of);
double weighted_sum_objective(const ClusterProblem& p, const std::vector<int>& cluster_of);

// Farthest-point traversal from the lowest-index candidate; assignment to
// the nearest center (ties to the lowest center). Objective reported is the
// max intra-cluster distance.
Clustering gonzalez_cluster(const ClusterProblem& p, int k);

// Optimal partition into at most k clusters by branch and bound over
// assignments, seeded with the farthest-point solution. Zero-distance
// candidates are merged beforehand; at most `guard` effective points.
// `custom` (given a full assignment, its objective; must not decrease when
// clusters grow) replaces the built-in objective when provided.
Clustering exact_cluster(const ClusterProblem& p, int k, ClusterObjective objective,
                         int guard = 25,
                         const std::function<double(const std::vector<int>&)>* custom = nullptr);

// Merge each cluster of each group into one abstract set and verify that the
// distances recomputed from the resulting error report match the problem
// matrices within tol. `base` carries merges already committed (typically at
// deeper levels); its classes are kept and the candidates must not already
// be merged by it.
AbstractionMap build_abstraction(const GameTree& game,
                                 const std::vector<std::pair<const ClusterProblem*, const Clustering*>>& groups,
                                 double tol = 1e-9, bool check_distances = true,
                                 const AbstractionMap* base = nullptr);

}  // namespace efg
