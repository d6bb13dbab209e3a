#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "efg/abstraction.hpp"
#include "efg/game.hpp"

namespace efg {

// Leaf bijection between the leaves of two mergeable information sets.
// Leaves are keyed by (other players' action sequence from the root, the
// owner's action sequence from the set, the chance label sequence from the
// set); ambiguous keys are ordered by the full root-to-leaf chance label
// sequence and paired positionally.
struct LeafPairing {
  int from = -1, to = -1;                        // infoset indices
  std::vector<std::pair<int, int>> leaf_pairs;   // (leaf under I, leaf under J)
  std::vector<std::pair<int, int>> node_pairs;   // aligned members, I-member order
};

struct PairingFailure {
  std::string reason;
  int leaf = -1;  // a witness leaf when available
};

// How the owner's future action sequence is keyed. `abstract_ids` compares
// (class, label) pairs under `context` (strict matching); `labels_only`
// compares labels alone, i.e. evaluates a candidate pair as if its future
// sets were merged consistently below.
enum class FutureTags { abstract_ids, labels_only };

std::optional<LeafPairing> find_leaf_bijection(const GameTree& game,
                                               const AbstractionMap& context, int I, int J,
                                               FutureTags tags = FutureTags::abstract_ids,
                                               PairingFailure* failure = nullptr);

// Error terms for the ordered pair (I, J) with scaling factor delta applied
// to the J side. Node-level entries are aligned with members of I.
struct PairErrors {
  double delta = 1.0;
  std::vector<double> reward_node;      // recursive reward approximation error
  std::vector<double> transition_node;  // max sequence-class sum of leaf errors, times ubar
  std::vector<double> transition_raw;   // same without the ubar factor
  std::vector<double> dist_raw;         // |w_I(s) - w_J(phi(s))|
  std::vector<double> ubar;             // max leaf utility plus its reward error
  double dist_pair = 0.0;               // sum_s dist_raw * ubar
  double reward_leaf_max = 0.0;
  bool weights_degenerate = false;  // chance reach of the pair is zero; uniform weights used

  std::vector<double> leaf_reward, leaf_transition;  // aligned with leaf_pairs (optional)
  bool has_leaf_detail = false;
};

PairErrors compute_pair_errors(const GameTree& game, const LeafPairing& pairing, double delta,
                               bool keep_leaf_detail = false);

// Scaling factor minimizing max over leaves and players of
// |u(z) - delta * u(phi(z))|, found exactly from the crossing points of the
// piecewise-linear pieces. Ties resolve to the smallest delta; when the
// minimizing region extends to zero, min(1, right endpoint) is returned.
struct DeltaChoice {
  double delta = 1.0;
  double max_error = 0.0;
  bool degenerate = false;  // image utilities all zero; delta pinned to 1
};
DeltaChoice choose_min_max_delta(const GameTree& game, const LeafPairing& pairing);

struct VerifyFailure {
  int I = -1, J = -1;
  std::string reason;
  int leaf = -1;
};

// Full verification of an information-set merge abstraction: refinement
// check, one chance-reach pass, then per mapped pair a bijection and its
// error terms. Ordered pairs are stored for both directions.
struct VerifyResult {
  bool ok = false;
  std::optional<VerifyFailure> failure;
  std::map<std::pair<int, int>, PairErrors> pairs;

  const PairErrors& at(int I, int J) const { return pairs.at({I, J}); }
};

VerifyResult verify_crswf(const GameTree& game, const AbstractionMap& map,
                          bool keep_leaf_detail = false,
                          FutureTags tags = FutureTags::abstract_ids);

// Canonical mergeability signature: two information sets admit a leaf
// bijection under `context` iff their signatures are equal.
std::string merge_signature(const GameTree& game, const AbstractionMap& context, int is,
                            FutureTags tags = FutureTags::labels_only);

}  // namespace efg
