#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cnma/combination.hpp"
#include "cnma/estimator.hpp"
#include "cnma/network.hpp"
#include "cnma/rng.hpp"

namespace cnma {

/// Every unordered component pair that co-occurs in at least one observed
/// intervention, in lexicographic order. Inactive components never appear.
std::vector<InteractionPair> candidate_interactions(
    const Network& net, const std::set<std::string>& inactive_components = {});

/// True iff appending the interaction column strictly increases the rank of
/// the comparison design, i.e. the interaction can be told apart from the
/// effects already in the model.
bool is_estimable(const Network& net, const CombinationMatrix& base, const InteractionPair& pair);

struct SelectOptions {
  /// Accept a richer model when its Q-difference p-value is below this
  /// (0.157 is the AIC-equivalent threshold).
  double threshold = 0.157;
  /// Hard limit on accepted interactions; negative = unlimited.
  int max_cardinality = -1;
  /// Best-subset enumeration limits; beyond either, fall back to greedy
  /// supersets of the incumbent (with a warning recorded on the trace).
  int full_enum_pool_cap = 12;
  int full_enum_cardinality_cap = 4;
  /// Candidates whose Q agree within 1e-10 are tied. By default the
  /// lexicographically smallest tied set wins, which keeps selection
  /// deterministic. On sparse networks whole groups of candidates can span
  /// the same model space and tie exactly; supplying an engine here breaks
  /// such ties uniformly at random instead, so tied candidates are treated
  /// exchangeably. The engine is only consumed when a tie occurs.
  PhiloxEngine* tie_rng = nullptr;
};

enum class StopReason { threshold, no_candidates, df_exhausted, cardinality_cap };

std::string to_string(StopReason reason);

/// One fitted candidate model at some cardinality.
struct CandidateRecord {
  std::vector<InteractionPair> set;  // sorted
  double Q = 0.0;
  int df = 0;
  double p_het = 0.0;           // NaN when df = 0
  double p_vs_incumbent = 1.0;  // Q-difference test against the incumbent
};

struct SelectionStep {
  int cardinality = 0;
  int candidates_evaluated = 0;
  std::vector<CandidateRecord> candidates;  // enumeration order (lexicographic)
  /// The accepted candidate; empty when this step stopped the search.
  std::optional<CandidateRecord> chosen;
};

struct SelectionTrace {
  std::vector<SelectionStep> steps;
  ModelFit additive;                           // the starting model
  ModelFit final_model;                        // the incumbent at stop time
  std::vector<InteractionPair> final_interactions;
  std::vector<InteractionPair> pool;           // individually estimable candidates
  std::vector<InteractionPair> inestimable;    // excluded before step 1
  StopReason stopped_because = StopReason::no_candidates;
  double threshold = 0.157;
  std::vector<std::string> warnings;
};

/// Forward model selection from the additive CNMA: at cardinality t+1 fit all
/// (jointly) estimable size-(t+1) subsets of the candidate pool, take the one
/// with the smallest Q (ties within 1e-10 go to the lexicographically
/// smallest set), accept it when the chi-square p-value of the Q difference
/// against the incumbent is below the threshold, stop otherwise. Works on
/// connected and disconnected networks alike.
SelectionTrace forward_select(const Network& net,
                              const std::set<std::string>& inactive_components = {},
                              const SelectOptions& options = {});

}  // namespace cnma
