#include "cnma/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cnma/errors.hpp"
#include "cnma/linalg.hpp"
#include "cnma/stats.hpp"

namespace cnma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kQTie = 1e-10;

/// All size-k index combinations of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k > n || k <= 0) return out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::threshold: return "threshold";
    case StopReason::no_candidates: return "no_candidates";
    case StopReason::df_exhausted: return "df_exhausted";
    case StopReason::cardinality_cap: return "cardinality_cap";
  }
  return "unknown";
}

std::vector<InteractionPair> candidate_interactions(
    const Network& net, const std::set<std::string>& inactive_components) {
  std::set<InteractionPair> pairs;
  for (const auto& iv : net.interventions()) {
    std::vector<std::string> active;
    for (const auto& comp : iv.components)
      if (!inactive_components.count(comp)) active.push_back(comp);
    for (std::size_t i = 0; i < active.size(); ++i)
      for (std::size_t j = i + 1; j < active.size(); ++j)
        pairs.insert(InteractionPair(active[i], active[j]));
  }
  return {pairs.begin(), pairs.end()};
}

bool is_estimable(const Network& net, const CombinationMatrix& base,
                  const InteractionPair& pair) {
  const CombinationMatrix with = add_interaction_columns(base, {pair});
  return design_rank(net, with.entries()) > design_rank(net, base.entries());
}

SelectionTrace forward_select(const Network& net, const std::set<std::string>& inactive_components,
                              const SelectOptions& options) {
  if (!(options.threshold >= 0.0 && options.threshold <= 1.0))
    throw InputError("selection threshold must lie in [0,1]");
  if (options.full_enum_pool_cap < 1 || options.full_enum_cardinality_cap < 1)
    throw InputError("enumeration caps must be at least 1");

  const CombinationMatrix base = build_combination_matrix(net, inactive_components);

  SelectionTrace trace;
  trace.threshold = options.threshold;
  trace.additive = fit_cnma(net, base);
  trace.final_model = trace.additive;

  for (const InteractionPair& pair : candidate_interactions(net, inactive_components)) {
    if (is_estimable(net, base, pair))
      trace.pool.push_back(pair);
    else
      trace.inestimable.push_back(pair);
  }
  if (trace.pool.empty()) {
    trace.stopped_because = StopReason::no_candidates;
    return trace;
  }

  const int pool_size = static_cast<int>(trace.pool.size());
  ModelFit incumbent = trace.additive;
  std::vector<InteractionPair> incumbent_set;
  bool warned_greedy = false;

  for (int card = 1;; ++card) {
    if (options.max_cardinality >= 0 && card > options.max_cardinality) {
      trace.stopped_because = StopReason::cardinality_cap;
      return trace;
    }
    // The next model would spend the last residual degree of freedom.
    if (incumbent.df <= 1) {
      trace.stopped_because = StopReason::df_exhausted;
      return trace;
    }

    const bool greedy =
        pool_size > options.full_enum_pool_cap || card > options.full_enum_cardinality_cap;
    std::vector<std::vector<InteractionPair>> subsets;
    if (greedy) {
      if (!warned_greedy) {
        trace.warnings.push_back(
            "candidate enumeration capped (pool " + std::to_string(pool_size) + ", cardinality " +
            std::to_string(card) + "); continuing with greedy supersets of the incumbent");
        warned_greedy = true;
      }
      for (const InteractionPair& pair : trace.pool) {
        if (std::find(incumbent_set.begin(), incumbent_set.end(), pair) != incumbent_set.end())
          continue;
        std::vector<InteractionPair> subset = incumbent_set;
        subset.insert(std::upper_bound(subset.begin(), subset.end(), pair), pair);
        subsets.push_back(std::move(subset));
      }
      std::sort(subsets.begin(), subsets.end());
    } else {
      for (const auto& idx : combinations(pool_size, card)) {
        std::vector<InteractionPair> subset;
        subset.reserve(card);
        for (int i : idx) subset.push_back(trace.pool[i]);
        subsets.push_back(std::move(subset));
      }
    }

    SelectionStep step;
    step.cardinality = card;
    for (auto& subset : subsets) {
      const CombinationMatrix combo = add_interaction_columns(base, subset);
      if (design_rank(net, combo.entries()) != trace.additive.rank + card)
        continue;  // jointly inestimable: some column adds no new direction
      ModelFit fit = fit_cnma(net, combo);
      CandidateRecord rec;
      rec.set = std::move(subset);
      rec.Q = fit.Q;
      rec.df = fit.df;
      rec.p_het = fit.df > 0 ? chi_square_sf(fit.Q, fit.df) : kNaN;
      rec.p_vs_incumbent = q_difference_raw(incumbent.Q, incumbent.df, fit.Q, fit.df).p;
      step.candidates.push_back(std::move(rec));
    }
    step.candidates_evaluated = static_cast<int>(step.candidates.size());

    if (step.candidates.empty()) {
      trace.steps.push_back(std::move(step));
      trace.stopped_because = StopReason::no_candidates;
      return trace;
    }
    double q_min = step.candidates.front().Q;
    for (const CandidateRecord& rec : step.candidates) q_min = std::min(q_min, rec.Q);
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < step.candidates.size(); ++i)
      if (step.candidates[i].Q <= q_min + kQTie) tied.push_back(i);
    std::size_t best = tied.front();  // candidates are in lexicographic order
    if (options.tie_rng != nullptr && tied.size() > 1)
      best = tied[static_cast<std::size_t>(
          options.tie_rng->uniform_int(0, static_cast<int>(tied.size()) - 1))];

    const CandidateRecord& chosen = step.candidates[best];
    if (chosen.p_vs_incumbent < options.threshold) {
      ModelFit best_fit = fit_cnma(net, add_interaction_columns(base, chosen.set));
      step.chosen = chosen;
      incumbent = std::move(best_fit);
      incumbent_set = chosen.set;
      trace.final_model = incumbent;
      trace.final_interactions = incumbent_set;
      trace.steps.push_back(std::move(step));
    } else {
      trace.steps.push_back(std::move(step));
      trace.stopped_because = StopReason::threshold;
      return trace;
    }
  }
}

}  // namespace cnma
