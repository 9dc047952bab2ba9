#pragma once

#include <optional>
#include <string>

#include "cnma/disconnect.hpp"
#include "cnma/estimator.hpp"
#include "cnma/network.hpp"
#include "cnma/selector.hpp"
#include "cnma/simulate.hpp"

namespace cnma {

/// "0.5227", or "< 0.0001" below that resolution, or "n/a" for NaN (a
/// saturated model has no heterogeneity p-value).
std::string format_p(double p);

/// Q statistics render with 2 decimals, p-values with 4.
std::string format_q(double q);

/// Plain-text fit report: header line `title`, counts, Q/df/p, tau^2, the
/// design columns, and (when a reference is given) the effects table.
std::string render_fit_report(const std::string& title, const ModelFit& fit, const Network& net,
                              std::optional<int> reference, double level = 0.95);

/// Per-step candidate tables of a forward selection run, chosen models
/// marked, ending with the stop reason and the final model.
std::string render_trace_report(const SelectionTrace& trace);

/// One block per disconnected design: counts, main side, auxiliary
/// subnetworks, removed studies. Empty list renders a notice.
std::string render_designs_report(const std::vector<DisconnectedDesign>& designs);

/// Selection counts and model performance of one simulation cell.
std::string render_summary_report(const SimulationSummary& summary);

}  // namespace cnma
