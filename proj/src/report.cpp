#include "cnma/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace cnma {

namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string pct(int count, int total) {
  return fixed(100.0 * count / total, 1) + "%";
}

}  // namespace

std::string format_p(double p) {
  if (std::isnan(p)) return "n/a";
  if (p < 0.0001) return "< 0.0001";
  return fixed(p, 4);
}

std::string format_q(double q) { return fixed(q, 2); }

std::string render_fit_report(const std::string& title, const ModelFit& fit, const Network& net,
                              std::optional<int> reference, double level) {
  std::ostringstream out;
  out << title << "\n";
  out << "  studies " << net.k() << ", comparisons " << net.m() << ", interventions " << net.n()
      << "\n";
  out << "  common-effect Q = " << format_q(fit.Q) << ", df = " << fit.df
      << ", p = " << format_p(fit.p_Q) << "\n";
  out << "  tau^2 (method of moments) = " << fixed(fit.tau2, 4) << "\n";
  out << "  design rank " << fit.rank << ", columns: " << join(fit.columns, ", ") << "\n";
  if (!reference) return out.str();

  const std::string ref_label = net.interventions()[*reference].label;
  out << "\nRelative effects vs " << ref_label << " (log scale, " << fixed(100.0 * level, 0)
      << "% CI):\n";
  std::size_t width = 12;
  for (const Intervention& iv : net.interventions()) width = std::max(width, iv.label.size());
  char buf[160];
  std::snprintf(buf, sizeof buf, "  %-*s %9s %9s   %s\n", static_cast<int>(width), "intervention",
                "estimate", "std err", "interval");
  out << buf;
  for (const EffectEstimate& eff : effects_vs_reference(fit, *reference, level)) {
    const std::string& label = net.interventions()[eff.treat1].label;
    if (eff.estimable) {
      std::snprintf(buf, sizeof buf, "  %-*s %9.4f %9.4f   [%8.4f, %8.4f]\n",
                    static_cast<int>(width), label.c_str(), eff.estimate, eff.std_err, eff.low,
                    eff.high);
    } else {
      std::snprintf(buf, sizeof buf, "  %-*s %9s %9s   not estimable\n", static_cast<int>(width),
                    label.c_str(), ".", ".");
    }
    out << buf;
  }
  return out.str();
}

std::string render_trace_report(const SelectionTrace& trace) {
  std::ostringstream out;
  out << "Forward selection (accept while p(vs incumbent) < " << trace.threshold << ")\n";
  std::vector<std::string> pool_names;
  for (const InteractionPair& pair : trace.pool) pool_names.push_back(pair.name());
  out << "  candidate interactions: "
      << (pool_names.empty() ? std::string("none") : join(pool_names, ", ")) << "\n";
  if (!trace.inestimable.empty()) {
    std::vector<std::string> names;
    for (const InteractionPair& pair : trace.inestimable) names.push_back(pair.name());
    out << "  inestimable on this network: " << join(names, ", ") << "\n";
  }
  out << "  start: additive model, Q = " << format_q(trace.additive.Q)
      << ", df = " << trace.additive.df << ", p = " << format_p(trace.additive.p_Q)
      << ", tau^2 = " << fixed(trace.additive.tau2, 4) << "\n";

  std::size_t width = 12;
  for (const SelectionStep& step : trace.steps)
    for (const CandidateRecord& rec : step.candidates)
      width = std::max(width, interaction_set_name(rec.set).size());
  char buf[160];
  for (const SelectionStep& step : trace.steps) {
    out << "\n  cardinality " << step.cardinality << " (" << step.candidates_evaluated
        << " estimable candidate" << (step.candidates_evaluated == 1 ? "" : "s") << ")\n";
    if (step.candidates.empty()) continue;
    std::snprintf(buf, sizeof buf, "    %-*s %10s %4s %10s %10s\n", static_cast<int>(width),
                  "model", "Q", "df", "p(het)", "p(diff)");
    out << buf;
    for (const CandidateRecord& rec : step.candidates) {
      const std::string name = interaction_set_name(rec.set);
      const bool chosen = step.chosen && step.chosen->set == rec.set;
      std::snprintf(buf, sizeof buf, "    %-*s %10s %4d %10s %10s%s\n", static_cast<int>(width),
                    name.c_str(), format_q(rec.Q).c_str(), rec.df, format_p(rec.p_het).c_str(),
                    format_p(rec.p_vs_incumbent).c_str(), chosen ? "   <- accepted" : "");
      out << buf;
    }
  }
  out << "\n  stopped: " << to_string(trace.stopped_because) << "\n";
  out << "  final model: " << interaction_set_name(trace.final_interactions)
      << ", Q = " << format_q(trace.final_model.Q) << ", df = " << trace.final_model.df
      << ", p = " << format_p(trace.final_model.p_Q)
      << ", tau^2 = " << fixed(trace.final_model.tau2, 4) << "\n";
  return out.str();
}

std::string render_designs_report(const std::vector<DisconnectedDesign>& designs) {
  if (designs.empty())
    return "no disconnected designs: every non-reference intervention compares only against the "
           "reference\n";
  std::ostringstream out;
  out << designs.size() << " disconnected design" << (designs.size() == 1 ? "" : "s")
      << " (sorted by decreasing comparisons, then studies)\n";
  for (std::size_t i = 0; i < designs.size(); ++i) {
    const DisconnectedDesign& d = designs[i];
    out << "\ndesign " << (i + 1) << ": m = " << d.resulting_counts.m
        << ", k = " << d.resulting_counts.k << ", subnetworks = " << d.resulting_counts.n_c
        << ", removed studies = " << d.removed_studies.size() << "\n";
    out << "  main: " << join(d.main_set, ", ") << "\n";
    for (const std::vector<std::string>& aux : d.auxiliary_partition)
      out << "  aux:  " << join(aux, ", ") << "\n";
    out << "  removed: "
        << join(std::vector<std::string>(d.removed_studies.begin(), d.removed_studies.end()), ", ")
        << "\n";
  }
  return out.str();
}

std::string render_summary_report(const SimulationSummary& summary) {
  std::ostringstream out;
  out << "scenario " << to_string(summary.config.scenario)
      << ", tau^2 = " << summary.config.tau2 << ", " << to_string(summary.config.mode)
      << " mode, " << summary.runs << " runs, seed " << summary.config.seed << "\n";
  out << "\nselected models:\n";
  std::size_t width = 8;
  for (const auto& [model, count] : summary.selection_counts)
    width = std::max(width, model.size());
  char buf[160];
  for (const auto& [model, count] : summary.selection_counts) {
    std::snprintf(buf, sizeof buf, "  %-*s %6d  (%s)\n", static_cast<int>(width), model.c_str(),
                  count, pct(count, summary.runs).c_str());
    out << buf;
  }
  if (summary.n_diff)
    out << "\nadditive vs NMA difference test rejections at 5%: " << *summary.n_diff << " ("
        << pct(*summary.n_diff, summary.runs) << ")\n";
  out << "\nmodel performance (95% Monte-Carlo limits ["
      << fixed(summary.monte_carlo_limits.first, 4) << ", "
      << fixed(summary.monte_carlo_limits.second, 4) << "]):\n";
  for (const auto& [model, ms] : summary.models) {
    std::snprintf(buf, sizeof buf, "  %-9s mse %8.4f   coverage %6.4f   inestimable %ld\n",
                  model.c_str(), ms.mse, ms.cp, ms.inestimable);
    out << buf;
  }
  return out.str();
}

}  // namespace cnma
