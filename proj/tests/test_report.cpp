#include <cmath>

#include "cnma/report.hpp"
#include "cnma/rng.hpp"
#include "cnma/selector.hpp"
#include "cnma/simulate.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cnma;

TEST_CASE("p-values format to 4 decimals with a floor notation") {
  CHECK(format_p(0.5227) == "0.5227");
  CHECK(format_p(0.05) == "0.0500");
  CHECK(format_p(0.0001) == "0.0001");
  CHECK(format_p(0.00009) == "< 0.0001");
  CHECK(format_p(0.0) == "< 0.0001");
  CHECK(format_p(1.0) == "1.0000");
  CHECK(format_p(std::nan("")) == "n/a");
}

TEST_CASE("Q statistics format to 2 decimals") {
  CHECK(format_q(44.804) == "44.80");
  CHECK(format_q(103.527) == "103.53");
  CHECK(format_q(0.0) == "0.00");
}

TEST_CASE("fit reports show counts, Q line and the effects table") {
  ScenarioConfig config;
  PhiloxEngine rng(3, 1);
  Network net = generate_network(config, rng);
  ModelFit fit = fit_nma(net, net.require_intervention("P"));
  const std::string text =
      render_fit_report("Standard network meta-analysis", fit, net, net.require_intervention("P"));
  CHECK(text.find("Standard network meta-analysis") == 0);
  CHECK(text.find("studies 28, comparisons 28, interventions 8") != std::string::npos);
  CHECK(text.find("df = 21") != std::string::npos);
  CHECK(text.find("Relative effects vs P") != std::string::npos);
  for (const char* label : {"A+B", "A+C", "C+D"}) CHECK(text.find(label) != std::string::npos);
  // The reference itself is not a row of its own effects table.
  CHECK(text.find("\n  P ") == std::string::npos);

  // Without a reference there is no effects table.
  const std::string bare = render_fit_report("t", fit, net, std::nullopt);
  CHECK(bare.find("Relative effects") == std::string::npos);
}

TEST_CASE("inestimable effects render as such instead of numbers") {
  // A and B are only connected through P; B vs A survives, but the additive
  // model with A, B inactive cannot say anything about C on its own.
  Network net = quick_net({{"A", "P", 0.3, 0.1},
                           {"B", "P", 0.1, 0.1},
                           {"C+D", "P", 0.4, 0.1},
                           {"C+D", "A", 0.1, 0.1}});
  ModelFit fit = fit_cnma(net, std::set<std::string>{"P"});
  const std::string text = render_fit_report("Additive model", fit, net, net.require_intervention("P"));
  CHECK(text.find("not estimable") == std::string::npos);  // this network estimates everything

  Network sparse = quick_net({{"A", "P", 0.3, 0.1}, {"C", "B", 0.2, 0.1}});
  ModelFit add = fit_cnma(sparse, std::set<std::string>{"P"});
  const std::string stext =
      render_fit_report("Additive model", add, sparse, sparse.require_intervention("P"));
  CHECK(stext.find("not estimable") != std::string::npos);
}

TEST_CASE("trace reports mark the accepted candidate and the stop reason") {
  ScenarioConfig config;
  config.scenario = Scenario::C1;
  PhiloxEngine rng(4, 2);
  Network net = generate_network(config, rng);
  SelectionTrace trace = forward_select(net, {"P"});
  const std::string text = render_trace_report(trace);
  CHECK(text.find("Forward selection") == 0);
  CHECK(text.find("candidate interactions: A*B, A*C, C*D") != std::string::npos);
  CHECK(text.find("start: additive model") != std::string::npos);
  CHECK(text.find("cardinality 1") != std::string::npos);
  CHECK(text.find("p(diff)") != std::string::npos);
  CHECK(text.find("final model: ") != std::string::npos);
  if (!trace.final_interactions.empty())
    CHECK(text.find("<- accepted") != std::string::npos);
  CHECK(text.find("stopped: " + to_string(trace.stopped_because)) != std::string::npos);
}

TEST_CASE("designs report renders one block per design, or a notice") {
  CHECK(render_designs_report({}).find("no disconnected designs") == 0);

  ScenarioConfig config;
  PhiloxEngine rng(7, 0);
  Network net = generate_network(config, rng);
  auto designs = enumerate_disconnected(net, net.require_intervention("P"));
  REQUIRE(!designs.empty());
  const std::string text = render_designs_report(designs);
  CHECK(text.find("design 1: m = " + std::to_string(designs[0].resulting_counts.m)) !=
        std::string::npos);
  CHECK(text.find("design " + std::to_string(designs.size()) + ":") != std::string::npos);
  CHECK(text.find("main: ") != std::string::npos);
  CHECK(text.find("aux:  ") != std::string::npos);
  CHECK(text.find("removed: s") != std::string::npos);
}

TEST_CASE("summary reports list selection counts and model performance") {
  ScenarioConfig config;
  config.runs = 6;
  SimulationSummary summary = run_scenario(config);
  const std::string text = render_summary_report(summary);
  CHECK(text.find("scenario A") == 0);
  CHECK(text.find("6 runs, seed 42") != std::string::npos);
  CHECK(text.find("selected models:") != std::string::npos);
  CHECK(text.find("additive") != std::string::npos);
  CHECK(text.find("difference test rejections") != std::string::npos);
  CHECK(text.find("Monte-Carlo limits") != std::string::npos);
  CHECK(text.find("coverage") != std::string::npos);
}
