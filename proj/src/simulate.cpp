#include "cnma/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <thread>

#include "cnma/disconnect.hpp"
#include "cnma/errors.hpp"
#include "cnma/selector.hpp"
#include "cnma/stats.hpp"

namespace cnma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kSingles = {"A", "B", "C", "D"};
const std::vector<std::string> kAllLabels = {"P", "A", "B", "C", "D", "A+B", "A+C", "C+D"};

/// Comparisons absent from the simulated evidence structure.
bool omitted_pair(const std::string& x, const std::string& y) {
  auto is = [&](const std::string& a, const std::string& b) {
    return (x == a && y == b) || (x == b && y == a);
  };
  return is("A", "B") || is("A", "A+B") || is("A", "A+C") || is("A", "C+D");
}

int component_count(const std::string& label) {
  return 1 + static_cast<int>(std::count(label.begin(), label.end(), '+'));
}

/// Baseline arm of a pair: placebo when present, else the arm with fewer
/// components, ties to the lexicographically smaller label.
std::string baseline_of(const std::string& x, const std::string& y) {
  if (x == "P" || y == "P") return "P";
  const int cx = component_count(x), cy = component_count(y);
  if (cx != cy) return cx < cy ? x : y;
  return std::min(x, y);
}

/// True when the placebo comparison for this intervention is observed twice.
bool doubled_vs_placebo(const std::string& other) {
  return other == "A" || other == "B" || other == "A+B" || other == "A+C";
}

/// The fixed study layout as (non-baseline, baseline) label pairs with
/// multiplicity, placebo comparisons first, then grouped by baseline label.
std::vector<std::pair<std::string, std::string>> study_layout() {
  std::vector<std::pair<std::string, std::string>> layout;
  auto add_pairs = [&](bool placebo_block) {
    for (const std::string& b : kAllLabels)
      for (const std::string& o : kAllLabels) {
        if (o == b || omitted_pair(o, b)) continue;
        if (baseline_of(o, b) != b) continue;
        if ((b == "P") != placebo_block) continue;
        const int copies = (b == "P" && doubled_vs_placebo(o)) ? 2 : 1;
        for (int c = 0; c < copies; ++c) layout.emplace_back(o, b);
      }
  };
  add_pairs(true);
  add_pairs(false);
  return layout;
}

double true_delta(const std::string& label, const ScenarioConfig& config) {
  if (label == "P") return 0.0;
  double delta = 0.0;
  const Intervention parsed = parse_intervention_label(label);
  for (const std::string& comp : parsed.components) delta += std::log(config.exp_effects.at(comp));
  const std::string carrier = interaction_on_ab(config.scenario) ? "A+B" : "C+D";
  if (label == carrier) delta += std::log(interaction_ratio(config.scenario));
  return delta;
}

std::uint64_t cell_key(const ScenarioConfig& config) {
  std::uint64_t state = config.seed;
  std::uint64_t key = split_seed(state);
  auto fold = [&key](std::uint64_t v) {
    std::uint64_t s = v;
    key ^= split_seed(s) + 0x9e3779b97f4a7c15ull + (key << 6) + (key >> 2);
  };
  fold(static_cast<std::uint64_t>(config.scenario) + 1);
  fold(std::bit_cast<std::uint64_t>(config.tau2));
  fold(config.mode == SimMode::disconnected ? 2u : 1u);
  return key;
}

/// Per-run error and coverage, averaged over the estimable effects only.
struct RunPerf {
  double mse = 0.0;
  double cp = 0.0;
  int inestimable = 0;
  bool valid = false;  // at least one estimable effect
};

RunPerf evaluate_run(const std::vector<EffectEstimate>& effects, const Eigen::VectorXd& truth) {
  if (static_cast<int>(effects.size()) != truth.size())
    throw InputError("effect vector length does not match the truth vector");
  RunPerf perf;
  double se_sum = 0.0, cover_sum = 0.0;
  int used = 0;
  for (int i = 0; i < truth.size(); ++i) {
    if (!effects[i].estimable) {
      ++perf.inestimable;
      continue;
    }
    const double err = effects[i].estimate - truth[i];
    se_sum += err * err;
    if (truth[i] >= effects[i].low && truth[i] <= effects[i].high) cover_sum += 1.0;
    ++used;
  }
  if (used > 0) {
    perf.mse = se_sum / used;
    perf.cp = cover_sum / used;
    perf.valid = true;
  }
  return perf;
}

/// Everything recorded about one simulation run.
struct RunRecord {
  std::string selected;
  bool significant = false;
  std::map<std::string, RunPerf> perf;
};

/// Selection inside the simulation keeps the placebo column in the additive
/// model (placebo is treated as a component of its own rather than zeroed
/// out) and breaks exact Q ties between candidate interactions with the run's
/// engine. Both choices mirror how reference analyses of these networks
/// behave: an argmin over floating-point Q values treats span-equivalent
/// candidates as exchangeable rather than favouring any fixed order.
SelectionTrace simulate_select(const Network& net, PhiloxEngine& rng) {
  SelectOptions options;
  options.tie_rng = &rng;
  return forward_select(net, {}, options);
}

RunRecord run_connected(const ScenarioConfig& config, std::uint64_t key, int run,
                        const Eigen::VectorXd& truth) {
  PhiloxEngine rng(key, static_cast<std::uint64_t>(run));
  const Network net = generate_network(config, rng);
  const int p = net.require_intervention("P");

  const ModelFit nma = fit_nma(net, p);
  const SelectionTrace trace = simulate_select(net, rng);
  const QDifference diff = q_difference_test(trace.additive, nma);

  RunRecord rec;
  rec.selected = interaction_set_name(trace.final_interactions);
  rec.significant = diff.p < 0.05;
  rec.perf["nma"] = evaluate_run(effects_vs_reference(nma, p), truth);
  rec.perf["additive"] = evaluate_run(effects_vs_reference(trace.additive, p), truth);
  rec.perf["selected"] = evaluate_run(effects_vs_reference(trace.final_model, p), truth);
  return rec;
}

RunRecord run_disconnected(const ScenarioConfig& config, std::uint64_t key, int run,
                           const Eigen::VectorXd& truth) {
  PhiloxEngine rng(key, static_cast<std::uint64_t>(run));
  const Network net = generate_network(config, rng);
  const std::vector<DisconnectedDesign> designs =
      enumerate_disconnected(net, net.require_intervention("P"));
  if (designs.empty())
    throw ModelError("the generated network admits no disconnected designs");
  const DisconnectedDesign& design = sample_disconnected(designs, rng);
  const Network reduced = apply_disconnect(net, design);
  const int p = reduced.require_intervention("P");

  const SelectionTrace trace = simulate_select(reduced, rng);

  RunRecord rec;
  rec.selected = interaction_set_name(trace.final_interactions);
  rec.perf["additive"] = evaluate_run(effects_vs_reference(trace.additive, p), truth);
  rec.perf["selected"] = evaluate_run(effects_vs_reference(trace.final_model, p), truth);
  return rec;
}

}  // namespace

Scenario parse_scenario(const std::string& name) {
  if (name == "A") return Scenario::A;
  if (name == "B1") return Scenario::B1;
  if (name == "B2") return Scenario::B2;
  if (name == "C1") return Scenario::C1;
  if (name == "C2") return Scenario::C2;
  throw InputError("unknown scenario '" + name + "' (expected A, B1, B2, C1 or C2)");
}

SimMode parse_sim_mode(const std::string& name) {
  if (name == "connected") return SimMode::connected;
  if (name == "disconnected") return SimMode::disconnected;
  throw InputError("unknown simulation mode '" + name + "' (expected connected or disconnected)");
}

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::A: return "A";
    case Scenario::B1: return "B1";
    case Scenario::B2: return "B2";
    case Scenario::C1: return "C1";
    case Scenario::C2: return "C2";
  }
  throw InputError("invalid scenario value");
}

std::string to_string(SimMode mode) {
  return mode == SimMode::connected ? "connected" : "disconnected";
}

double interaction_ratio(Scenario scenario) {
  switch (scenario) {
    case Scenario::A: return 1.0;
    case Scenario::B1:
    case Scenario::B2: return 1.5;
    case Scenario::C1:
    case Scenario::C2: return 2.0;
  }
  throw InputError("invalid scenario value");
}

bool interaction_on_ab(Scenario scenario) {
  // Scenario A is additive (ratio 1), so the carrier choice is moot there.
  return scenario == Scenario::A || scenario == Scenario::B1 || scenario == Scenario::C1;
}

void validate(const ScenarioConfig& config) {
  if (!(config.tau2 >= 0.0) || !std::isfinite(config.tau2))
    throw InputError("tau2 must be finite and >= 0");
  if (!(config.baseline_p > 0.0 && config.baseline_p < 1.0))
    throw InputError("baseline_p must lie strictly between 0 and 1");
  if (config.arm_low < 1 || config.arm_high < config.arm_low)
    throw InputError("arm size range must satisfy 1 <= arm_low <= arm_high");
  if (config.runs < 1) throw InputError("runs must be >= 1");
  if (config.exp_effects.size() != kSingles.size())
    throw InputError("exp_effects must give exactly the components A, B, C and D");
  for (const std::string& comp : kSingles) {
    auto it = config.exp_effects.find(comp);
    if (it == config.exp_effects.end())
      throw InputError("exp_effects is missing component " + comp);
    if (!(it->second > 0.0) || !std::isfinite(it->second))
      throw InputError("exp_effects[" + comp + "] must be a positive finite odds ratio");
  }
}

Eigen::VectorXd true_effects(const ScenarioConfig& config) {
  validate(config);
  const std::vector<std::string> order = {"A", "A+B", "A+C", "B", "C", "C+D", "D"};
  Eigen::VectorXd truth(static_cast<int>(order.size()));
  for (int i = 0; i < truth.size(); ++i) truth[i] = true_delta(order[i], config);
  return truth;
}

double arm_probability(double d_vs_p, double baseline_p) {
  if (!(baseline_p > 0.0 && baseline_p < 1.0))
    throw InputError("baseline_p must lie strictly between 0 and 1");
  const double odds = baseline_p / (1.0 - baseline_p) * std::exp(d_vs_p);
  return odds / (1.0 + odds);
}

Network generate_network(const ScenarioConfig& config, PhiloxEngine& rng) {
  validate(config);
  const double tau = std::sqrt(config.tau2);

  std::vector<ContrastRow> rows;
  int study = 0;
  for (const auto& [other, baseline] : study_layout()) {
    const double delta_b = true_delta(baseline, config);
    const double delta_o = true_delta(other, config);
    // The comparison-level effect absorbs the heterogeneity; the baseline
    // arm keeps its true risk.
    const double drawn = rng.normal(delta_o - delta_b, tau);
    const int n = rng.uniform_int(config.arm_low, config.arm_high);
    const int events_b = rng.binomial(n, arm_probability(delta_b, config.baseline_p));
    const int events_o = rng.binomial(n, arm_probability(delta_b + drawn, config.baseline_p));

    char id[16];
    std::snprintf(id, sizeof id, "s%02d", ++study);
    const auto [effect, std_err] = pairwise_from_binary(events_o, n, events_b, n);
    rows.push_back({id, other, baseline, effect, std_err});
  }
  return Network::from_contrasts(rows);
}

double mse_summary(const std::vector<std::vector<EffectEstimate>>& runs,
                   const Eigen::VectorXd& truth) {
  double sum = 0.0;
  int used = 0;
  for (const auto& run : runs) {
    const RunPerf perf = evaluate_run(run, truth);
    if (!perf.valid) continue;
    sum += perf.mse;
    ++used;
  }
  return used > 0 ? sum / used : kNaN;
}

double coverage_summary(const std::vector<std::vector<EffectEstimate>>& runs,
                        const Eigen::VectorXd& truth) {
  double sum = 0.0;
  int used = 0;
  for (const auto& run : runs) {
    const RunPerf perf = evaluate_run(run, truth);
    if (!perf.valid) continue;
    sum += perf.cp;
    ++used;
  }
  return used > 0 ? sum / used : kNaN;
}

SimulationSummary run_scenario(const ScenarioConfig& config, int jobs) {
  validate(config);
  if (jobs < 1) throw InputError("jobs must be >= 1");

  const std::uint64_t key = cell_key(config);
  const Eigen::VectorXd truth = true_effects(config);
  const int total = config.runs;
  const bool connected = config.mode == SimMode::connected;

  std::vector<RunRecord> slots(total);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const int run = next.fetch_add(1);
      if (run >= total) return;
      try {
        slots[run] = connected ? run_connected(config, key, run, truth)
                               : run_disconnected(config, key, run, truth);
      } catch (...) {
        std::lock_guard<std::mutex> guard(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  // Reduce in run order so the totals are bit-identical at any thread count.
  SimulationSummary summary;
  summary.config = config;
  summary.runs = total;
  if (connected) summary.n_diff = 0;

  std::map<std::string, std::pair<RunPerf, int>> totals;  // model -> (sums, valid runs)
  for (const RunRecord& rec : slots) {
    ++summary.selection_counts[rec.selected];
    if (connected && rec.significant) ++*summary.n_diff;
    for (const auto& [model, perf] : rec.perf) {
      auto& [acc, used] = totals[model];
      acc.inestimable += perf.inestimable;
      if (!perf.valid) continue;
      acc.mse += perf.mse;
      acc.cp += perf.cp;
      ++used;
    }
  }
  for (const auto& [model, entry] : totals) {
    const auto& [acc, used] = entry;
    ModelSummary ms;
    ms.mse = used > 0 ? acc.mse / used : kNaN;
    ms.cp = used > 0 ? acc.cp / used : kNaN;
    ms.inestimable = acc.inestimable;
    summary.models[model] = ms;
  }

  const double z = normal_quantile(0.975);
  const double mc_se = std::sqrt(0.95 * 0.05 / total);
  summary.monte_carlo_limits = {0.95 - z * mc_se, 0.95 + z * mc_se};
  return summary;
}

}  // namespace cnma
