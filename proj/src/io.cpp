#include "cnma/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cnma/errors.hpp"

namespace cnma {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    std::string::size_type comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

[[noreturn]] void fail_at(const std::string& source, int line, const std::string& what) {
  throw InputError(source + ":" + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& field, const std::string& column, const std::string& source,
                    int line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    fail_at(source, line, "cannot parse '" + field + "' as a number for column " + column);
  if (!std::isfinite(value))
    fail_at(source, line, "column " + column + " must be finite, got '" + field + "'");
  return value;
}

/// Shortest decimal form that parses back to exactly the same double.
std::string fmt_double(double v) {
  std::array<char, 32> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

const std::vector<std::string> kContrastHeader = {"studlab", "treat1", "treat2", "te", "sete"};
const std::vector<std::string> kArmHeader = {"studlab", "treat1", "event1", "n1",
                                             "treat2",  "event2", "n2"};

nlohmann::json fit_core_json(const ModelFit& fit) {
  nlohmann::json doc;
  doc["kind"] = fit.kind == FitKind::nma ? "nma" : "cnma";
  doc["columns"] = fit.columns;
  std::vector<double> beta(fit.beta.data(), fit.beta.data() + fit.beta.size());
  doc["beta"] = beta;
  doc["Q"] = fit.Q;
  doc["df"] = fit.df;
  doc["p_Q"] = std::isnan(fit.p_Q) ? nlohmann::json(nullptr) : nlohmann::json(fit.p_Q);
  doc["tau2"] = fit.tau2;
  doc["rank"] = fit.rank;
  return doc;
}

nlohmann::json effect_json(const EffectEstimate& eff, const Network& net) {
  nlohmann::json doc;
  doc["treat1"] = net.interventions()[eff.treat1].label;
  doc["treat2"] = net.interventions()[eff.treat2].label;
  doc["estimable"] = eff.estimable;
  if (eff.estimable) {
    doc["estimate"] = eff.estimate;
    doc["std_err"] = eff.std_err;
    doc["low"] = eff.low;
    doc["high"] = eff.high;
  } else {
    doc["estimate"] = nullptr;
    doc["std_err"] = nullptr;
    doc["low"] = nullptr;
    doc["high"] = nullptr;
  }
  return doc;
}

}  // namespace

std::string to_string(CsvKind kind) {
  return kind == CsvKind::contrast ? "contrast" : "arm_level";
}

std::optional<CsvKind> sniff_csv_header(const std::string& header_line) {
  std::vector<std::string> fields = split_fields(header_line);
  for (std::string& f : fields) f = lower(f);
  if (fields == kContrastHeader) return CsvKind::contrast;
  if (fields == kArmHeader) return CsvKind::arm_level;
  return std::nullopt;
}

Network read_network_csv(std::istream& in, const std::string& source, char separator) {
  std::string line;
  int lineno = 0;
  std::optional<CsvKind> kind;
  // The first non-blank line must be a recognized header.
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    kind = sniff_csv_header(line);
    if (!kind)
      fail_at(source, lineno,
              "unrecognized header '" + trim(line) +
                  "' (expected 'studlab,treat1,treat2,TE,seTE' or "
                  "'studlab,treat1,event1,n1,treat2,event2,n2')");
    break;
  }
  if (!kind) throw InputError(source + ": empty input, expected a CSV header row");

  const std::size_t want = *kind == CsvKind::contrast ? 5 : 7;
  std::vector<ContrastRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_fields(line);
    if (fields.size() != want)
      fail_at(source, lineno,
              "expected " + std::to_string(want) + " fields, got " +
                  std::to_string(fields.size()));
    ContrastRow row;
    row.study = fields[0];
    if (row.study.empty()) fail_at(source, lineno, "empty studlab");
    if (*kind == CsvKind::contrast) {
      row.treat1 = fields[1];
      row.treat2 = fields[2];
      row.effect = parse_number(fields[3], "TE", source, lineno);
      row.std_err = parse_number(fields[4], "seTE", source, lineno);
      if (row.std_err <= 0.0)
        fail_at(source, lineno, "seTE must be positive, got '" + fields[4] + "'");
    } else {
      row.treat1 = fields[1];
      row.treat2 = fields[4];
      const double e1 = parse_number(fields[2], "event1", source, lineno);
      const double n1 = parse_number(fields[3], "n1", source, lineno);
      const double e2 = parse_number(fields[5], "event2", source, lineno);
      const double n2 = parse_number(fields[6], "n2", source, lineno);
      if (n1 <= 0.0 || n2 <= 0.0) fail_at(source, lineno, "arm sizes must be positive");
      if (e1 < 0.0 || e2 < 0.0) fail_at(source, lineno, "event counts must be nonnegative");
      if (e1 > n1 || e2 > n2) fail_at(source, lineno, "event count exceeds arm size");
      const auto [te, se] = pairwise_from_binary(e1, n1, e2, n2);
      row.effect = te;
      row.std_err = se;
    }
    if (row.treat1.empty() || row.treat2.empty()) fail_at(source, lineno, "empty treatment label");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(source + ": no data rows after the header");
  return Network::from_contrasts(rows, separator);
}

Network load_network(const std::string& path, char separator) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_network_csv(in, path, separator);
}

void write_contrast_csv(std::ostream& out, const Network& net) {
  out << "studlab,treat1,treat2,TE,seTE\n";
  for (const Comparison& c : net.comparisons()) {
    out << c.study_id << ',' << net.interventions()[c.treat1].label << ','
        << net.interventions()[c.treat2].label << ',' << fmt_double(c.effect) << ','
        << fmt_double(c.std_err) << '\n';
  }
}

std::string contrast_csv(const Network& net) {
  std::ostringstream out;
  write_contrast_csv(out, net);
  return out.str();
}

nlohmann::json fit_to_json(const ModelFit& fit, const Network& net, std::optional<int> reference,
                           double level) {
  nlohmann::json doc = fit_core_json(fit);
  doc["schema_version"] = kSchemaVersion;
  doc["n_studies"] = net.k();
  doc["n_comparisons"] = net.m();
  std::vector<std::string> labels;
  labels.reserve(net.interventions().size());
  for (const Intervention& iv : net.interventions()) labels.push_back(iv.label);
  doc["interventions"] = labels;
  std::vector<double> theta(fit.theta.data(), fit.theta.data() + fit.theta.size());
  doc["theta"] = theta;
  if (reference) {
    doc["reference"] = net.interventions()[*reference].label;
    doc["level"] = level;
    nlohmann::json effects = nlohmann::json::array();
    for (const EffectEstimate& eff : effects_vs_reference(fit, *reference, level))
      effects.push_back(effect_json(eff, net));
    doc["effects_vs_reference"] = effects;
  } else {
    doc["reference"] = nullptr;
  }
  return doc;
}

nlohmann::json trace_to_json(const SelectionTrace& trace, const Network& net) {
  (void)net;
  nlohmann::json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["threshold"] = trace.threshold;
  nlohmann::json pool = nlohmann::json::array();
  for (const InteractionPair& pair : trace.pool) pool.push_back(pair.name());
  doc["pool"] = pool;
  nlohmann::json inest = nlohmann::json::array();
  for (const InteractionPair& pair : trace.inestimable) inest.push_back(pair.name());
  doc["inestimable"] = inest;
  doc["additive"] = fit_core_json(trace.additive);
  nlohmann::json steps = nlohmann::json::array();
  for (const SelectionStep& step : trace.steps) {
    nlohmann::json s;
    s["cardinality"] = step.cardinality;
    s["candidates_evaluated"] = step.candidates_evaluated;
    nlohmann::json cands = nlohmann::json::array();
    for (const CandidateRecord& rec : step.candidates) {
      nlohmann::json c;
      c["interactions"] = interaction_set_name(rec.set);
      c["Q"] = rec.Q;
      c["df"] = rec.df;
      c["p_het"] = std::isnan(rec.p_het) ? nlohmann::json(nullptr) : nlohmann::json(rec.p_het);
      c["p_vs_incumbent"] = rec.p_vs_incumbent;
      cands.push_back(std::move(c));
    }
    s["candidates"] = cands;
    s["chosen"] = step.chosen ? nlohmann::json(interaction_set_name(step.chosen->set))
                              : nlohmann::json(nullptr);
    steps.push_back(std::move(s));
  }
  doc["steps"] = steps;
  doc["final"] = fit_core_json(trace.final_model);
  doc["final"]["interactions"] = interaction_set_name(trace.final_interactions);
  doc["stopped_because"] = to_string(trace.stopped_because);
  doc["warnings"] = trace.warnings;
  return doc;
}

nlohmann::json designs_to_json(const std::vector<DisconnectedDesign>& designs) {
  nlohmann::json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["count"] = designs.size();
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t i = 0; i < designs.size(); ++i) {
    const DisconnectedDesign& d = designs[i];
    nlohmann::json entry;
    entry["id"] = i + 1;
    entry["main"] = d.main_set;
    entry["auxiliary"] = d.auxiliary_partition;
    entry["removed_studies"] = std::vector<std::string>(d.removed_studies.begin(),
                                                        d.removed_studies.end());
    entry["k"] = d.resulting_counts.k;
    entry["m"] = d.resulting_counts.m;
    entry["n_c"] = d.resulting_counts.n_c;
    list.push_back(std::move(entry));
  }
  doc["designs"] = list;
  return doc;
}

nlohmann::json config_to_json(const ScenarioConfig& config) {
  nlohmann::json doc;
  doc["scenario"] = to_string(config.scenario);
  doc["tau2"] = config.tau2;
  doc["runs"] = config.runs;
  doc["seed"] = config.seed;
  doc["mode"] = to_string(config.mode);
  doc["exp_effects"] = config.exp_effects;
  doc["baseline_p"] = config.baseline_p;
  doc["arm_low"] = config.arm_low;
  doc["arm_high"] = config.arm_high;
  return doc;
}

namespace {

void apply_override(ScenarioConfig& config, const std::string& key, const nlohmann::json& value,
                    const std::string& where) {
  if (key == "exp_effects") {
    if (!value.is_object()) throw InputError(where + ".exp_effects must be an object");
    config.exp_effects = value.get<std::map<std::string, double>>();
  } else if (key == "baseline_p") {
    config.baseline_p = value.get<double>();
  } else if (key == "arm_low") {
    config.arm_low = value.get<int>();
  } else if (key == "arm_high") {
    config.arm_high = value.get<int>();
  } else {
    throw InputError("unknown key '" + where + "." + key + "' in simulation config");
  }
}

}  // namespace

ScenarioConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("simulation config must be a JSON object");
  ScenarioConfig config;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "scenario") {
        config.scenario = parse_scenario(value.get<std::string>());
      } else if (key == "tau2") {
        config.tau2 = value.get<double>();
      } else if (key == "runs") {
        config.runs = value.get<int>();
      } else if (key == "seed") {
        config.seed = value.get<std::uint64_t>();
      } else if (key == "mode") {
        config.mode = parse_sim_mode(value.get<std::string>());
      } else if (key == "overrides") {
        if (!value.is_object()) throw InputError("'overrides' must be an object");
        for (const auto& [okey, ovalue] : value.items())
          apply_override(config, okey, ovalue, "overrides");
      } else if (key == "exp_effects" || key == "baseline_p" || key == "arm_low" ||
                 key == "arm_high") {
        apply_override(config, key, value, "config");
      } else {
        throw InputError("unknown key '" + key + "' in simulation config");
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError("bad value for config key '" + key + "': " + e.what());
    }
  }
  validate(config);
  return config;
}

nlohmann::json summary_to_json(const SimulationSummary& summary) {
  nlohmann::json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["config"] = config_to_json(summary.config);
  doc["runs"] = summary.runs;
  doc["selection_counts"] = summary.selection_counts;
  doc["n_diff"] = summary.n_diff ? nlohmann::json(*summary.n_diff) : nlohmann::json(nullptr);
  nlohmann::json models;
  for (const auto& [name, ms] : summary.models) {
    nlohmann::json m;
    m["mse"] = ms.mse;
    m["cp"] = ms.cp;
    m["inestimable"] = ms.inestimable;
    models[name] = std::move(m);
  }
  doc["models"] = models;
  doc["monte_carlo_limits"] =
      nlohmann::json::array({summary.monte_carlo_limits.first, summary.monte_carlo_limits.second});
  return doc;
}

namespace {

std::string cell_prefix(const SimulationSummary& summary) {
  return to_string(summary.config.scenario) + ',' + fmt_double(summary.config.tau2) + ',' +
         to_string(summary.config.mode) + ',' + std::to_string(summary.runs);
}

}  // namespace

std::string selection_csv(const SimulationSummary& summary) {
  std::ostringstream out;
  out << "scenario,tau2,mode,runs,model,count,fraction\n";
  const std::string prefix = cell_prefix(summary);
  const double runs = summary.runs;
  for (const auto& [model, count] : summary.selection_counts)
    out << prefix << ',' << model << ',' << count << ',' << fmt_double(count / runs) << '\n';
  if (summary.n_diff)
    out << prefix << ",n_diff," << *summary.n_diff << ',' << fmt_double(*summary.n_diff / runs)
        << '\n';
  return out.str();
}

std::string performance_csv(const SimulationSummary& summary) {
  std::ostringstream out;
  out << "scenario,tau2,mode,runs,model,mse,cp,inestimable,mc_low,mc_high\n";
  const std::string prefix = cell_prefix(summary);
  for (const auto& [model, ms] : summary.models)
    out << prefix << ',' << model << ',' << fmt_double(ms.mse) << ',' << fmt_double(ms.cp) << ','
        << ms.inestimable << ',' << fmt_double(summary.monte_carlo_limits.first) << ','
        << fmt_double(summary.monte_carlo_limits.second) << '\n';
  return out.str();
}

std::string dump_json(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

}  // namespace cnma
