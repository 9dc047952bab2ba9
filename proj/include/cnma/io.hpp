#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cnma/disconnect.hpp"
#include "cnma/estimator.hpp"
#include "cnma/network.hpp"
#include "cnma/selector.hpp"
#include "cnma/simulate.hpp"

namespace cnma {

/// The two ingestion formats, told apart by the header row:
///   contrast  studlab,treat1,treat2,TE,seTE
///   arm_level studlab,treat1,event1,n1,treat2,event2,n2
enum class CsvKind { contrast, arm_level };

std::string to_string(CsvKind kind);

/// Reads a network from CSV, sniffing the format from the header
/// (case-insensitive). Arm-level rows are converted to log odds ratios with
/// the 0.5 zero-cell correction. Malformed input raises InputError with a
/// 1-based line number; `source` names the stream in those messages.
Network read_network_csv(std::istream& in, const std::string& source = "<input>",
                         char separator = '+');

/// Opens and reads `path`; the file name appears in error messages.
Network load_network(const std::string& path, char separator = '+');

/// Detects the format of a header line; nullopt when it matches neither.
std::optional<CsvKind> sniff_csv_header(const std::string& header_line);

/// Writes the network in the contrast-level format. Effects and standard
/// errors use the shortest representation that round-trips exactly.
void write_contrast_csv(std::ostream& out, const Network& net);
std::string contrast_csv(const Network& net);

/// JSON documents. Every top-level document carries "schema_version"; keys
/// are emitted in sorted order, so serialization is byte-deterministic.
inline constexpr int kSchemaVersion = 1;

/// A fitted model with its effects table vs `reference` (when given).
nlohmann::json fit_to_json(const ModelFit& fit, const Network& net,
                           std::optional<int> reference = std::nullopt, double level = 0.95);

/// A forward-selection trace: additive start, per-step candidate tables,
/// the accepted path and the stop reason.
nlohmann::json trace_to_json(const SelectionTrace& trace, const Network& net);

/// Enumerated disconnected designs, with 1-based ids in list order.
nlohmann::json designs_to_json(const std::vector<DisconnectedDesign>& designs);

nlohmann::json config_to_json(const ScenarioConfig& config);

/// Accepts {scenario, tau2, runs, seed, mode} plus an optional "overrides"
/// object with exp_effects, baseline_p, arm_low, arm_high. Unknown keys are
/// rejected so typos cannot silently fall back to defaults.
ScenarioConfig config_from_json(const nlohmann::json& doc);

nlohmann::json summary_to_json(const SimulationSummary& summary);

/// Long-format CSV of the selection outcome of one simulation cell:
/// scenario,tau2,mode,runs,model,count,fraction. Connected cells append one
/// n_diff row counting runs whose additive-vs-NMA difference test rejected.
std::string selection_csv(const SimulationSummary& summary);

/// Long-format CSV of MSE/coverage per fitted model:
/// scenario,tau2,mode,runs,model,mse,cp,inestimable,mc_low,mc_high.
std::string performance_csv(const SimulationSummary& summary);

/// dump(2) plus a trailing newline, the shape every emitted .json file uses.
std::string dump_json(const nlohmann::json& doc);

}  // namespace cnma
