// Python bindings. Networks cross the boundary as objects; structured
// results (fits, traces, designs, simulation summaries) cross as JSON
// strings that the cnma package parses into plain dicts, so the Python view
// is byte-for-byte the same as the CLI's JSON output.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cnma/disconnect.hpp"
#include "cnma/errors.hpp"
#include "cnma/estimator.hpp"
#include "cnma/io.hpp"
#include "cnma/network.hpp"
#include "cnma/selector.hpp"
#include "cnma/simulate.hpp"
#include "cnma/version.hpp"

namespace py = pybind11;
using namespace cnma;

namespace {

Network network_from_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return read_network_csv(in, source);
}

Network network_from_rows(
    const std::vector<std::tuple<std::string, std::string, std::string, double, double>>& rows) {
  std::vector<ContrastRow> contrast;
  contrast.reserve(rows.size());
  for (const auto& [study, treat1, treat2, effect, std_err] : rows)
    contrast.push_back({study, treat1, treat2, effect, std_err});
  return Network::from_contrasts(contrast);
}

std::vector<std::string> network_labels(const Network& net) {
  std::vector<std::string> labels;
  labels.reserve(net.interventions().size());
  for (const Intervention& iv : net.interventions()) labels.push_back(iv.label);
  return labels;
}

std::string fit_json(const Network& net, const std::string& reference, const std::string& model,
                     const std::vector<std::string>& interactions) {
  const int ref = net.require_intervention(reference);
  ModelFit fit;
  if (model == "nma") {
    if (!interactions.empty()) throw InputError("interactions only apply to model='additive'");
    fit = fit_nma(net, ref);
  } else if (model == "additive") {
    std::vector<InteractionPair> pairs;
    for (const std::string& name : interactions) pairs.push_back(parse_interaction(name));
    fit = fit_cnma(net, std::set<std::string>{reference}, pairs);
  } else {
    throw InputError("unknown model '" + model + "' (expected 'nma' or 'additive')");
  }
  return dump_json(fit_to_json(fit, net, ref));
}

std::string select_json(const Network& net, const std::string& reference, double threshold,
                        int max_cardinality) {
  net.require_intervention(reference);
  SelectOptions options;
  options.threshold = threshold;
  options.max_cardinality = max_cardinality;
  const SelectionTrace trace = forward_select(net, {reference}, options);
  return dump_json(trace_to_json(trace, net));
}

std::string designs_json(const Network& net, const std::string& reference, bool force) {
  const auto designs = enumerate_disconnected(net, net.require_intervention(reference), force);
  return dump_json(designs_to_json(designs));
}

Network apply_design(const Network& net, const std::string& reference, int design_id,
                     bool force) {
  const auto designs = enumerate_disconnected(net, net.require_intervention(reference), force);
  if (design_id < 1 || design_id > static_cast<int>(designs.size()))
    throw InputError("no disconnected design with id " + std::to_string(design_id) +
                     "; the enumeration has " + std::to_string(designs.size()) + " designs");
  return apply_disconnect(net, designs[design_id - 1]);
}

std::string simulate_json(const std::string& config_json, int jobs) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(config_json);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed simulation config JSON: ") + e.what());
  }
  const ScenarioConfig config = config_from_json(doc);
  return dump_json(summary_to_json(run_scenario(config, jobs)));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "component network meta-analysis core";
  m.attr("__version__") = kVersion;

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ModelError>(m, "ModelError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Network>(m, "Network")
      .def_static("from_csv", &network_from_csv, py::arg("text"),
                  py::arg("source") = "<string>",
                  "Parse a contrast- or arm-level CSV (format sniffed from the header).")
      .def_static("from_rows", &network_from_rows, py::arg("rows"),
                  "Build from (study, treat1, treat2, effect, std_err) tuples.")
      .def_property_readonly("n", &Network::n, "number of interventions")
      .def_property_readonly("m", &Network::m, "number of comparisons")
      .def_property_readonly("k", &Network::k, "number of studies")
      .def("labels", &network_labels, "sorted canonical intervention labels")
      .def("to_csv", [](const Network& net) { return contrast_csv(net); })
      .def("__repr__", [](const Network& net) {
        return "<cnma.Network with " + std::to_string(net.k()) + " studies, " +
               std::to_string(net.n()) + " interventions>";
      });

  m.def("fit_json", &fit_json, py::arg("net"), py::arg("reference"), py::arg("model") = "nma",
        py::arg("interactions") = std::vector<std::string>{});
  m.def("select_json", &select_json, py::arg("net"), py::arg("reference"),
        py::arg("threshold") = 0.157, py::arg("max_cardinality") = -1);
  m.def("designs_json", &designs_json, py::arg("net"), py::arg("reference"),
        py::arg("force") = false);
  m.def("apply_design", &apply_design, py::arg("net"), py::arg("reference"),
        py::arg("design_id"), py::arg("force") = false);
  m.def("simulate_json", &simulate_json, py::arg("config_json"), py::arg("jobs") = 1,
        py::call_guard<py::gil_scoped_release>());
}
