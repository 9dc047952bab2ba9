// cnma — command-line front end: fit models, run forward selection, build
// disconnected networks, drive the simulation harness, and replay manifests.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cnma/disconnect.hpp"
#include "cnma/errors.hpp"
#include "cnma/estimator.hpp"
#include "cnma/io.hpp"
#include "cnma/manifest.hpp"
#include "cnma/network.hpp"
#include "cnma/report.hpp"
#include "cnma/selector.hpp"
#include "cnma/simulate.hpp"
#include "cnma/version.hpp"

namespace fs = std::filesystem;
using namespace cnma;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw InputError("failed while writing '" + path.string() + "'");
}

fs::path prepare_out_dir(const std::string& out_flag, const std::string& anchor_path) {
  fs::path dir = out_flag.empty() ? fs::path(anchor_path).parent_path() : fs::path(out_flag);
  if (dir.empty()) dir = ".";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

void emit_manifest(const fs::path& out_dir, const std::string& stem, const std::string& command,
                   nlohmann::json resolved_config,
                   const std::map<std::string, std::string>& input_digests, std::uint64_t seed) {
  RunManifest manifest;
  manifest.command = command;
  manifest.resolved_config = std::move(resolved_config);
  manifest.input_digests = input_digests;
  manifest.seed = seed;
  manifest.version = kVersion;
  manifest.timestamp = utc_timestamp();
  write_file(out_dir / (stem + "." + command + ".manifest.json"),
             dump_json(manifest_to_json(manifest)));
}

nlohmann::json json_of_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// fit

nlohmann::json separate_nmas_json(const SeparateNmaFits& sep, const Network& net,
                                  const ConnectivityInfo& conn) {
  nlohmann::json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "separate_nmas";
  doc["q_total"] = sep.q_total;
  doc["df_total"] = sep.df_total;
  doc["p_total"] =
      std::isnan(sep.p_total) ? nlohmann::json(nullptr) : nlohmann::json(sep.p_total);
  nlohmann::json subs = nlohmann::json::array();
  for (std::size_t i = 0; i < sep.fits.size(); ++i) {
    const Network sub = subnetwork(net, conn.components[i]);
    const int local_ref =
        sub.require_intervention(net.interventions()[sep.references[i]].label);
    subs.push_back(fit_to_json(sep.fits[i], sub, local_ref));
  }
  doc["subnetworks"] = subs;
  return doc;
}

void run_fit(const nlohmann::json& cfg, const fs::path& out_dir) {
  const std::string input = cfg.at("input").get<std::string>();
  const std::string reference = cfg.at("reference").get<std::string>();
  const std::string model = cfg.at("model").get<std::string>();
  const bool per_subnetwork = cfg.at("per_subnetwork").get<bool>();
  if (cfg.at("sm").get<std::string>() != "OR")
    throw InputError("only --sm OR (log odds ratios) is supported");

  const Network net = load_network(input);
  const int ref = net.require_intervention(reference);
  const std::string stem = stem_of(input);

  std::string text;
  nlohmann::json doc;
  if (model == "nma") {
    const ConnectivityInfo conn = connectivity(net, ref);
    if (!conn.connected() && !per_subnetwork)
      throw ModelError("the network has " + std::to_string(conn.n_c()) +
                       " disconnected subnetworks, so one joint NMA is not identified; rerun "
                       "with --per-subnetwork for independent per-subnetwork analyses");
    if (per_subnetwork && !conn.connected()) {
      const SeparateNmaFits sep = fit_separate_nmas(net, ref);
      doc = separate_nmas_json(sep, net, conn);
      text = "Separate network meta-analyses (" + std::to_string(conn.n_c()) +
             " subnetworks)\n\n";
      for (std::size_t i = 0; i < sep.fits.size(); ++i) {
        const Network sub = subnetwork(net, conn.components[i]);
        const int local_ref =
            sub.require_intervention(net.interventions()[sep.references[i]].label);
        text += render_fit_report("Subnetwork " + std::to_string(i + 1), sep.fits[i], sub,
                                  local_ref);
        text += "\n";
      }
      text += "total: Q = " + format_q(sep.q_total) + ", df = " + std::to_string(sep.df_total) +
              ", p = " + format_p(sep.p_total) + "\n";
    } else {
      const ModelFit fit = fit_nma(net, ref);
      doc = fit_to_json(fit, net, ref);
      text = render_fit_report("Standard network meta-analysis", fit, net, ref);
    }
  } else if (model == "additive" || model == "interactions") {
    std::vector<InteractionPair> interactions;
    for (const auto& name : cfg.at("interactions"))
      interactions.push_back(parse_interaction(name.get<std::string>()));
    const ModelFit fit = fit_cnma(net, std::set<std::string>{reference}, interactions);
    doc = fit_to_json(fit, net, ref);
    const std::string title =
        interactions.empty()
            ? "Additive component network meta-analysis"
            : "Component network meta-analysis with interactions " +
                  interaction_set_name(interactions);
    text = render_fit_report(title, fit, net, ref);
  } else {
    throw InputError("unknown --model '" + model +
                     "' (expected nma, additive or interactions=a*b,...)");
  }

  write_file(out_dir / (stem + ".fit.json"), dump_json(doc));
  write_file(out_dir / (stem + ".fit.txt"), text);
  emit_manifest(out_dir, stem, "fit", cfg, {{input, sha256_file(input)}}, 0);
  std::cout << text;
}

// ---------------------------------------------------------------------------
// select

void run_select(const nlohmann::json& cfg, const fs::path& out_dir) {
  const std::string input = cfg.at("input").get<std::string>();
  const std::string reference = cfg.at("reference").get<std::string>();
  SelectOptions options;
  options.threshold = cfg.at("threshold").get<double>();
  options.max_cardinality = cfg.at("max_cardinality").get<int>();
  if (options.threshold < 0.0 || options.threshold > 1.0)
    throw InputError("--threshold must lie in [0, 1]");

  const Network net = load_network(input);
  net.require_intervention(reference);
  const SelectionTrace trace = forward_select(net, {reference}, options);
  const std::string stem = stem_of(input);
  const std::string text = render_trace_report(trace);

  write_file(out_dir / (stem + ".select.json"), dump_json(trace_to_json(trace, net)));
  write_file(out_dir / (stem + ".select.txt"), text);
  emit_manifest(out_dir, stem, "select", cfg, {{input, sha256_file(input)}}, 0);
  std::cout << text;
}

// ---------------------------------------------------------------------------
// disconnect

void run_disconnect(const nlohmann::json& cfg, const fs::path& out_dir) {
  const std::string input = cfg.at("input").get<std::string>();
  const std::string reference = cfg.at("reference").get<std::string>();
  const std::string action = cfg.at("action").get<std::string>();
  const bool force = cfg.at("force").get<bool>();

  const Network net = load_network(input);
  const int ref = net.require_intervention(reference);
  const std::vector<DisconnectedDesign> designs = enumerate_disconnected(net, ref, force);
  const std::string stem = stem_of(input);

  if (action == "enumerate") {
    const std::string text = render_designs_report(designs);
    write_file(out_dir / (stem + ".designs.json"), dump_json(designs_to_json(designs)));
    write_file(out_dir / (stem + ".designs.txt"), text);
    emit_manifest(out_dir, stem, "disconnect", cfg, {{input, sha256_file(input)}}, 0);
    std::cout << text;
    return;
  }

  const int id = cfg.at("id").get<int>();
  if (id < 1 || id > static_cast<int>(designs.size()))
    throw InputError("no disconnected design with id " + std::to_string(id) +
                     "; the enumeration has " + std::to_string(designs.size()) + " designs");
  const DisconnectedDesign& design = designs[id - 1];
  const Network reduced = apply_disconnect(net, design);
  write_file(out_dir / (stem + ".disconnected-" + std::to_string(id) + ".csv"),
             contrast_csv(reduced));
  emit_manifest(out_dir, stem, "disconnect", cfg, {{input, sha256_file(input)}}, 0);
  std::cout << "applied design " << id << ": removed " << design.removed_studies.size()
            << " studies, kept " << reduced.k() << " (" << design.resulting_counts.n_c
            << " subnetworks)\n";
}

// ---------------------------------------------------------------------------
// simulate

void run_simulate(const nlohmann::json& cfg, const fs::path& out_dir, const std::string& stem,
                  const std::map<std::string, std::string>& input_digests, int jobs) {
  const ScenarioConfig config = config_from_json(cfg.at("sim"));
  std::cout << "seed: " << config.seed << "\n";
  const SimulationSummary summary = run_scenario(config, jobs);

  write_file(out_dir / (stem + ".summary.json"), dump_json(summary_to_json(summary)));
  write_file(out_dir / (stem + ".selection.csv"), selection_csv(summary));
  write_file(out_dir / (stem + ".performance.csv"), performance_csv(summary));
  emit_manifest(out_dir, stem, "simulate", cfg, input_digests, config.seed);
  std::cout << "\n" << render_summary_report(summary);
}

// ---------------------------------------------------------------------------
// replay

void run_replay(const std::string& manifest_path, const std::string& out_flag, int jobs) {
  const RunManifest manifest = manifest_from_json(json_of_file(manifest_path));
  const fs::path out_dir = prepare_out_dir(out_flag, manifest_path);

  // Commands that re-read their input files must see the recorded bytes.
  if (manifest.command != "simulate") {
    for (const auto& [path, digest] : manifest.input_digests) {
      const std::string now = sha256_file(path);
      if (now != digest)
        throw InputError("input '" + path + "' changed since the manifest was written (digest " +
                         now.substr(0, 12) + "..., recorded " + digest.substr(0, 12) + "...)");
    }
  }

  if (manifest.command == "fit") {
    run_fit(manifest.resolved_config, out_dir);
  } else if (manifest.command == "select") {
    run_select(manifest.resolved_config, out_dir);
  } else if (manifest.command == "disconnect") {
    run_disconnect(manifest.resolved_config, out_dir);
  } else if (manifest.command == "simulate") {
    // The resolved simulation config is embedded, so the original config
    // file is not needed to reproduce the outputs.
    const std::string stem = manifest.input_digests.empty()
                                 ? std::string("replay")
                                 : stem_of(manifest.input_digests.begin()->first);
    run_simulate(manifest.resolved_config, out_dir, stem, manifest.input_digests, jobs);
  } else {
    throw InputError("manifest names unknown command '" + manifest.command + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"component network meta-analysis toolkit"};
  app.set_version_flag("--version", std::string("cnma ") + kVersion);
  app.require_subcommand(1);

  // fit ----------------------------------------------------------------
  std::string fit_input, fit_reference, fit_model = "nma", fit_sm = "OR", fit_out;
  bool fit_per_subnetwork = false;
  CLI::App* fit = app.add_subcommand("fit", "fit an NMA or component NMA model");
  fit->add_option("input", fit_input, "contrast- or arm-level CSV")->required();
  fit->add_option("--reference", fit_reference, "reference intervention label")->required();
  fit->add_option("--model", fit_model, "nma | additive | interactions=a*b,c*d");
  fit->add_option("--sm", fit_sm, "summary measure (only OR)");
  fit->add_flag("--per-subnetwork", fit_per_subnetwork,
                "on a disconnected network, fit one NMA per subnetwork");
  fit->add_option("--out", fit_out, "output directory (default: next to the input)");

  // select -------------------------------------------------------------
  std::string sel_input, sel_reference, sel_out;
  double sel_threshold = 0.157;
  int sel_max_cardinality = -1;
  CLI::App* select = app.add_subcommand("select", "forward interaction selection");
  select->add_option("input", sel_input, "contrast- or arm-level CSV")->required();
  select->add_option("--reference", sel_reference, "reference intervention label")->required();
  select->add_option("--threshold", sel_threshold, "acceptance p-value threshold");
  select->add_option("--max-cardinality", sel_max_cardinality,
                     "stop after this many interactions (negative: unlimited)");
  select->add_option("--out", sel_out, "output directory (default: next to the input)");

  // disconnect ---------------------------------------------------------
  std::string dis_input, dis_reference, dis_out;
  bool dis_enumerate = false, dis_force = false;
  int dis_apply = 0;
  CLI::App* disconnect = app.add_subcommand("disconnect", "construct disconnected networks");
  disconnect->add_option("input", dis_input, "contrast- or arm-level CSV")->required();
  disconnect->add_option("--reference", dis_reference, "reference intervention label")
      ->required();
  CLI::Option* enum_opt =
      disconnect->add_flag("--enumerate", dis_enumerate, "list every valid disconnected design");
  CLI::Option* apply_opt = disconnect->add_option(
      "--apply", dis_apply, "write the network of the design with this id (1-based)");
  enum_opt->excludes(apply_opt);
  disconnect->add_flag("--force", dis_force, "allow very large enumeration sweeps");
  disconnect->add_option("--out", dis_out, "output directory (default: next to the input)");

  // simulate -----------------------------------------------------------
  std::string sim_config, sim_out;
  int sim_jobs = 1;
  std::uint64_t sim_seed = 0;
  bool sim_seed_set = false;
  CLI::App* simulate = app.add_subcommand("simulate", "run one simulation cell");
  simulate->add_option("--config", sim_config, "JSON scenario configuration")->required();
  simulate->add_option("--jobs", sim_jobs, "worker threads (default 1)");
  CLI::Option* seed_opt =
      simulate->add_option("--seed", sim_seed, "master seed (overrides the config; default 42)");
  simulate->add_option("--out", sim_out, "output directory (default: next to the config)");

  // replay -------------------------------------------------------------
  std::string rep_manifest, rep_out;
  int rep_jobs = 1;
  CLI::App* replay = app.add_subcommand("replay", "re-run a recorded manifest");
  replay->add_option("manifest", rep_manifest, "a *.manifest.json written by another command")
      ->required();
  replay->add_option("--jobs", rep_jobs, "worker threads for simulation replays");
  replay->add_option("--out", rep_out, "output directory (default: next to the manifest)");

  try {
    app.parse(argc, argv);
    sim_seed_set = seed_opt->count() > 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0, any parse problem is an input error
  }

  try {
    if (*fit) {
      nlohmann::json cfg;
      cfg["input"] = fit_input;
      cfg["reference"] = fit_reference;
      std::vector<std::string> interactions;
      std::string model = fit_model;
      if (model.rfind("interactions=", 0) == 0) {
        std::string list = model.substr(std::string("interactions=").size());
        model = "interactions";
        std::size_t start = 0;
        while (start <= list.size()) {
          const std::size_t comma = list.find(',', start);
          const std::string piece = list.substr(start, comma - start);
          if (piece.empty()) throw InputError("empty interaction in --model interactions=...");
          interactions.push_back(parse_interaction(piece).name());
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
        if (interactions.empty())
          throw InputError("--model interactions=... needs at least one pair");
      }
      cfg["model"] = model;
      cfg["interactions"] = interactions;
      cfg["sm"] = fit_sm;
      cfg["per_subnetwork"] = fit_per_subnetwork;
      run_fit(cfg, prepare_out_dir(fit_out, fit_input));
    } else if (*select) {
      nlohmann::json cfg;
      cfg["input"] = sel_input;
      cfg["reference"] = sel_reference;
      cfg["threshold"] = sel_threshold;
      cfg["max_cardinality"] = sel_max_cardinality;
      run_select(cfg, prepare_out_dir(sel_out, sel_input));
    } else if (*disconnect) {
      if (!dis_enumerate && apply_opt->count() == 0)
        throw InputError("disconnect needs --enumerate or --apply ID");
      nlohmann::json cfg;
      cfg["input"] = dis_input;
      cfg["reference"] = dis_reference;
      cfg["action"] = dis_enumerate ? "enumerate" : "apply";
      if (!dis_enumerate) cfg["id"] = dis_apply;
      cfg["force"] = dis_force;
      run_disconnect(cfg, prepare_out_dir(dis_out, dis_input));
    } else if (*simulate) {
      nlohmann::json sim = json_of_file(sim_config);
      if (sim_seed_set) sim["seed"] = sim_seed;
      if (sim_jobs < 1) throw InputError("--jobs must be at least 1");
      nlohmann::json cfg;
      cfg["sim"] = config_to_json(config_from_json(sim));  // fully resolved
      run_simulate(cfg, prepare_out_dir(sim_out, sim_config), stem_of(sim_config),
                   {{sim_config, sha256_file(sim_config)}}, sim_jobs);
    } else if (*replay) {
      if (rep_jobs < 1) throw InputError("--jobs must be at least 1");
      run_replay(rep_manifest, rep_out, rep_jobs);
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
