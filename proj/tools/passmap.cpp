// passmap: run the mapping pipeline, generate synthetic scenes, evaluate maps.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "passmap/bim_prior.hpp"
#include "passmap/config.hpp"
#include "passmap/dataset_io.hpp"
#include "passmap/errors.hpp"
#include "passmap/graph_io.hpp"
#include "passmap/pipeline.hpp"
#include "passmap/synth.hpp"

namespace fs = std::filesystem;
using namespace passmap;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kInput = 2, kProcessing = 3, kGate = 4 };

int report(const std::exception& e, int code) {
  std::cerr << "passmap: " << e.what() << "\n";
  return code;
}

// Maps library errors onto exit codes.
template <typename Fn>
int guarded(Fn fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    return report(e, kUsage);
  } catch (const ManifestMissing& e) {
    return report(e, kInput);
  } catch (const MalformedFrame& e) {
    return report(e, kInput);
  } catch (const PoseNotRigid& e) {
    return report(e, kInput);
  } catch (const SchemaError& e) {
    return report(e, kInput);
  } catch (const InvalidSpec& e) {
    return report(e, kInput);
  } catch (const Error& e) {
    return report(e, kProcessing);
  } catch (const std::exception& e) {
    return report(e, kProcessing);
  }
}

std::string summary(const SceneGraph& g, std::size_t warnings) {
  std::map<std::string, std::size_t> kinds;
  std::map<std::string, std::size_t> provenance;
  for (const auto& p : g.passages) {
    ++kinds[std::string(to_string(p.kind))];
    ++provenance[std::string(to_string(p.provenance))];
  }
  std::size_t closed = 0;
  for (const auto& d : g.doors) closed += d.state == DoorState::Closed;
  std::ostringstream out;
  out << "keyframes=" << g.trajectory.size() << "\n"
      << "walls=" << g.walls.size() << "\n"
      << "doors=" << g.doors.size() << "\n"
      << "doors_closed=" << closed << "\n"
      << "passages=" << g.passages.size() << "\n";
  for (const char* k : {"Doorway", "Archway", "Unknown"}) out << "passages_" << k << "=" << kinds[k] << "\n";
  for (const char* k : {"ClosedDoor", "Gap", "Traversal"}) out << "provenance_" << k << "=" << provenance[k] << "\n";
  out << "rooms=" << g.rooms.size() << "\n"
      << "edges=" << g.edges.size() << "\n"
      << "warnings=" << warnings << "\n"
      << "source_digest=" << g.source_digest << "\n";
  return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

struct RunArgs {
  std::string dataset;
  std::string out;
  std::string config;
  std::vector<std::string> overrides;
  std::string rooms;
  std::string export_cloud;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool verbose = false;
};

int cmd_run(const RunArgs& a) {
  PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : read_config(a.config);
  for (const auto& o : a.overrides) apply_override(cfg, o);
  cfg.validate();
  std::vector<RoomRegion> rooms;
  if (!a.rooms.empty()) rooms = read_rooms(a.rooms);
  const auto frames = load_sequence(a.dataset, a.threads);

  const RuntimeOptions rt{a.threads};
  SceneGraph g = make_graph(cfg);
  g.rooms = rooms;
  std::size_t warnings = 0;
  auto emit = [&](const std::vector<std::string>& w) {
    warnings += w.size();
    if (a.verbose) {
      for (const auto& line : w) std::cerr << "warning: " << line << "\n";
    }
  };
  for (const auto& kf : frames) {
    KeyframeReport rep;
    g = process_keyframe(std::move(g), kf, &rep, rt);
    emit(rep.warnings);
  }
  std::vector<std::string> final_warnings;
  refresh_passages(g, rt, &final_warnings);
  emit(final_warnings);

  write_graph(a.out, g);
  if (!a.export_cloud.empty()) write_sply(a.export_cloud, export_map_cloud(g));
  std::cout << summary(g, warnings);
  return kOk;
}

struct SynthArgs {
  std::string spec;
  std::string preset;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  SceneSpec spec;
  if (!a.preset.empty()) {
    if (a.preset != "office3") throw ConfigError("unknown preset '" + a.preset + "' (available: office3)");
    spec = office3_scene();
  } else {
    spec = read_scene_spec(a.spec);
  }
  const SyntheticDataset data = generate(spec);
  write_synthetic(a.out, data);
  write_text(fs::path(a.out) / "scene.json", save_scene_spec(spec));
  std::size_t points = 0;
  for (const auto& kf : data.keyframes) points += kf.cloud.size();
  std::cout << "keyframes=" << data.keyframes.size() << "\n"
            << "points=" << points << "\n"
            << "truth_passages=" << data.truth.passages.size() << "\n";
  return kOk;
}

struct EvalArgs {
  std::string graph;
  std::string truth;
  std::string prior;
  double match_radius = 0.5;
  double align_tol = 0.15;
  std::optional<double> min_recall;
  std::string upgraded_out;
};

int cmd_eval(const EvalArgs& a) {
  SceneGraph g = read_graph(a.graph);
  double recall = 1.0;
  if (!a.truth.empty()) {
    const ScoreMetrics m = score(g.passages, read_truth(a.truth), a.match_radius);
    std::cout << format_metrics(m);
    recall = m.recall;
  } else {
    const auto planned = read_prior(a.prior);
    const ValidationReport r = validate_against_prior(g.passages, planned, a.match_radius, a.align_tol);
    if (!planned.empty()) recall = static_cast<double>(r.matched.size()) / static_cast<double>(planned.size());
    std::cout << format_report(r) << "recall=" << format_double(recall) << "\n";
    if (!a.upgraded_out.empty()) {
      g.passages = upgrade_kinds_from_prior(std::move(g.passages), r, planned);
      write_graph(a.upgraded_out, g);
    }
  }
  if (a.min_recall && recall < *a.min_recall) {
    std::cerr << "passmap: recall " << format_double(recall) << " is below --min-recall "
              << format_double(*a.min_recall) << "\n";
    return kGate;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Passage-aware structural mapping for labeled RGB-D keyframes"};
  app.require_subcommand(1);
  app.footer("Pipeline configuration keys (file section.key, or --set section.key=value):\n" + config_help() +
             "\nExit codes: 0 ok, 1 usage/config, 2 input parse, 3 processing, 4 gate failure.");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Build a scene graph from a keyframe dataset");
  run_cmd->add_option("--dataset", run.dataset, "Dataset directory containing manifest.json")->required();
  run_cmd->add_option("--out", run.out, "Output scene graph file")->required();
  run_cmd->add_option("--config", run.config, "Config file (config/1)");
  run_cmd->add_option("--set", run.overrides, "Override one key, section.key=value (repeatable)");
  run_cmd->add_option("--rooms", run.rooms, "Room regions file (rooms/1) for connectivity");
  run_cmd->add_option("--export-cloud", run.export_cloud, "Write the map's wall and door points as .sply");
  run_cmd->add_option("--threads", run.threads, "Worker threads for frame parsing and gap detection")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("--verbose", run.verbose, "Print per-keyframe warnings to stderr");
  run_cmd->footer("Configuration keys:\n" + config_help());

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset with ground truth");
  auto* spec_opt = synth_cmd->add_option("--spec", synth.spec, "Scene spec file (scene/1)");
  auto* preset_opt = synth_cmd->add_option("--preset", synth.preset, "Built-in scene: office3");
  spec_opt->excludes(preset_opt);
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a scene graph against ground truth or a planned prior");
  eval_cmd->add_option("--graph", eval.graph, "Scene graph file")->required();
  auto* truth_opt = eval_cmd->add_option("--truth", eval.truth, "Ground truth file (truth/1)");
  auto* prior_opt = eval_cmd->add_option("--prior", eval.prior, "Planned passages file (bimprior/1)");
  truth_opt->excludes(prior_opt);
  eval_cmd->add_option("--match-radius", eval.match_radius, "Matching radius, m")->capture_default_str();
  eval_cmd->add_option("--align-tol", eval.align_tol, "Misalignment tolerance for --prior, m")->capture_default_str();
  eval_cmd->add_option("--min-recall", eval.min_recall, "Exit 4 when recall is below this value");
  eval_cmd->add_option("--write-upgraded", eval.upgraded_out,
                       "With --prior, write the graph with prior-confirmed passage kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*run_cmd) return guarded([&] { return cmd_run(run); });
  if (*synth_cmd) {
    if (synth.spec.empty() == synth.preset.empty()) {
      std::cerr << "passmap synth: exactly one of --spec or --preset is required\n";
      return kUsage;
    }
    return guarded([&] { return cmd_synth(synth); });
  }
  if (*eval_cmd) {
    if (eval.truth.empty() == eval.prior.empty()) {
      std::cerr << "passmap eval: exactly one of --truth or --prior is required\n";
      return kUsage;
    }
    return guarded([&] { return cmd_eval(eval); });
  }
  return kUsage;
}
