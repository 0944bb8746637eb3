// Copyright 2026 The parkslam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// parkslam command-line front end: simulate, map, localize, evaluate, plot.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "parkslam/config.hpp"
#include "parkslam/errors.hpp"
#include "parkslam/harness.hpp"
#include "parkslam/plot.hpp"
#include "parkslam/serialization.hpp"
#include "parkslam/simulator.hpp"

namespace {

using namespace parkslam;

struct ConfigOptions {
  std::string path;
  std::optional<double> gate_cap;
  std::optional<int> promotion_threshold;
  std::optional<int> optimize_interval;
  std::optional<int> window_size;
  std::optional<double> tag_max_range;
  std::optional<int> max_iterations;

  void attach(CLI::App* app) {
    app->add_option("--config", path, "JSON pipeline config");
    app->add_option("--gate-cap", gate_cap, "Association gate cap (m)");
    app->add_option("--promotion-threshold", promotion_threshold, "Sightings before a slot is added");
    app->add_option("--optimize-interval", optimize_interval, "Frames between batch optimizations");
    app->add_option("--window-size", window_size, "Localization window (poses)");
    app->add_option("--tag-max-range", tag_max_range, "Tags at or beyond this range are dropped (m)");
    app->add_option("--max-iterations", max_iterations, "Optimizer iteration limit");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg = path.empty() ? PipelineConfig{} : load_config(path);
    if (gate_cap) cfg.gate_cap = *gate_cap;
    if (promotion_threshold) cfg.lazy.promotion_threshold = *promotion_threshold;
    if (optimize_interval) cfg.optimize_interval = *optimize_interval;
    if (window_size) cfg.window_size = *window_size;
    if (tag_max_range) cfg.tag_max_range = *tag_max_range;
    if (max_iterations) cfg.lm.max_iterations = *max_iterations;
    cfg.validate();
    return cfg;
  }
};

IdSwap parse_swap(const std::string& text) {
  IdSwap swap;
  char extra = 0;
  const int n = std::sscanf(text.c_str(), "%d:%d:%d%c", &swap.true_id, &swap.read_id,
                            &swap.occurrences, &extra);
  if (n == 2) swap.occurrences = 1;
  if (n < 2 || n > 3) {
    throw Error(ErrorCategory::InvalidArgument, "swap must look like TRUE:READ[:COUNT], got '" + text + "'");
  }
  return swap;
}

void print_report(const EvalReport& r) {
  std::cout << "landmark_rmse " << r.landmark_rmse << "\n"
            << "tag_rmse " << r.tag_rmse << "\n"
            << "trace_lateral_mean " << r.trace_lateral_mean << "\n"
            << "trace_lateral_std " << r.trace_lateral_std << "\n"
            << "trace_rmse " << r.trace_rmse << "\n"
            << "id_accuracy " << r.id_accuracy << "\n"
            << "association_precision " << r.association_precision << "\n"
            << "chi2_final " << r.chi2_final << "\n"
            << "frames " << r.frames << "\n"
            << "lost_track " << (r.lost_track ? 1 : 0) << "\n";
}

int exit_code(ErrorCategory c) { return 10 + static_cast<int>(c); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic parking-lot SLAM: simulation, mapping and localization"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  std::uint64_t seed = 0;
  std::string noise_profile;
  std::string sim_out;
  std::string trajectory = "loop";
  std::string reference_path;
  int repeats = 1;
  int rows = 2;
  int slots_per_row = 20;
  int tag_count = 60;
  double speed = 1.0;
  double straight_length = 10.0;
  bool clockwise = false;
  std::optional<double> detection_range;
  std::vector<std::string> swaps;
  sim->add_option("--seed", seed, "Random seed")->required();
  sim->add_option("--noise-profile", noise_profile, "zero, default or harsh")->required();
  sim->add_option("--out,-o", sim_out, "Dataset file")->required();
  sim->add_option("--trajectory", trajectory, "loop, straight or repeat")
      ->check(CLI::IsMember({"loop", "straight", "repeat"}));
  sim->add_option("--reference", reference_path, "Trace file replayed by --trajectory repeat");
  sim->add_option("--repeats", repeats, "Replays of the reference trace");
  sim->add_option("--rows", rows, "Slot rows");
  sim->add_option("--slots-per-row", slots_per_row, "Slots per row");
  sim->add_option("--tags", tag_count, "Fiducial tag count");
  sim->add_option("--speed", speed, "Vehicle speed (m/s)");
  sim->add_option("--length", straight_length, "Straight trajectory length (m)");
  sim->add_flag("--clockwise", clockwise, "Drive the loop clockwise");
  sim->add_option("--detection-range", detection_range, "Slot detection range (m)");
  sim->add_option("--swap", swaps, "Injected misreading TRUE:READ[:COUNT]");

  // map
  auto* map_cmd = app.add_subcommand("map", "Build a semantic map from a dataset");
  ConfigOptions map_cfg;
  map_cfg.attach(map_cmd);
  std::string map_dataset;
  std::string map_out;
  std::string map_report;
  std::string map_trace;
  bool robust = true;
  map_cmd->add_option("--dataset,-d", map_dataset, "Dataset file")->required();
  map_cmd->add_option("--out,-o", map_out, "Map file")->required();
  map_cmd->add_option("--report", map_report, "Report file");
  map_cmd->add_option("--trace-out", map_trace, "Reference trace file");
  map_cmd->add_flag("--robust,!--no-robust", robust, "Max-mixture association (or the naive one)")
      ->required();

  // localize
  auto* loc = app.add_subcommand("localize", "Localize a dataset against a map");
  ConfigOptions loc_cfg;
  loc_cfg.attach(loc);
  std::string loc_map;
  std::string loc_dataset;
  std::string loc_out;
  std::string loc_report;
  loc->add_option("--map,-m", loc_map, "Map file")->required();
  loc->add_option("--dataset,-d", loc_dataset, "Dataset file")->required();
  loc->add_option("--out,-o", loc_out, "Trace file")->required();
  loc->add_option("--report", loc_report, "Report file");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Compare a trace with a reference");
  std::string eval_trace;
  std::string eval_reference;
  std::string eval_dataset;
  std::string eval_report;
  eval->add_option("--trace,-t", eval_trace, "Estimated trace file")->required();
  eval->add_option("--reference,-r", eval_reference, "Reference trace file")->required();
  eval->add_option("--dataset,-d", eval_dataset, "Dataset with ground truth (optional)");
  eval->add_option("--report", eval_report, "Report file");

  // plot
  auto* plot = app.add_subcommand("plot", "Render a map and traces as SVG");
  std::string plot_map;
  std::vector<std::string> plot_traces;
  std::string plot_out;
  plot->add_option("--map,-m", plot_map, "Map file");
  plot->add_option("--trace,-t", plot_traces, "Trace file (repeatable)");
  plot->add_option("--out,-o", plot_out, "SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) std::cerr << "error: InvalidArgument: command line\n";
    return code == 0 ? 0 : exit_code(ErrorCategory::InvalidArgument);
  }

  try {
    if (*sim) {
      LotSpec spec = default_lot_spec(rows, slots_per_row, tag_count);
      const GroundTruthLot lot = generate_lot(spec);
      TrajectorySpec ts;
      ts.speed = speed;
      ts.clockwise = clockwise;
      ts.straight_length = straight_length;
      if (trajectory == "straight") ts.kind = TrajectoryKind::Straight;
      if (trajectory == "repeat") {
        if (reference_path.empty()) {
          throw Error(ErrorCategory::InvalidArgument, "--trajectory repeat needs --reference");
        }
        ts.kind = TrajectoryKind::Repeat;
        ts.reference = import_trace(reference_path);
        ts.repeats = repeats;
      }
      const auto poses = generate_trajectory(lot, ts);
      NoiseModel noise = NoiseModel::profile(noise_profile);
      if (detection_range) noise.detection_range = *detection_range;
      for (const auto& s : swaps) noise.injected_swaps.push_back(parse_swap(s));
      const SensorConfig sensors;
      const Dataset ds = render_frames(lot, poses, noise, sensors, seed);
      export_dataset(ds, sim_out);
      std::cout << "frames " << ds.frames.size() << "\n";
    } else if (*map_cmd) {
      const PipelineConfig cfg = map_cfg.resolve();
      const Dataset ds = import_dataset(map_dataset);
      const MapBuildResult result = map_build(ds, cfg, robust);
      export_map(result.map, map_out);
      if (!map_trace.empty()) export_trace(result.map.reference_trace, map_trace);
      if (!map_report.empty()) export_report(result.report, map_report);
      print_report(result.report);
    } else if (*loc) {
      const PipelineConfig cfg = loc_cfg.resolve();
      const SemanticMap map = import_map(loc_map);
      const Dataset ds = import_dataset(loc_dataset);
      const LocalizeResult result = localize(map, ds, cfg);
      export_trace(result.trace, loc_out);
      if (!loc_report.empty()) export_report(result.report, loc_report);
      print_report(result.report);
    } else if (*eval) {
      const auto trace = import_trace(eval_trace);
      const auto reference = import_trace(eval_reference);
      const auto truth = eval_dataset.empty() ? reference : import_dataset(eval_dataset).ground_truth_trace();
      const EvalReport report = evaluate(trace, reference, truth);
      if (!eval_report.empty()) export_report(report, eval_report);
      print_report(report);
    } else if (*plot) {
      const SemanticMap map = plot_map.empty() ? SemanticMap{} : import_map(plot_map);
      std::vector<NamedTrace> traces;
      for (const auto& path : plot_traces) traces.push_back({path, import_trace(path)});
      export_plot(map, traces, plot_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: InvalidArgument: " << e.what() << "\n";
    return exit_code(ErrorCategory::InvalidArgument);
  }
  return 0;
}
