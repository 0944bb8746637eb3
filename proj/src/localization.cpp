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

#include <deque>
#include <map>

#include "parkslam/errors.hpp"
#include "parkslam/harness.hpp"
#include "pipeline_common.hpp"

namespace parkslam {
namespace {

struct SlotObservation {
  std::vector<std::size_t> slots;
  std::vector<double> weights;
  SlotDetection detection;
  Eigen::Matrix2d information;
};

struct TagObservation {
  std::size_t tag = 0;
  Point2 body;
  Eigen::Matrix2d information;
};

struct WindowFrame {
  Pose2 estimate;
  /// Odometry from the previous frame; unused for the first frame of a run.
  Pose2 odometry;
  std::vector<SlotObservation> slots;
  std::vector<TagObservation> tags;
};

}  // namespace

LocalizeResult localize(const SemanticMap& map, const Dataset& dataset,
                        const PipelineConfig& config) {
  config.validate();
  const double dt = dataset.sensors.dt;
  const Eigen::Matrix3d odo_info = detail::odometry_information(config);

  std::vector<MapSlotView> views;
  for (const MapSlot& s : map.slots) views.push_back({s.id, centroid(s.corners)});
  std::map<int, std::size_t> tag_index;
  for (std::size_t i = 0; i < map.tags.size(); ++i) tag_index[map.tags[i].tag_id] = i;

  Eigen::Matrix3d reset_cov = Eigen::Matrix3d::Zero();
  reset_cov.diagonal() << 0.05 * 0.05, 0.05 * 0.05, 0.01 * 0.01;
  DeadReckoner dr(dataset.start_pose, Eigen::Matrix3d::Zero(), config.dead_reckoner);

  LocalizeResult result;
  std::deque<WindowFrame> window;
  int unmatched_run = 0;
  for (std::size_t k = 0; k < dataset.frames.size(); ++k) {
    const ObservationFrame& frame = dataset.frames[k];
    WindowFrame wf;
    if (k > 0) {
      const Pose2 before = dr.pose();
      wf.estimate = detail::advance(dr, frame, dt);
      wf.odometry = between(before, wf.estimate);
    } else {
      wf.estimate = dataset.start_pose;
    }

    AssociationConfig acfg = config.association;
    acfg.gate_radius =
        gate_radius(0.5 * config.lazy.rectangle.width, dr.position_sigma(), config.gate_cap);
    const auto sets = pre_associate(frame.slot_detections, views, wf.estimate, acfg);
    for (std::size_t d = 0; d < sets.size(); ++d) {
      if (!sets[d].any_in_gate()) continue;
      SlotObservation obs;
      for (const Candidate& c : sets[d].candidates) {
        obs.slots.push_back(c.slot);
        obs.weights.push_back(c.weight);
      }
      obs.detection = frame.slot_detections[d];
      obs.information = detail::corner_information(obs.detection.id, config);
      wf.slots.push_back(std::move(obs));
    }
    for (const auto& m : detail::measure_tags(frame, dataset.sensors, config)) {
      const auto it = tag_index.find(m.tag_id);
      if (it != tag_index.end()) wf.tags.push_back({it->second, m.body, m.information});
    }

    const bool matched = !wf.slots.empty() || !wf.tags.empty();
    unmatched_run = matched ? 0 : unmatched_run + 1;
    if (unmatched_run > config.lost_track_frames) result.lost_track = true;
    if (matched) ++result.matched_frames;

    window.push_back(std::move(wf));
    if (window.size() > static_cast<std::size_t>(config.window_size)) window.pop_front();

    // Window graph: frozen map landmarks, the oldest pose as anchor.
    Graph graph;
    std::map<std::size_t, SlotCorners> slot_vars;
    std::map<std::size_t, VariableId> tag_vars;
    std::vector<VariableId> poses;
    for (const WindowFrame& f : window) {
      for (const SlotObservation& o : f.slots) {
        for (const std::size_t s : o.slots) {
          if (slot_vars.contains(s)) continue;
          SlotCorners vars;
          for (std::size_t c = 0; c < 4; ++c) {
            vars[c] = graph.add_point(map.slots[s].corners[c]);
            graph.fix(vars[c]);
          }
          slot_vars.emplace(s, vars);
        }
      }
      for (const TagObservation& o : f.tags) {
        if (tag_vars.contains(o.tag)) continue;
        const VariableId v = graph.add_point(map.tags[o.tag].position);
        graph.fix(v);
        tag_vars.emplace(o.tag, v);
      }
    }
    for (std::size_t i = 0; i < window.size(); ++i) {
      poses.push_back(graph.add_pose(window[i].estimate));
      if (i == 0) {
        graph.fix(poses.back());
      } else {
        graph.add_factor(OdometryFactor{poses[i - 1], poses[i], window[i].odometry, odo_info});
      }
      for (const SlotObservation& o : window[i].slots) {
        MaxMixtureFactor f;
        f.pose = poses[i];
        f.measurements.assign(o.detection.corners.begin(), o.detection.corners.end());
        Eigen::MatrixXd info = Eigen::MatrixXd::Zero(8, 8);
        for (int c = 0; c < 4; ++c) info.block<2, 2>(2 * c, 2 * c) = o.information;
        double total = 0.0;
        for (const double w : o.weights) total += w;
        for (std::size_t j = 0; j < o.slots.size(); ++j) {
          const SlotCorners& vars = slot_vars.at(o.slots[j]);
          f.components.push_back({o.weights[j] / total, {vars.begin(), vars.end()}, info});
        }
        graph.add_factor(std::move(f));
      }
      for (const TagObservation& o : window[i].tags) {
        graph.add_factor(TagObservationFactor{poses[i], tag_vars.at(o.tag), o.body, o.information});
      }
    }

    OptimizeResult opt;
    try {
      opt = optimize(graph, config.lm);
    } catch (const Error& e) {
      throw Error(ErrorCategory::SolverFailure, e.what());
    }
    for (std::size_t i = 0; i < window.size(); ++i) window[i].estimate = opt.estimates.pose(poses[i]);
    result.trace.push_back(window.back().estimate);
    dr.reset(window.back().estimate, reset_cov);
  }

  const auto truth = dataset.ground_truth_trace();
  // Lateral statistics need a time-aligned reference; fall back to ground
  // truth when the map's trace has a different length.
  const std::span<const Pose2> reference =
      map.reference_trace.size() == truth.size() ? std::span<const Pose2>(map.reference_trace)
                                                 : std::span<const Pose2>(truth);
  result.report = evaluate(result.trace, reference, truth);
  result.report.lost_track = result.lost_track;
  return result;
}

}  // namespace parkslam
