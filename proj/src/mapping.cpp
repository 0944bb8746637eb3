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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "parkslam/errors.hpp"
#include "parkslam/harness.hpp"
#include "pipeline_common.hpp"

namespace parkslam {
namespace {

struct SlotState {
  SlotCorners vars;
  /// ID used for association: the first trusted full reading.
  std::optional<int> label;
  std::string temp_id;
};

/// A slot observation in the graph and the map slot behind each component.
struct ObservationRecord {
  std::size_t factor = 0;
  std::vector<std::size_t> component_slots;
  std::optional<int> reading;
  std::size_t truth_index = 0;
};

class Mapper {
 public:
  Mapper(const Dataset& dataset, const PipelineConfig& config, bool robust)
      : dataset_(dataset),
        config_(config),
        robust_(robust),
        dr_(dataset.start_pose, Eigen::Matrix3d::Zero(), config.dead_reckoner) {}

  MapBuildResult run();

 private:
  std::vector<MapSlotView> views() const;
  void add_observation(const CandidateSet& set, const SlotDetection& det, VariableId pose);
  void promote(const PromotedSlot& promoted);
  void add_tags(const ObservationFrame& frame, const Pose2& predicted, VariableId pose);
  void optimize_now(VariableId latest);

  const Dataset& dataset_;
  const PipelineConfig& config_;
  bool robust_;
  DeadReckoner dr_;
  Graph graph_;
  std::vector<SlotState> slots_;
  std::vector<SlotCorners> slot_vars_;
  std::map<int, VariableId> tags_;
  std::vector<ObservationRecord> records_;
  ProvisionalStore store_;
  std::vector<std::size_t> active_;
  double chi2_ = 0.0;
};

std::vector<MapSlotView> Mapper::views() const {
  std::vector<MapSlotView> out;
  out.reserve(slots_.size());
  const Estimates& est = graph_.estimates();
  for (const SlotState& s : slots_) {
    std::array<Point2, 4> c;
    for (std::size_t k = 0; k < 4; ++k) c[k] = est.point(s.vars[k]);
    out.push_back({s.label, centroid(c)});
  }
  return out;
}

void Mapper::add_observation(const CandidateSet& set, const SlotDetection& det, VariableId pose) {
  MaxMixtureFactor mixture =
      build_mixture(set, det, pose, slot_vars_, detail::corner_information(det.id, config_));
  ObservationRecord record;
  record.reading = det.id.value();
  record.truth_index = det.truth_index;
  if (robust_) {
    for (const Candidate& c : set.candidates) record.component_slots.push_back(c.slot);
  } else {
    // highest_weight_component keeps the first of the heaviest candidates.
    std::size_t best = 0;
    for (std::size_t i = 1; i < set.candidates.size(); ++i) {
      if (set.candidates[i].weight > set.candidates[best].weight) best = i;
    }
    mixture = highest_weight_component(mixture);
    record.component_slots.push_back(set.candidates[best].slot);
  }
  record.factor = graph_.add_factor(std::move(mixture));
  records_.push_back(std::move(record));
}

void Mapper::promote(const PromotedSlot& promoted) {
  const ProvisionalLandmark& lm = promoted.landmark;
  SlotState state;
  state.vars = promoted.corners;
  state.temp_id = lm.temp_id;
  for (const Sighting& s : lm.sightings) {
    const auto v = s.detection.id.value();
    if (v && s.detection.id.confidence_product() >= config_.association.high_confidence) {
      state.label = v;
      break;
    }
  }
  const std::size_t index = slots_.size();
  slots_.push_back(state);
  slot_vars_.push_back(state.vars);

  for (std::size_t i = 0; i < lm.sightings.size(); ++i) {
    const Sighting& s = lm.sightings[i];
    CandidateSet set;
    // The sighting that opened the entry defines the slot; later ones compete
    // with the candidates they were deferred from.
    if (i > 0) set.candidates = s.deferred;
    double mass = 0.0;
    for (const Candidate& c : set.candidates) mass += c.weight;
    const double weight = mass > 0.0 ? config_.association.nn_floor * mass : 1.0;
    set.candidates.push_back({index, CandidateSource::NearestNeighbor, weight, 0.0});
    add_observation(set, s.detection, s.pose);
  }
}

void Mapper::add_tags(const ObservationFrame& frame, const Pose2& predicted, VariableId pose) {
  for (const auto& m : detail::measure_tags(frame, dataset_.sensors, config_)) {
    auto it = tags_.find(m.tag_id);
    if (it == tags_.end()) {
      it = tags_.emplace(m.tag_id, graph_.add_point(transform_to_world(predicted, m.body))).first;
    }
    graph_.add_factor(TagObservationFactor{pose, it->second, m.body, m.information});
  }
}

void Mapper::optimize_now(VariableId latest) {
  OptimizeResult result;
  try {
    result = optimize(graph_, config_.lm);
  } catch (const Error& e) {
    throw Error(ErrorCategory::SolverFailure, e.what());
  }
  graph_.set_estimates(result.estimates);
  active_ = result.active_components;
  chi2_ = result.final_chi2;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  cov.diagonal() << 0.05 * 0.05, 0.05 * 0.05, 0.01 * 0.01;
  dr_.reset(graph_.estimates().pose(latest), cov);
}

MapBuildResult Mapper::run() {
  if (dataset_.frames.empty()) throw Error(ErrorCategory::InvalidArgument, "dataset has no frames");
  config_.validate();
  const double dt = dataset_.sensors.dt;
  const Eigen::Matrix3d odo_info = detail::odometry_information(config_);

  VariableId pose = graph_.add_pose(dataset_.start_pose);
  graph_.fix(pose);
  for (std::size_t k = 0; k < dataset_.frames.size(); ++k) {
    const ObservationFrame& frame = dataset_.frames[k];
    if (k > 0) {
      const Pose2 before = dr_.pose();
      const Pose2 predicted = detail::advance(dr_, frame, dt);
      const VariableId next = graph_.add_pose(predicted);
      graph_.add_factor(OdometryFactor{pose, next, between(before, predicted), odo_info});
      pose = next;
    }
    const Pose2 predicted = dr_.pose();

    AssociationConfig acfg = config_.association;
    acfg.gate_radius = gate_radius(0.5 * config_.lazy.rectangle.width, dr_.position_sigma(),
                                   config_.gate_cap);
    const auto map_views = views();
    const auto sets = pre_associate(frame.slot_detections, map_views, predicted, acfg);
    for (std::size_t d = 0; d < sets.size(); ++d) {
      const SlotDetection& det = frame.slot_detections[d];
      if (sets[d].any_in_gate()) {
        add_observation(sets[d], det, pose);
        continue;
      }
      const LazyAddResult lazy =
          lazy_add(det, predicted, pose, k, sets[d].candidates, store_, graph_, config_.lazy);
      if (lazy.promoted) promote(*lazy.promoted);
    }
    add_tags(frame, predicted, pose);

    const bool last = k + 1 == dataset_.frames.size();
    if (last || (k + 1) % static_cast<std::size_t>(config_.optimize_interval) == 0) {
      optimize_now(pose);
    }
  }

  // Votes from the active component of every fully read observation.
  std::vector<IdVote> votes;
  for (const ObservationRecord& r : records_) {
    if (!r.reading) continue;
    const std::size_t active = active_[r.factor];
    votes.push_back({r.component_slots[active], *r.reading});
  }
  std::vector<std::string> temp_ids;
  for (const SlotState& s : slots_) temp_ids.push_back(s.temp_id);
  const auto labels = resolve_ids(votes, temp_ids);

  MapBuildResult out;
  const Estimates& est = graph_.estimates();
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    MapSlot slot;
    slot.id = labels[s].id;
    slot.temp_id = labels[s].temp_id;
    for (std::size_t c = 0; c < 4; ++c) slot.corners[c] = est.point(slots_[s].vars[c]);
    out.map.slots.push_back(slot);
  }
  for (const auto& [tag_id, var] : tags_) out.map.tags.push_back({tag_id, est.point(var)});
  out.map.reference_trace = est.poses;

  const GroundTruthLot lot = generate_lot(dataset_.lot);
  EvalReport& report = out.report;
  report.frames = dataset_.frames.size();
  report.landmark_rmse = landmark_rmse(out.map, lot);
  report.id_accuracy = id_accuracy(out.map, lot);
  report.tag_rmse = tag_rmse(out.map, lot);
  report.chi2_final = chi2_;

  // Physical slot under each map slot, by centroid.
  std::vector<std::size_t> truth_of(slots_.size());
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    const Point2 c = centroid(out.map.slots[s].corners);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < lot.slots.size(); ++t) {
      const double d = distance(c, centroid(lot.slots[t].corners));
      if (d < best) {
        best = d;
        truth_of[s] = t;
      }
    }
  }
  std::size_t correct = 0;
  for (const ObservationRecord& r : records_) {
    if (truth_of[r.component_slots[active_[r.factor]]] == r.truth_index) ++correct;
  }
  report.association_precision =
      records_.empty() ? 1.0 : static_cast<double>(correct) / static_cast<double>(records_.size());

  const auto truth = dataset_.ground_truth_trace();
  const EvalReport trace = evaluate(out.map.reference_trace, truth, truth);
  report.trace_lateral_mean = trace.trace_lateral_mean;
  report.trace_lateral_std = trace.trace_lateral_std;
  report.trace_rmse = trace.trace_rmse;

  out.graph = std::move(graph_);
  out.active_components = std::move(active_);
  return out;
}

}  // namespace

MapBuildResult map_build(const Dataset& dataset, const PipelineConfig& config, bool robust) {
  return Mapper(dataset, config, robust).run();
}

}  // namespace parkslam
