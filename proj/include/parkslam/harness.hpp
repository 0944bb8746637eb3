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

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parkslam/config.hpp"
#include "parkslam/factor_graph.hpp"
#include "parkslam/simulator.hpp"

namespace parkslam {

struct MapSlot {
  std::optional<int> id;
  /// Temporary label ("t3") kept for slots whose ID was never settled.
  std::string temp_id;
  std::array<Point2, 4> corners;

  std::string label() const { return id ? std::to_string(*id) : temp_id; }
  friend bool operator==(const MapSlot&, const MapSlot&) = default;
};

struct MapTag {
  int tag_id = 0;
  Point2 position;

  friend bool operator==(const MapTag&, const MapTag&) = default;
};

struct SemanticMap {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  std::vector<MapSlot> slots;
  std::vector<MapTag> tags;
  std::vector<Pose2> reference_trace;

  /// Unique non-temporary IDs and near-rectangular slots (every corner angle
  /// within 0.1 rad of a right angle). Throws InvalidArgument otherwise.
  void check() const;
  friend bool operator==(const SemanticMap&, const SemanticMap&) = default;
};

struct EvalReport {
  static constexpr int kFormatVersion = 1;

  /// Corner RMSE over map slots whose ID exists in the ground truth.
  double landmark_rmse = 0.0;
  double tag_rmse = 0.0;
  /// Signed perpendicular offsets from the reference trace (left positive).
  double trace_lateral_mean = 0.0;
  double trace_lateral_std = 0.0;
  /// Position RMSE of the estimated poses against ground truth.
  double trace_rmse = 0.0;
  /// Share of map slots whose resolved ID is the ID of the slot they lie on.
  double id_accuracy = 0.0;
  /// Share of slot observations attached to the right physical slot.
  double association_precision = 0.0;
  double chi2_final = 0.0;
  std::size_t frames = 0;
  bool lost_track = false;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct MapBuildResult {
  SemanticMap map;
  EvalReport report;
  /// Final factor graph, kept for audits.
  Graph graph;
  std::vector<std::size_t> active_components;
};

/// Offline mapping over the whole dataset. robust = false reduces every
/// mixture to its highest-weight component.
MapBuildResult map_build(const Dataset& dataset, const PipelineConfig& config, bool robust);

struct LocalizeResult {
  std::vector<Pose2> trace;
  EvalReport report;
  bool lost_track = false;
  /// Frames with at least one landmark matched.
  std::size_t matched_frames = 0;
};

/// Sliding-window localization against a frozen map, one pose per frame.
LocalizeResult localize(const SemanticMap& map, const Dataset& dataset,
                        const PipelineConfig& config);

struct LateralStats {
  double mean = 0.0;
  double std = 0.0;
};

/// Signed distance from `p` to the polyline (left of travel positive).
double signed_lateral_offset(Point2 p, std::span<const Pose2> reference);

/// Lateral statistics of `estimated` against the reference polyline. Throws
/// LengthMismatch when the traces differ in length.
LateralStats lateral_stats(std::span<const Pose2> estimated, std::span<const Pose2> reference);

/// Trace report of an estimated trace. Ground truth drives trace_rmse; the
/// reference drives the lateral statistics.
EvalReport evaluate(std::span<const Pose2> estimated, std::span<const Pose2> reference,
                    std::span<const Pose2> ground_truth);

/// Corner RMSE over map slots whose ID exists in `lot`; zero when none does.
double landmark_rmse(const SemanticMap& map, const GroundTruthLot& lot);
double id_accuracy(const SemanticMap& map, const GroundTruthLot& lot);
double tag_rmse(const SemanticMap& map, const GroundTruthLot& lot);

}  // namespace parkslam
