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

#include <optional>
#include <vector>

#include "parkslam/config.hpp"
#include "parkslam/fiducial.hpp"
#include "parkslam/simulator.hpp"

namespace parkslam::detail {

Eigen::Matrix3d odometry_information(const PipelineConfig& config);
Eigen::Matrix2d corner_information(const SlotId& id, const PipelineConfig& config);

struct TagMeasurement {
  int tag_id = 0;
  /// Tag position in the vehicle body frame.
  Point2 body;
  Eigen::Matrix2d information;
};

/// Solved, validated and range-gated tag measurements of one frame. Tags
/// whose pose cannot be solved are dropped.
std::vector<TagMeasurement> measure_tags(const ObservationFrame& frame, const SensorConfig& sensors,
                                         const PipelineConfig& config);

/// Propagates the dead reckoner over one frame's odometry.
Pose2 advance(DeadReckoner& dr, const ObservationFrame& frame, double dt);

}  // namespace parkslam::detail
