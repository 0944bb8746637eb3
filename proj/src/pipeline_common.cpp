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

#include <cmath>

#include "parkslam/errors.hpp"
#include "pipeline_common.hpp"

namespace parkslam::detail {

Eigen::Matrix3d odometry_information(const PipelineConfig& config) {
  return config.odometry_sigma.cwiseProduct(config.odometry_sigma).cwiseInverse().asDiagonal();
}

Eigen::Matrix2d corner_information(const SlotId& id, const PipelineConfig& config) {
  const bool trusted = id.status() == IdStatus::Full &&
                       id.confidence_product() >= config.association.high_confidence;
  const double sigma = trusted ? config.corner_sigma_confident : config.corner_sigma_uncertain;
  return Eigen::Matrix2d::Identity() / (sigma * sigma);
}

std::vector<TagMeasurement> measure_tags(const ObservationFrame& frame, const SensorConfig& sensors,
                                         const PipelineConfig& config) {
  std::vector<TagPoseEstimate> estimates;
  for (const TagDetection& det : frame.tag_detections) {
    try {
      estimates.push_back(estimate_tag(det, sensors.camera, config.tag_side, config.tag_tolerance));
    } catch (const Error&) {
      // Degenerate or unsolvable corners: the detection carries no position.
    }
  }
  std::vector<TagMeasurement> out;
  for (const TagPoseEstimate& est : range_filter(estimates, config.tag_max_range)) {
    const Point2 body = camera_ground_to_body(est.position);
    const double d = std::max(norm(body), 1e-3);
    // Range error grows with d^2 through the apparent tag size; bearing error
    // is set by the pixel noise.
    const double range_sigma = std::max(
        config.tag_min_sigma, d * d * config.tag_range_pixel_sigma / (sensors.camera.f * config.tag_side));
    const double lateral_sigma =
        std::max(config.tag_min_sigma, d * config.tag_pixel_sigma / sensors.camera.f);
    const Eigen::Vector2d u(body.x / d, body.y / d);
    const Eigen::Vector2d v(-u.y(), u.x());
    const Eigen::Matrix2d info = u * u.transpose() / (range_sigma * range_sigma) +
                                 v * v.transpose() / (lateral_sigma * lateral_sigma);
    out.push_back({est.tag_id, body, info});
  }
  return out;
}

Pose2 advance(DeadReckoner& dr, const ObservationFrame& frame, double dt) {
  return dr.predict(frame.odom.speed, frame.odom.steering, frame.odom.compass, dt);
}

}  // namespace parkslam::detail
