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

#include <Eigen/Core>
#include <string>

#include "parkslam/association.hpp"
#include "parkslam/factor_graph.hpp"

namespace parkslam {

/// Estimator settings shared by mapping and localization.
struct PipelineConfig {
  AssociationConfig association;
  /// Cap on the prediction-dependent association gate.
  double gate_cap = 2.5;
  LazyConfig lazy;
  LmConfig lm;
  DeadReckonerConfig dead_reckoner;

  /// Corner measurement sigma for trusted readings and for the rest (m).
  double corner_sigma_confident = 0.1;
  double corner_sigma_uncertain = 0.25;
  /// Odometry sigma per frame: forward, lateral (m), heading (rad).
  Eigen::Vector3d odometry_sigma{0.02, 0.02, 0.01};

  double tag_side = 0.488;
  double tag_tolerance = 5.0 * 3.14159265358979323846 / 180.0;
  double tag_max_range = 20.0;
  /// Assumed corner pixel noise behind the bearing of a tag.
  double tag_pixel_sigma = 0.5;
  /// Pixel noise used for the range. PnP range at 10-20 m is biased short by
  /// a sizable share of its spread, so it is weighted well below the bearing.
  double tag_range_pixel_sigma = 4.0;
  double tag_min_sigma = 0.05;

  int optimize_interval = 50;
  int window_size = 10;
  int lost_track_frames = 20;

  void validate() const;
};

/// Reads a JSON object; absent keys keep their defaults. Throws ParseError
/// on malformed input or unknown keys, IoFailure when the file cannot be read.
PipelineConfig load_config(const std::string& path);
PipelineConfig parse_config(const std::string& json_text);

}  // namespace parkslam
