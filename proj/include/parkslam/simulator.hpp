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
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "parkslam/association.hpp"
#include "parkslam/fiducial.hpp"
#include "parkslam/geometry.hpp"

namespace parkslam {

struct TagPlacement {
  int tag_id = 0;
  Point2 position;
  /// Direction the printed face points to, world frame.
  double facing = 0.0;

  friend bool operator==(const TagPlacement&, const TagPlacement&) = default;
};

/// Parking lot layout. Rows come in pairs facing a shared aisle: row 2p lies
/// below aisle p, row 2p+1 above it, and a road of aisle width runs above
/// every pair and at both ends.
struct LotSpec {
  int rows = 2;
  int slots_per_row = 20;
  double slot_width = 2.5;
  double slot_depth = 5.3;
  double aisle_width = 6.0;
  /// Row-major slot index -> two-digit ID. Empty means 10, 11, 12, ...
  std::vector<int> id_assignment;
  std::vector<TagPlacement> tag_placements;
  std::vector<Point2> entrance_corridor;

  friend bool operator==(const LotSpec&, const LotSpec&) = default;
};

/// 2 x 20 slots and `tag_count` tags, a share of them along a west entrance
/// corridor and the rest around the loop road.
LotSpec default_lot_spec(int rows = 2, int slots_per_row = 20, int tag_count = 60);

struct GroundTruthSlot {
  int id = 0;
  int row = 0;
  /// Entrance-left, entrance-right, back-right, back-left (seen from the aisle).
  std::array<Point2, 4> corners;
};

struct GroundTruthLot {
  LotSpec spec;
  std::vector<GroundTruthSlot> slots;
  std::vector<TagPlacement> tags;
  Point2 bounds_min;
  Point2 bounds_max;

  double area() const { return (bounds_max.x - bounds_min.x) * (bounds_max.y - bounds_min.y); }
  const GroundTruthSlot* find_slot(int id) const;
  const TagPlacement* find_tag(int tag_id) const;
};

/// Throws SpecOverlap on duplicate or invalid IDs and overlapping geometry.
GroundTruthLot generate_lot(const LotSpec& spec);

enum class TrajectoryKind { Loop, Straight, Repeat };

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Loop;
  double speed = 1.0;
  double dt = 0.1;
  double min_turn_radius = 2.5;
  bool clockwise = false;
  /// Straight: length along the first aisle centerline.
  double straight_length = 10.0;
  /// Repeat: the trace to replay and how many times.
  std::vector<Pose2> reference;
  int repeats = 1;
};

/// Ground-truth poses sampled every dt. Each interval is an exact arc (or a
/// straight segment), so a bicycle model with the right inputs reproduces it.
/// A loop runs around the upper row of the first pair and ends on its start
/// pose. Throws InfeasiblePath when the turn radius does not fit the roads.
std::vector<Pose2> generate_trajectory(const GroundTruthLot& lot, const TrajectorySpec& spec);

struct IdSwap {
  int true_id = 0;
  int read_id = 0;
  /// How many of the first detections of true_id are misread.
  int occurrences = 1;

  friend bool operator==(const IdSwap&, const IdSwap&) = default;
};

struct NoiseModel {
  double corner_sigma = 0.05;
  double id_p_correct = 0.85;
  double id_p_one_digit_wrong = 0.05;
  double id_p_partial = 0.05;
  double id_p_missing = 0.05;
  /// Per-step odometry noise: travelled distance (m), lateral (m), heading (rad).
  Eigen::Vector3d odom_sigma{0.02, 0.01, 0.005};
  double tag_corner_sigma = 0.5;
  double detection_range = 10.0;
  double tag_detection_range = 40.0;
  double compass_sigma = 0.01;
  std::vector<IdSwap> injected_swaps;

  void validate() const;
  static NoiseModel zero();
  /// "default", "zero" or "harsh". Throws InvalidArgument otherwise.
  static NoiseModel profile(const std::string& name);

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

/// Fixed vehicle sensor setup. The front camera sits at the vehicle origin
/// looking along the body x axis; tag centers are at camera height.
struct SensorConfig {
  CameraIntrinsics camera;
  int image_width = 1920;
  int image_height = 1080;
  double tag_side = 0.488;
  double wheelbase = 2.7;
  double dt = 0.1;

  friend bool operator==(const SensorConfig&, const SensorConfig&) = default;
};

struct OdometryReading {
  double speed = 0.0;
  double steering = 0.0;
  double compass = 0.0;

  friend bool operator==(const OdometryReading&, const OdometryReading&) = default;
};

struct ObservationFrame {
  double timestamp = 0.0;
  /// Motion from the previous frame to this one.
  OdometryReading odom;
  std::vector<SlotDetection> slot_detections;
  std::vector<TagDetection> tag_detections;
  /// Withheld from the estimator; used by evaluation only.
  Pose2 ground_truth;

  friend bool operator==(const ObservationFrame&, const ObservationFrame&) = default;
};

struct Dataset {
  std::uint64_t seed = 0;
  LotSpec lot;
  SensorConfig sensors;
  /// Known start pose; it defines the map frame.
  Pose2 start_pose;
  std::vector<ObservationFrame> frames;

  std::vector<Pose2> ground_truth_trace() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};


/// Camera-frame position of a world point (x, y, height above camera).
Eigen::Vector3d world_to_camera(const Pose2& vehicle, const Eigen::Vector3d& world);

/// Tag corners in the world (x, y, height), model order.
std::array<Eigen::Vector3d, 4> tag_world_corners(const TagPlacement& tag, double tag_side);

/// Simulated sensor output along `trajectory`. A pure function of its inputs.
Dataset render_frames(const GroundTruthLot& lot, std::span<const Pose2> trajectory,
                      const NoiseModel& noise, const SensorConfig& sensors, std::uint64_t seed);

}  // namespace parkslam
