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
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parkslam/factor_graph.hpp"
#include "parkslam/geometry.hpp"

namespace parkslam {

enum class IdStatus { Full, Partial, Missing };

/// A two-digit slot number as read by the detector. Digits that could not be
/// read are stored as kUnreadable with zero confidence.
class SlotId {
 public:
  static constexpr int kUnreadable = -1;

  SlotId() = default;
  SlotId(std::array<int, 2> digits, std::array<double, 2> confidence);

  static SlotId full(int id, double confidence = 1.0);
  static SlotId missing() { return {}; }

  int digit(std::size_t i) const { return digits_[i]; }
  double confidence(std::size_t i) const { return confidence_[i]; }
  IdStatus status() const;
  /// The full two-digit value, only when both digits were read.
  std::optional<int> value() const;
  /// Product of confidences over the readable digits; 0 when nothing was read.
  double confidence_product() const;
  /// True when every readable digit agrees with `label`.
  bool matches(int label) const;
  /// "39", "3?" or "??".
  std::string to_string() const;

  friend bool operator==(const SlotId&, const SlotId&) = default;

 private:
  std::array<int, 2> digits_{kUnreadable, kUnreadable};
  std::array<double, 2> confidence_{0.0, 0.0};
};

/// One detected slot: corners in the vehicle frame, ordered entrance-left,
/// entrance-right, back-right, back-left.
struct SlotDetection {
  std::array<Point2, 4> corners;
  SlotId id;
  /// Ground-truth slot index, carried for evaluation only. Never read by the
  /// estimator.
  std::size_t truth_index = std::numeric_limits<std::size_t>::max();

  friend bool operator==(const SlotDetection&, const SlotDetection&) = default;
};

Point2 centroid(std::span<const Point2, 4> corners);

// Dead reckoning ----------------------------------------------------------------

struct DeadReckonerConfig {
  double wheelbase = 2.7;
  /// Process noise growth rates (variance per second) for x, y and heading.
  double position_noise_rate = 0.004;
  double heading_noise_rate = 0.0025;
  /// Standard deviation of the compass reading.
  double compass_sigma = 0.01;
};

/// Kinematic bicycle propagation with a scalar Kalman heading correction from
/// the compass.
class DeadReckoner {
 public:
  explicit DeadReckoner(const Pose2& initial = {},
                        const Eigen::Matrix3d& covariance = Eigen::Matrix3d::Zero(),
                        DeadReckonerConfig config = {});

  /// Advances the state by one interval. Requires dt > 0.
  Pose2 predict(double speed, double steering, double compass, double dt);

  void reset(const Pose2& pose, const Eigen::Matrix3d& covariance);

  const Pose2& pose() const { return pose_; }
  const Eigen::Matrix3d& covariance() const { return covariance_; }
  double velocity() const { return velocity_; }
  double heading() const { return heading_; }
  double wheelbase() const { return config_.wheelbase; }
  /// Square root of the largest eigenvalue of the position covariance.
  double position_sigma() const;

 private:
  Pose2 pose_;
  Eigen::Matrix3d covariance_;
  DeadReckonerConfig config_;
  double velocity_ = 0.0;
  double heading_ = 0.0;
};

/// half_entrance_width + 3 sigma, capped.
double gate_radius(double half_entrance_width, double position_sigma, double cap = 2.5);

// Pre-association -----------------------------------------------------------------

enum class CandidateSource { ExactId, PartialId, NearestNeighbor };

std::string_view to_string(CandidateSource source);

struct Candidate {
  std::size_t slot = 0;
  CandidateSource source = CandidateSource::ExactId;
  double weight = 1.0;
  /// Distance between the detection centroid (at the predicted pose) and the
  /// slot centroid.
  double centroid_distance = 0.0;
};

struct CandidateSet {
  std::size_t detection = 0;
  std::vector<Candidate> candidates;
  double gate_radius = 0.0;

  bool empty() const { return candidates.empty(); }
  bool any_in_gate() const;
};

/// What association needs to know about a map slot.
struct MapSlotView {
  std::optional<int> label;
  Point2 centroid;
};

struct AssociationConfig {
  double gate_radius = 2.0;
  /// Confidence product at or above which a full reading is trusted.
  double high_confidence = 0.9;
  /// Nearest-neighbour weight as a fraction of the ID-candidate weight mass.
  double nn_floor = 0.2;
};

/// Candidates for every detection. Exact-ID matches are always included; a
/// partial reading proposes every slot agreeing with its readable digit. When
/// the reading is uncertain (partial, missing, below the confidence threshold,
/// or without an ID match inside the gate) every slot whose centroid falls
/// inside the gate is proposed as a nearest-neighbour candidate.
std::vector<CandidateSet> pre_associate(std::span<const SlotDetection> detections,
                                        std::span<const MapSlotView> map,
                                        const Pose2& predicted_pose,
                                        const AssociationConfig& config);

/// Corner variables of each map slot, indexed like the MapSlotView list.
using SlotCorners = std::array<VariableId, 4>;

/// One component per candidate with weights normalized to sum to one. Throws
/// EmptyCandidates for an empty set.
MaxMixtureFactor build_mixture(const CandidateSet& candidates, const SlotDetection& detection,
                               VariableId pose, std::span<const SlotCorners> slot_corners,
                               const Eigen::Matrix2d& corner_information);

// Lazy landmark addition -------------------------------------------------------------

struct RectangleConfig {
  double width = 2.5;
  double depth = 5.3;
  double angle_information = 1.0 / (0.1 * 0.1);
  double distance_information = 1.0 / (0.25 * 0.25);
};

/// 4 right-angle factors (one per corner) and 6 distance factors (4 sides, 2
/// diagonals). Returns the inserted factor indices.
std::vector<std::size_t> add_rectangle_factors(Graph& graph, const SlotCorners& corners,
                                               const RectangleConfig& config);

struct Sighting {
  std::size_t frame = 0;
  VariableId pose;
  SlotDetection detection;
  /// Out-of-gate candidates the detection already had; they compete with the
  /// new slot once it is promoted.
  std::vector<Candidate> deferred;
};

struct ProvisionalLandmark {
  std::array<Point2, 4> corners;
  int sighting_count = 0;
  std::size_t first_seen_frame = 0;
  std::string temp_id;
  std::vector<Sighting> sightings;
};

class ProvisionalStore {
 public:
  std::span<const ProvisionalLandmark> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::vector<ProvisionalLandmark>& mutable_entries() { return entries_; }
  std::string next_temp_id() { return "t" + std::to_string(++temp_counter_); }

 private:
  std::vector<ProvisionalLandmark> entries_;
  int temp_counter_ = 0;
};

struct LazyConfig {
  int promotion_threshold = 2;
  double match_radius = 1.0;
  RectangleConfig rectangle;
};

struct PromotedSlot {
  SlotCorners corners;
  ProvisionalLandmark landmark;
  std::vector<std::size_t> rectangle_factors;
};

struct LazyAddResult {
  bool created = false;
  int sighting_count = 0;
  std::optional<PromotedSlot> promoted;
};

/// Routes a detection that has no usable candidates into the provisional
/// store. A provisional entry within match_radius (centroid distance) absorbs
/// the sighting; otherwise a new entry labeled "tN" is created. On reaching the
/// promotion threshold the corners become graph variables with rectangle
/// factors and the entry leaves the store. Observation factors for the
/// stored sightings are left to the caller.
LazyAddResult lazy_add(const SlotDetection& detection, const Pose2& predicted_pose,
                       VariableId pose, std::size_t frame, std::span<const Candidate> deferred,
                       ProvisionalStore& store, Graph& graph, const LazyConfig& config);

// ID resolution ---------------------------------------------------------------------

struct IdVote {
  std::size_t slot = 0;
  int id = 0;
};

struct ResolvedLabel {
  std::optional<int> id;
  std::string temp_id;
  std::size_t votes = 0;

  std::string display() const { return id ? std::to_string(*id) : temp_id; }
};

/// Majority ID per slot over the votes cast by active mixture components.
/// Ties keep the temporary label. When two slots win the same ID the one with
/// fewer votes (then the higher index) is demoted to its temporary label.
std::vector<ResolvedLabel> resolve_ids(std::span<const IdVote> votes,
                                       std::span<const std::string> temp_ids);

}  // namespace parkslam
