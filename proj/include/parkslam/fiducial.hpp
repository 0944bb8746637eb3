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
#include <span>
#include <vector>

#include "parkslam/geometry.hpp"

namespace parkslam {

/// Pinhole intrinsics of the front camera (pixels).
struct CameraIntrinsics {
  double f = 1000.0;
  double x0 = 960.0;
  double y0 = 540.0;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// Tag corners in pixels, ordered top-left, top-right, bottom-right,
/// bottom-left as printed on the tag.
struct TagDetection {
  int tag_id = 0;
  std::array<Point2, 4> corners;
  /// x coordinate of the tag center in the image.
  double center_x = 0.0;

  friend bool operator==(const TagDetection&, const TagDetection&) = default;
};

/// Tag pose in the camera frame (x right, y down, z forward):
/// X_camera = rotation * X_tag + translation, with the tag model centered at
/// the origin of its own z = 0 plane.
struct PnpSolution {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double rms_reprojection = 0.0;
  int iterations = 0;
};

struct TagPoseEstimate {
  int tag_id = 0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double alpha = 0.0;
  double distance = 0.0;
  /// Tag position in the camera ground plane: x to the right, y forward.
  Point2 position;
  bool valid = false;
};

/// Model corners of a square tag with the given side, in the tag frame.
std::array<Eigen::Vector3d, 4> tag_model_points(double tag_side);

/// Pinhole projection of a camera-frame point.
Point2 project(const Eigen::Vector3d& camera_point, const CameraIntrinsics& cam);

/// Homography (normalized DLT) initialization refined by damped Gauss-Newton on
/// the reprojection error. Throws DegenerateHomography for rank-deficient
/// corner sets and NoConvergence when the refinement fails.
PnpSolution solve_pnp(const TagDetection& detection, const CameraIntrinsics& cam,
                      double tag_side);

/// arctan((x_i - x0) / f).
double direct_angle(double x_i, const CameraIntrinsics& cam);

/// (sin(alpha) * d, cos(alpha) * d).
Point2 tag_position(double alpha, double d);

/// Bearing implied by the translation, atan2(t_x, t_z).
double pnp_bearing(const PnpSolution& pnp);

/// True when |bearing - alpha| <= tol (inclusive).
bool validate(const PnpSolution& pnp, double alpha, double tol);

/// Solves, validates and places the tag. A consistent solution is placed at
/// the ground-plane projection of its translation; an inconsistent one falls
/// back to tag_position(direct_angle, |t|).
TagPoseEstimate estimate_tag(const TagDetection& detection, const CameraIntrinsics& cam,
                             double tag_side, double tolerance);

/// Keeps estimates strictly closer than max_range.
std::vector<TagPoseEstimate> range_filter(std::span<const TagPoseEstimate> estimates,
                                          double max_range);

/// Converts the camera ground-plane frame (x right, y forward) to the vehicle
/// body frame (x forward, y left).
inline Point2 camera_ground_to_body(Point2 p) { return {p.y, -p.x}; }

}  // namespace parkslam
