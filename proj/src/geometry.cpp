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

#include "parkslam/geometry.hpp"

namespace parkslam {

double normalize_angle(double theta) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::remainder(theta, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

Pose2 compose(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta());
  const double s = std::sin(a.theta());
  return {a.x() + c * b.x() - s * b.y(), a.y() + s * b.x() + c * b.y(),
          a.theta() + b.theta()};
}

Pose2 inverse(const Pose2& p) {
  const double c = std::cos(p.theta());
  const double s = std::sin(p.theta());
  return {-c * p.x() - s * p.y(), s * p.x() - c * p.y(), -p.theta()};
}

Pose2 between(const Pose2& a, const Pose2& b) {
  const double c = std::cos(a.theta());
  const double s = std::sin(a.theta());
  const double dx = b.x() - a.x();
  const double dy = b.y() - a.y();
  return {c * dx + s * dy, -s * dx + c * dy, b.theta() - a.theta()};
}

Point2 transform_to_body(const Pose2& pose, Point2 world_pt) {
  const double c = std::cos(pose.theta());
  const double s = std::sin(pose.theta());
  const double dx = world_pt.x - pose.x();
  const double dy = world_pt.y - pose.y();
  return {c * dx + s * dy, -s * dx + c * dy};
}

Point2 transform_to_world(const Pose2& pose, Point2 body_pt) {
  const double c = std::cos(pose.theta());
  const double s = std::sin(pose.theta());
  return {pose.x() + c * body_pt.x - s * body_pt.y,
          pose.y() + s * body_pt.x + c * body_pt.y};
}

}  // namespace parkslam
