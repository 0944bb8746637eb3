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

// Randomized inputs shared by the unit tests and the acceptance runner.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "parkslam/factor_graph.hpp"
#include "parkslam/fiducial.hpp"

namespace fixtures {

using parkslam::Estimates;
using parkslam::Factor;
using parkslam::Point2;
using parkslam::Pose2;
using parkslam::VariableId;
using parkslam::VariableKind;

inline VariableId pose_id(std::size_t i) { return {VariableKind::Pose, i}; }
inline VariableId point_id(std::size_t i) { return {VariableKind::Point, i}; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Pose2 random_pose(std::mt19937_64& rng, double extent = 20.0) {
  return {uniform(rng, -extent, extent), uniform(rng, -extent, extent), uniform(rng, -M_PI, M_PI)};
}

inline Point2 near(std::mt19937_64& rng, Point2 c, double rmin, double rmax) {
  const double r = uniform(rng, rmin, rmax);
  const double a = uniform(rng, -M_PI, M_PI);
  return {c.x + r * std::cos(a), c.y + r * std::sin(a)};
}

/// Random symmetric positive-definite matrix with eigenvalues in [lo, hi].
inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n, double lo, double hi) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = uniform(rng, -1.0, 1.0);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = uniform(rng, lo, hi);
  return q * d.asDiagonal() * q.transpose();
}

struct FactorCase {
  Factor factor;
  Estimates values;
  std::size_t active = 0;
};

inline const std::vector<std::string>& factor_kinds() {
  static const std::vector<std::string> kinds = {"odometry",      "point_observation",
                                                 "rect_angle",    "rect_distance",
                                                 "tag_observation", "max_mixture"};
  return kinds;
}

/// A factor of the named kind at a random, non-degenerate linearization point.
inline FactorCase random_factor_case(const std::string& kind, std::mt19937_64& rng) {
  FactorCase c;
  if (kind == "odometry") {
    c.values.poses = {random_pose(rng), random_pose(rng)};
    c.factor = parkslam::OdometryFactor{pose_id(0), pose_id(1), random_pose(rng, 3.0),
                                        random_spd(rng, 3, 1.0, 100.0)};
  } else if (kind == "point_observation" || kind == "tag_observation") {
    c.values.poses = {random_pose(rng)};
    c.values.points = {near(rng, c.values.poses[0].translation(), 0.5, 20.0)};
    const Point2 z{uniform(rng, -20, 20), uniform(rng, -20, 20)};
    const Eigen::Matrix2d info = random_spd(rng, 2, 1.0, 100.0);
    if (kind == "point_observation") {
      c.factor = parkslam::PointObservationFactor{pose_id(0), point_id(0), z, info};
    } else {
      c.factor = parkslam::TagObservationFactor{pose_id(0), point_id(0), z, info};
    }
  } else if (kind == "rect_angle") {
    const Point2 corner{uniform(rng, -20, 20), uniform(rng, -20, 20)};
    const double a0 = uniform(rng, -M_PI, M_PI);
    const double sign = uniform(rng, 0, 1) < 0.5 ? -1.0 : 1.0;
    const double a1 = a0 + sign * uniform(rng, 0.3, M_PI - 0.3);
    const double r0 = uniform(rng, 1.0, 6.0);
    const double r1 = uniform(rng, 1.0, 6.0);
    c.values.points = {{corner.x + r0 * std::cos(a0), corner.y + r0 * std::sin(a0)},
                       corner,
                       {corner.x + r1 * std::cos(a1), corner.y + r1 * std::sin(a1)}};
    c.factor = parkslam::RectAngleFactor{point_id(0), point_id(1), point_id(2), 100.0};
  } else if (kind == "rect_distance") {
    const Point2 a{uniform(rng, -20, 20), uniform(rng, -20, 20)};
    c.values.points = {a, near(rng, a, 0.5, 8.0)};
    c.factor = parkslam::RectDistanceFactor{point_id(0), point_id(1), uniform(rng, 1.0, 6.0), 16.0};
  } else {
    c.values.poses = {random_pose(rng)};
    const int points_per_component = 4;
    const int components = 3;
    parkslam::MaxMixtureFactor m;
    m.pose = pose_id(0);
    for (int k = 0; k < points_per_component; ++k) {
      m.measurements.push_back({uniform(rng, -10, 10), uniform(rng, -10, 10)});
    }
    for (int j = 0; j < components; ++j) {
      parkslam::MaxMixtureComponent comp;
      comp.weight = uniform(rng, 0.1, 1.0);
      for (int k = 0; k < points_per_component; ++k) {
        comp.targets.push_back(point_id(c.values.points.size()));
        c.values.points.push_back(near(rng, c.values.poses[0].translation(), 0.5, 12.0));
      }
      comp.information = random_spd(rng, 2 * points_per_component, 1.0, 100.0);
      m.components.push_back(std::move(comp));
    }
    c.active = std::uniform_int_distribution<std::size_t>(0, components - 1)(rng);
    c.factor = std::move(m);
  }
  return c;
}

/// A mixture whose components share the measurements but differ in target,
/// weight and information; some components get residuals near zero.
inline FactorCase random_mixture_case(std::mt19937_64& rng, int components = 3) {
  FactorCase c;
  const Pose2 pose = random_pose(rng, 10.0);
  c.values.poses = {pose};
  parkslam::MaxMixtureFactor m;
  m.pose = pose_id(0);
  const Point2 body{uniform(rng, 1, 8), uniform(rng, -4, 4)};
  m.measurements = {body};
  const Point2 world = parkslam::transform_to_world(pose, body);
  for (int j = 0; j < components; ++j) {
    parkslam::MaxMixtureComponent comp;
    comp.weight = uniform(rng, 0.05, 1.0);
    comp.targets = {point_id(c.values.points.size())};
    c.values.points.push_back(near(rng, world, 0.0, 1.5));
    comp.information = random_spd(rng, 2, 1.0, 50.0);
    m.components.push_back(std::move(comp));
  }
  c.factor = std::move(m);
  return c;
}

/// Small graph of odometry and point observations with noisy measurements and
/// perturbed initial estimates. Pose 0 is fixed.
inline parkslam::Graph random_toy_graph(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const int poses = std::uniform_int_distribution<int>(2, 5)(rng);
  const int landmarks = std::uniform_int_distribution<int>(1, 3)(rng);

  std::vector<Pose2> truth = {random_pose(rng, 5.0)};
  for (int i = 1; i < poses; ++i) {
    truth.push_back(parkslam::compose(truth.back(), Pose2(uniform(rng, 0.5, 2.0), uniform(rng, -0.3, 0.3),
                                                          uniform(rng, -0.4, 0.4))));
  }
  std::vector<Point2> lm_truth;
  for (int k = 0; k < landmarks; ++k) lm_truth.push_back(near(rng, truth.front().translation(), 2.0, 8.0));

  parkslam::Graph g;
  for (int i = 0; i < poses; ++i) {
    const Pose2& t = truth[i];
    const Pose2 init = i == 0 ? t : Pose2(t.x() + 0.2 * n01(rng), t.y() + 0.2 * n01(rng), t.theta() + 0.05 * n01(rng));
    g.add_pose(init);
  }
  for (int k = 0; k < landmarks; ++k) {
    g.add_point({lm_truth[k].x + 0.3 * n01(rng), lm_truth[k].y + 0.3 * n01(rng)});
  }
  g.fix(pose_id(0));

  for (int i = 1; i < poses; ++i) {
    const Pose2 b = parkslam::between(truth[i - 1], truth[i]);
    const Pose2 z(b.x() + 0.02 * n01(rng), b.y() + 0.02 * n01(rng), b.theta() + 0.01 * n01(rng));
    g.add_factor(parkslam::OdometryFactor{pose_id(i - 1), pose_id(i), z, random_spd(rng, 3, 100.0, 2500.0)});
  }
  for (int k = 0; k < landmarks; ++k) {
    for (int i = 0; i < poses; ++i) {
      // Every landmark is seen from pose 0; other sightings are random.
      if (i > 0 && uniform(rng, 0, 1) < 0.4) continue;
      const Point2 b = parkslam::transform_to_body(truth[i], lm_truth[k]);
      const Point2 z{b.x + 0.05 * n01(rng), b.y + 0.05 * n01(rng)};
      g.add_factor(parkslam::PointObservationFactor{pose_id(i), point_id(k), z, random_spd(rng, 2, 25.0, 400.0)});
    }
  }
  return g;
}

/// A tag seen by the camera with a known pose, projected through the pinhole
/// model written out by hand.
struct SyntheticTag {
  parkslam::TagDetection detection;
  Eigen::Matrix3d rotation;
  Eigen::Vector3d translation;
};

inline SyntheticTag synthetic_tag(std::mt19937_64& rng, double d, double yaw, double bearing,
                                  double elevation, double pixel_noise,
                                  const parkslam::CameraIntrinsics& cam = {}, double side = 0.488) {
  SyntheticTag s;
  s.rotation = Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()).toRotationMatrix();
  s.translation = d * Eigen::Vector3d(std::sin(bearing) * std::cos(elevation), std::sin(elevation),
                                      std::cos(bearing) * std::cos(elevation));
  std::normal_distribution<double> noise(0.0, pixel_noise);
  const double h = 0.5 * side;
  const Eigen::Vector3d model[4] = {{-h, -h, 0}, {h, -h, 0}, {h, h, 0}, {-h, h, 0}};
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector3d c = s.rotation * model[k] + s.translation;
    s.detection.corners[k] = {cam.f * c.x() / c.z() + cam.x0 + (pixel_noise > 0 ? noise(rng) : 0.0),
                              cam.f * c.y() / c.z() + cam.y0 + (pixel_noise > 0 ? noise(rng) : 0.0)};
  }
  // Image center of the tag: intersection of the two corner diagonals.
  const auto& q = s.detection.corners;
  const Eigen::Vector3d l1 = Eigen::Vector3d(q[0].x, q[0].y, 1).cross(Eigen::Vector3d(q[2].x, q[2].y, 1));
  const Eigen::Vector3d l2 = Eigen::Vector3d(q[1].x, q[1].y, 1).cross(Eigen::Vector3d(q[3].x, q[3].y, 1));
  const Eigen::Vector3d x = l1.cross(l2);
  s.detection.center_x = x.x() / x.z();
  s.detection.tag_id = 1;
  return s;
}

/// Angle of the relative rotation between two rotation matrices.
inline double rotation_angle(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return Eigen::AngleAxisd(a.transpose() * b).angle();
}

}  // namespace fixtures
