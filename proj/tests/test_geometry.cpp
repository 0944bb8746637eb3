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

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "parkslam/geometry.hpp"

using namespace parkslam;

namespace {

Pose2 random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-50.0, 50.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  return {pos(rng), pos(rng), ang(rng)};
}

void expect_pose_near(const Pose2& a, const Pose2& b, double tol) {
  EXPECT_NEAR(a.x(), b.x(), tol);
  EXPECT_NEAR(a.y(), b.y(), tol);
  EXPECT_NEAR(std::remainder(a.theta() - b.theta(), 2.0 * M_PI), 0.0, tol);
}

}  // namespace

TEST(Geometry, NormalizeAngleRange) {
  EXPECT_DOUBLE_EQ(normalize_angle(M_PI), M_PI);
  EXPECT_DOUBLE_EQ(normalize_angle(-M_PI), M_PI);
  EXPECT_NEAR(normalize_angle(3.0 * M_PI / 2.0), -M_PI / 2.0, 1e-15);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> a(-100.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double t = a(rng);
    const double n = normalize_angle(t);
    EXPECT_GT(n, -M_PI);
    EXPECT_LE(n, M_PI);
    EXPECT_NEAR(std::sin(n), std::sin(t), 1e-12);
    EXPECT_NEAR(std::cos(n), std::cos(t), 1e-12);
  }
}

TEST(Geometry, ComposeExamples) {
  const Pose2 p(1.5, -2.0, 0.3);
  EXPECT_EQ(compose(Pose2::identity(), p), p);
  expect_pose_near(compose(Pose2(1, 0, M_PI / 2), Pose2(1, 0, 0)), Pose2(1, 1, M_PI / 2), 1e-15);
}

TEST(Geometry, BetweenExamples) {
  const Pose2 p(4.0, 1.0, -2.0);
  expect_pose_near(between(p, p), Pose2::identity(), 1e-15);
  expect_pose_near(between(Pose2::identity(), p), p, 1e-15);
}

TEST(Geometry, TransformExamples) {
  EXPECT_EQ(transform_to_body(Pose2::identity(), {3, 4}), (Point2{3, 4}));
  const Point2 b = transform_to_body(Pose2(1, 1, 0), {1, 1});
  EXPECT_DOUBLE_EQ(b.x, 0.0);
  EXPECT_DOUBLE_EQ(b.y, 0.0);
}

TEST(Geometry, GroupLawRoundTrips) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const Pose2 p = random_pose(rng);
    const Pose2 q = random_pose(rng);
    expect_pose_near(compose(compose(p, q), inverse(q)), p, 1e-10);
    expect_pose_near(compose(p, between(p, q)), q, 1e-10);

    const Point2 w{pos(rng), pos(rng)};
    const Point2 back = transform_to_world(p, transform_to_body(p, w));
    EXPECT_NEAR(back.x, w.x, 1e-12);
    EXPECT_NEAR(back.y, w.y, 1e-12);
  }
}

TEST(Geometry, ComposeMatchesHomogeneousProduct) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const Pose2 p = random_pose(rng);
    const Pose2 q = random_pose(rng);
    const Eigen::Matrix3d m = oracle::homogeneous(p) * oracle::homogeneous(q);
    const Pose2 c = compose(p, q);
    EXPECT_NEAR(c.x(), m(0, 2), 1e-10);
    EXPECT_NEAR(c.y(), m(1, 2), 1e-10);
    EXPECT_NEAR(std::remainder(c.theta() - std::atan2(m(1, 0), m(0, 0)), 2.0 * M_PI), 0.0, 1e-12);
  }
}
