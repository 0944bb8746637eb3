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

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "parkslam/association.hpp"
#include "parkslam/errors.hpp"

namespace parkslam {

DeadReckoner::DeadReckoner(const Pose2& initial, const Eigen::Matrix3d& covariance,
                           DeadReckonerConfig config)
    : pose_(initial), covariance_(covariance), config_(config), heading_(initial.theta()) {
  if (!(config_.wheelbase > 0.0) || config_.compass_sigma <= 0.0) {
    throw Error(ErrorCategory::InvalidArgument, "dead reckoner needs wheelbase > 0 and compass sigma > 0");
  }
}

void DeadReckoner::reset(const Pose2& pose, const Eigen::Matrix3d& covariance) {
  pose_ = pose;
  covariance_ = covariance;
}

Pose2 DeadReckoner::predict(double speed, double steering, double compass, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCategory::InvalidArgument, "dt must be positive");
  velocity_ = speed;
  heading_ = compass;

  const double theta = pose_.theta();
  const double omega = speed * std::tan(steering) / config_.wheelbase;
  double x = pose_.x();
  double y = pose_.y();
  Eigen::Matrix3d f = Eigen::Matrix3d::Identity();
  if (std::abs(omega * dt) < 1e-9) {
    x += speed * dt * std::cos(theta);
    y += speed * dt * std::sin(theta);
    f(0, 2) = -speed * dt * std::sin(theta);
    f(1, 2) = speed * dt * std::cos(theta);
  } else {
    const double radius = speed / omega;
    const double next = theta + omega * dt;
    x += radius * (std::sin(next) - std::sin(theta));
    y -= radius * (std::cos(next) - std::cos(theta));
    f(0, 2) = radius * (std::cos(next) - std::cos(theta));
    f(1, 2) = radius * (std::sin(next) - std::sin(theta));
  }
  const double predicted_theta = theta + omega * dt;

  Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
  q(0, 0) = config_.position_noise_rate * dt;
  q(1, 1) = config_.position_noise_rate * dt;
  q(2, 2) = config_.heading_noise_rate * dt;
  covariance_ = f * covariance_ * f.transpose() + q;

  // Scalar Kalman update of the heading from the compass.
  const double innovation = normalize_angle(compass - predicted_theta);
  const double s = covariance_(2, 2) + config_.compass_sigma * config_.compass_sigma;
  const Eigen::Vector3d gain = covariance_.col(2) / s;
  const Eigen::Vector3d correction = gain * innovation;
  Eigen::Matrix3d i_kh = Eigen::Matrix3d::Identity();
  i_kh.col(2) -= gain;
  covariance_ = i_kh * covariance_;
  covariance_ = 0.5 * (covariance_ + covariance_.transpose());

  pose_ = Pose2(x + correction(0), y + correction(1), predicted_theta + correction(2));
  return pose_;
}

double DeadReckoner::position_sigma() const {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(covariance_.topLeftCorner<2, 2>());
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double gate_radius(double half_entrance_width, double position_sigma, double cap) {
  return std::min(half_entrance_width + 3.0 * position_sigma, cap);
}

}  // namespace parkslam
