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

#include <Eigen/Cholesky>
#include <algorithm>
#include <string>

#include "parkslam/errors.hpp"
#include "parkslam/factor_graph.hpp"

namespace parkslam {
namespace {

void require_spd(const Eigen::MatrixXd& info, Eigen::Index dim, const char* what) {
  if (info.rows() != dim || info.cols() != dim) {
    throw Error(ErrorCategory::InvalidArgument,
                std::string(what) + ": information dimension does not match residual");
  }
  if (!info.allFinite() || !info.isApprox(info.transpose(), 1e-12)) {
    throw Error(ErrorCategory::InvalidArgument,
                std::string(what) + ": information matrix is not symmetric");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCategory::InvalidArgument,
                std::string(what) + ": information matrix is not positive-definite");
  }
}

void require_positive(double info, const char* what) {
  if (!(info > 0.0) || !std::isfinite(info)) {
    throw Error(ErrorCategory::InvalidArgument,
                std::string(what) + ": information must be positive");
  }
}

}  // namespace

VariableId Graph::add_pose(const Pose2& initial) {
  if (!std::isfinite(initial.x()) || !std::isfinite(initial.y()) ||
      !std::isfinite(initial.theta())) {
    throw Error(ErrorCategory::InvalidArgument, "non-finite pose estimate");
  }
  const VariableId id{VariableKind::Pose, values_.poses.size()};
  values_.poses.push_back(initial);
  pose_fixed_.push_back(false);
  order_.push_back(id);
  return id;
}

VariableId Graph::add_point(Point2 initial) {
  if (!is_finite(initial)) {
    throw Error(ErrorCategory::InvalidArgument, "non-finite point estimate");
  }
  const VariableId id{VariableKind::Point, values_.points.size()};
  values_.points.push_back(initial);
  point_fixed_.push_back(false);
  order_.push_back(id);
  return id;
}

bool Graph::contains(VariableId id) const {
  return id.kind == VariableKind::Pose ? id.index < values_.poses.size()
                                       : id.index < values_.points.size();
}

void Graph::require(VariableId id, VariableKind kind) const {
  if (id.kind != kind || !contains(id)) {
    throw Error(ErrorCategory::InvalidArgument,
                "factor references a missing or mistyped variable");
  }
}

std::size_t Graph::add_factor(Factor factor) {
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, OdometryFactor>) {
          require(f.from, VariableKind::Pose);
          require(f.to, VariableKind::Pose);
          require_spd(f.information, 3, "Odometry");
        } else if constexpr (std::is_same_v<T, PointObservationFactor>) {
          require(f.pose, VariableKind::Pose);
          require(f.point, VariableKind::Point);
          require_spd(f.information, 2, "PointObservation");
        } else if constexpr (std::is_same_v<T, RectAngleFactor>) {
          require(f.prev, VariableKind::Point);
          require(f.corner, VariableKind::Point);
          require(f.next, VariableKind::Point);
          require_positive(f.information, "RectAngle");
        } else if constexpr (std::is_same_v<T, RectDistanceFactor>) {
          require(f.first, VariableKind::Point);
          require(f.second, VariableKind::Point);
          require_positive(f.information, "RectDistance");
          if (!(f.nominal > 0.0)) {
            throw Error(ErrorCategory::InvalidArgument, "RectDistance: nominal must be positive");
          }
        } else if constexpr (std::is_same_v<T, TagObservationFactor>) {
          require(f.pose, VariableKind::Pose);
          require(f.tag, VariableKind::Point);
          require_spd(f.information, 2, "TagObservation");
        } else if constexpr (std::is_same_v<T, MaxMixtureFactor>) {
          require(f.pose, VariableKind::Pose);
          if (f.components.empty()) {
            throw Error(ErrorCategory::InvalidArgument, "MaxMixture: no components");
          }
          for (const auto& c : f.components) {
            if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
              throw Error(ErrorCategory::InvalidArgument, "MaxMixture: weight must be positive");
            }
            if (c.targets.size() != f.measurements.size() || c.targets.empty()) {
              throw Error(ErrorCategory::InvalidArgument,
                          "MaxMixture: target count does not match measurements");
            }
            for (const auto& t : c.targets) require(t, VariableKind::Point);
            require_spd(c.information, static_cast<Eigen::Index>(2 * c.targets.size()),
                        "MaxMixture");
          }
        }
      },
      factor);
  factors_.push_back(std::move(factor));
  return factors_.size() - 1;
}

void Graph::fix(VariableId id) {
  if (!contains(id)) throw Error(ErrorCategory::InvalidArgument, "fixing a missing variable");
  if (id.kind == VariableKind::Pose) {
    pose_fixed_[id.index] = true;
  } else {
    point_fixed_[id.index] = true;
  }
}

bool Graph::is_fixed(VariableId id) const {
  return id.kind == VariableKind::Pose ? pose_fixed_[id.index] : point_fixed_[id.index];
}

std::size_t Graph::fixed_pose_count() const {
  return static_cast<std::size_t>(std::count(pose_fixed_.begin(), pose_fixed_.end(), true));
}

std::size_t Graph::fixed_count() const {
  return fixed_pose_count() +
         static_cast<std::size_t>(std::count(point_fixed_.begin(), point_fixed_.end(), true));
}

void Graph::set_estimates(Estimates values) {
  if (values.poses.size() != values_.poses.size() ||
      values.points.size() != values_.points.size()) {
    throw Error(ErrorCategory::InvalidArgument, "estimate set does not match graph");
  }
  values_ = std::move(values);
}

std::size_t Graph::count_factors(std::string_view name) const {
  return static_cast<std::size_t>(std::count_if(
      factors_.begin(), factors_.end(), [&](const Factor& f) { return factor_name(f) == name; }));
}

}  // namespace parkslam
