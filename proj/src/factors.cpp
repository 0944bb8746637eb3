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
#include <cmath>
#include <limits>
#include <numbers>

#include "parkslam/errors.hpp"
#include "parkslam/factor_graph.hpp"

namespace parkslam {
namespace {

constexpr double kMinRayLength = 1e-9;

Eigen::Matrix2d rot_t(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, s, -s, c;
  return r;
}

// d/dtheta of rot_t(theta).
Eigen::Matrix2d rot_t_dtheta(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d r;
  r << -s, c, -c, -s;
  return r;
}

double log_det_spd(const Eigen::MatrixXd& m) {
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  const Eigen::MatrixXd& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string_view factor_name(const Factor& factor) {
  return std::visit(
      Overloaded{
          [](const OdometryFactor&) { return std::string_view("Odometry"); },
          [](const PointObservationFactor&) { return std::string_view("PointObservation"); },
          [](const RectAngleFactor&) { return std::string_view("RectAngle"); },
          [](const RectDistanceFactor&) { return std::string_view("RectDistance"); },
          [](const TagObservationFactor&) { return std::string_view("TagObservation"); },
          [](const MaxMixtureFactor&) { return std::string_view("MaxMixture"); },
      },
      factor);
}

Eigen::Vector3d residual_odometry(const Pose2& xi, const Pose2& xj, const Pose2& z) {
  const Eigen::Vector2d d(xj.x() - xi.x(), xj.y() - xi.y());
  const Eigen::Vector2d rel = rot_t(xi.theta()) * d;
  const Eigen::Vector2d rt = rot_t(z.theta()) * (rel - Eigen::Vector2d(z.x(), z.y()));
  return {rt.x(), rt.y(), normalize_angle(xj.theta() - xi.theta() - z.theta())};
}

OdometryJacobians odometry_jacobians(const Pose2& xi, const Pose2& xj, const Pose2& z) {
  const Eigen::Vector2d d(xj.x() - xi.x(), xj.y() - xi.y());
  const Eigen::Matrix2d rz = rot_t(z.theta());
  const Eigen::Matrix2d a = rz * rot_t(xi.theta());
  OdometryJacobians j;
  j.d_from.setZero();
  j.d_to.setZero();
  j.d_from.topLeftCorner<2, 2>() = -a;
  j.d_from.block<2, 1>(0, 2) = rz * rot_t_dtheta(xi.theta()) * d;
  j.d_from(2, 2) = -1.0;
  j.d_to.topLeftCorner<2, 2>() = a;
  j.d_to(2, 2) = 1.0;
  return j;
}

Eigen::Vector2d residual_point_obs(const Pose2& pose, Point2 landmark, Point2 z) {
  const Point2 body = transform_to_body(pose, landmark);
  return {body.x - z.x, body.y - z.y};
}

PointObsJacobians point_obs_jacobians(const Pose2& pose, Point2 landmark) {
  const Eigen::Matrix2d rt = rot_t(pose.theta());
  const Eigen::Vector2d d(landmark.x - pose.x(), landmark.y - pose.y());
  PointObsJacobians j;
  j.d_pose.leftCols<2>() = -rt;
  j.d_pose.col(2) = rot_t_dtheta(pose.theta()) * d;
  j.d_point = rt;
  return j;
}

double residual_rect_angle(Point2 prev, Point2 corner, Point2 next) {
  const Point2 a = prev - corner;
  const Point2 b = next - corner;
  if (norm(a) < kMinRayLength || norm(b) < kMinRayLength) {
    throw Error(ErrorCategory::DegenerateCorner, "slot corner ray shorter than 1e-9 m");
  }
  const double interior = std::atan2(std::abs(cross(a, b)), dot(a, b));
  return normalize_angle(interior - std::numbers::pi / 2.0);
}

RectAngleJacobians rect_angle_jacobians(Point2 prev, Point2 corner, Point2 next) {
  const Point2 a = prev - corner;
  const Point2 b = next - corner;
  const double c = cross(a, b);
  const double sgn = c >= 0.0 ? 1.0 : -1.0;
  const double y = std::abs(c);
  const double x = dot(a, b);
  const double n2 = x * x + y * y;
  RectAngleJacobians j;
  if (n2 <= 0.0) {
    j.d_prev.setZero();
    j.d_corner.setZero();
    j.d_next.setZero();
    return j;
  }
  const Eigen::RowVector2d dy_da(sgn * b.y, -sgn * b.x);
  const Eigen::RowVector2d dy_db(-sgn * a.y, sgn * a.x);
  const Eigen::RowVector2d dx_da(b.x, b.y);
  const Eigen::RowVector2d dx_db(a.x, a.y);
  j.d_prev = (x * dy_da - y * dx_da) / n2;
  j.d_next = (x * dy_db - y * dx_db) / n2;
  j.d_corner = -(j.d_prev + j.d_next);
  return j;
}

double residual_rect_distance(Point2 first, Point2 second, double nominal) {
  return distance(first, second) - nominal;
}

RectDistanceJacobians rect_distance_jacobians(Point2 first, Point2 second) {
  const Point2 d = first - second;
  const double n = norm(d);
  RectDistanceJacobians j;
  if (n <= 0.0) {
    j.d_first.setZero();
    j.d_second.setZero();
    return j;
  }
  j.d_first = Eigen::RowVector2d(d.x / n, d.y / n);
  j.d_second = -j.d_first;
  return j;
}

Eigen::VectorXd component_residual(const MaxMixtureFactor& factor, std::size_t j,
                                   const Estimates& values) {
  const auto& comp = factor.components[j];
  const Pose2& pose = values.pose(factor.pose);
  Eigen::VectorXd r(2 * comp.targets.size());
  for (std::size_t k = 0; k < comp.targets.size(); ++k) {
    r.segment<2>(2 * k) = residual_point_obs(pose, values.point(comp.targets[k]),
                                             factor.measurements[k]);
  }
  return r;
}

double component_score(const MaxMixtureFactor& factor, std::size_t j,
                       const Estimates& values) {
  const auto& comp = factor.components[j];
  const Eigen::VectorXd r = component_residual(factor, j, values);
  return r.dot(comp.information * r) - 2.0 * std::log(comp.weight) -
         log_det_spd(comp.information);
}

std::size_t select_component(const MaxMixtureFactor& factor, const Estimates& values) {
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < factor.components.size(); ++j) {
    const double s = component_score(factor, j, values);
    if (s < best_score) {
      best_score = s;
      best = j;
    }
  }
  return best;
}

MaxMixtureFactor highest_weight_component(const MaxMixtureFactor& factor) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < factor.components.size(); ++j) {
    if (factor.components[j].weight > factor.components[best].weight) best = j;
  }
  MaxMixtureFactor single{factor.pose, factor.measurements, {factor.components[best]}};
  single.components.front().weight = 1.0;
  return single;
}

std::vector<std::size_t> select_components(std::span<const Factor> factors,
                                           const Estimates& values) {
  std::vector<std::size_t> active(factors.size(), 0);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (const auto* mm = std::get_if<MaxMixtureFactor>(&factors[i])) {
      active[i] = select_component(*mm, values);
    }
  }
  return active;
}

LinearizedFactor linearize(const Factor& factor, const Estimates& values,
                           std::size_t active_component) {
  return std::visit(
      Overloaded{
          [&](const OdometryFactor& f) {
            const Pose2& xi = values.pose(f.from);
            const Pose2& xj = values.pose(f.to);
            const auto jac = odometry_jacobians(xi, xj, f.measurement);
            return LinearizedFactor{residual_odometry(xi, xj, f.measurement),
                                    {{f.from, jac.d_from}, {f.to, jac.d_to}},
                                    f.information};
          },
          [&](const PointObservationFactor& f) {
            const Pose2& pose = values.pose(f.pose);
            const Point2 lm = values.point(f.point);
            const auto jac = point_obs_jacobians(pose, lm);
            return LinearizedFactor{residual_point_obs(pose, lm, f.measurement),
                                    {{f.pose, jac.d_pose}, {f.point, jac.d_point}},
                                    f.information};
          },
          [&](const RectAngleFactor& f) {
            const Point2 a = values.point(f.prev);
            const Point2 b = values.point(f.corner);
            const Point2 c = values.point(f.next);
            const auto jac = rect_angle_jacobians(a, b, c);
            Eigen::VectorXd r(1);
            r(0) = residual_rect_angle(a, b, c);
            Eigen::MatrixXd info(1, 1);
            info(0, 0) = f.information;
            return LinearizedFactor{
                r, {{f.prev, jac.d_prev}, {f.corner, jac.d_corner}, {f.next, jac.d_next}}, info};
          },
          [&](const RectDistanceFactor& f) {
            const Point2 a = values.point(f.first);
            const Point2 b = values.point(f.second);
            const auto jac = rect_distance_jacobians(a, b);
            Eigen::VectorXd r(1);
            r(0) = residual_rect_distance(a, b, f.nominal);
            Eigen::MatrixXd info(1, 1);
            info(0, 0) = f.information;
            return LinearizedFactor{r, {{f.first, jac.d_first}, {f.second, jac.d_second}}, info};
          },
          [&](const TagObservationFactor& f) {
            const Pose2& pose = values.pose(f.pose);
            const Point2 lm = values.point(f.tag);
            const auto jac = point_obs_jacobians(pose, lm);
            return LinearizedFactor{residual_point_obs(pose, lm, f.measurement),
                                    {{f.pose, jac.d_pose}, {f.tag, jac.d_point}},
                                    f.information};
          },
          [&](const MaxMixtureFactor& f) {
            const auto& comp = f.components[active_component];
            const Pose2& pose = values.pose(f.pose);
            LinearizedFactor out;
            out.residual = component_residual(f, active_component, values);
            out.information = comp.information;
            const Eigen::Index dim = out.residual.size();
            Eigen::MatrixXd d_pose(dim, 3);
            out.blocks.reserve(comp.targets.size() + 1);
            out.blocks.push_back({f.pose, Eigen::MatrixXd()});
            for (std::size_t k = 0; k < comp.targets.size(); ++k) {
              const auto jac = point_obs_jacobians(pose, values.point(comp.targets[k]));
              d_pose.middleRows<2>(2 * k) = jac.d_pose;
              Eigen::MatrixXd d_point = Eigen::MatrixXd::Zero(dim, 2);
              d_point.middleRows<2>(2 * k) = jac.d_point;
              out.blocks.push_back({comp.targets[k], std::move(d_point)});
            }
            out.blocks.front().jacobian = std::move(d_pose);
            return out;
          },
      },
      factor);
}

Eigen::VectorXd evaluate_residual(const Factor& factor, const Estimates& values,
                                  std::size_t active_component) {
  return std::visit(
      Overloaded{
          [&](const OdometryFactor& f) -> Eigen::VectorXd {
            return residual_odometry(values.pose(f.from), values.pose(f.to), f.measurement);
          },
          [&](const PointObservationFactor& f) -> Eigen::VectorXd {
            return residual_point_obs(values.pose(f.pose), values.point(f.point),
                                      f.measurement);
          },
          [&](const RectAngleFactor& f) -> Eigen::VectorXd {
            Eigen::VectorXd r(1);
            r(0) = residual_rect_angle(values.point(f.prev), values.point(f.corner),
                                       values.point(f.next));
            return r;
          },
          [&](const RectDistanceFactor& f) -> Eigen::VectorXd {
            Eigen::VectorXd r(1);
            r(0) = residual_rect_distance(values.point(f.first), values.point(f.second),
                                          f.nominal);
            return r;
          },
          [&](const TagObservationFactor& f) -> Eigen::VectorXd {
            return residual_point_obs(values.pose(f.pose), values.point(f.tag), f.measurement);
          },
          [&](const MaxMixtureFactor& f) -> Eigen::VectorXd {
            return component_residual(f, active_component, values);
          },
      },
      factor);
}

double factor_chi2(const Factor& factor, const Estimates& values,
                   std::size_t active_component) {
  const Eigen::VectorXd r = evaluate_residual(factor, values, active_component);
  return std::visit(
      Overloaded{
          [&](const RectAngleFactor& f) { return f.information * r(0) * r(0); },
          [&](const RectDistanceFactor& f) { return f.information * r(0) * r(0); },
          [&](const MaxMixtureFactor& f) {
            return r.dot(f.components[active_component].information * r);
          },
          [&](const auto& f) { return r.dot(f.information * r); },
      },
      factor);
}

double total_chi2(std::span<const Factor> factors, const Estimates& values,
                  std::span<const std::size_t> active) {
  double acc = 0.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    acc += factor_chi2(factors[i], values, active[i]);
  }
  return acc;
}

double total_objective(std::span<const Factor> factors, const Estimates& values,
                       std::span<const std::size_t> active) {
  double acc = 0.0;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    acc += factor_chi2(factors[i], values, active[i]);
    if (const auto* mm = std::get_if<MaxMixtureFactor>(&factors[i])) {
      if (mm->components.size() < 2) continue;
      double best = std::numeric_limits<double>::infinity();
      double mine = 0.0;
      for (std::size_t j = 0; j < mm->components.size(); ++j) {
        const auto& c = mm->components[j];
        const double offset = -2.0 * std::log(c.weight) - log_det_spd(c.information);
        best = std::min(best, offset);
        if (j == active[i]) mine = offset;
      }
      acc += mine - best;
    }
  }
  return acc;
}

}  // namespace parkslam
