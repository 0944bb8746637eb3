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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "parkslam/geometry.hpp"

namespace parkslam {

enum class VariableKind : std::uint8_t { Pose, Point };

struct VariableId {
  VariableKind kind = VariableKind::Pose;
  std::size_t index = 0;

  friend auto operator<=>(const VariableId&, const VariableId&) = default;
};

/// Relative motion between two consecutive poses.
struct OdometryFactor {
  VariableId from;
  VariableId to;
  Pose2 measurement;
  Eigen::Matrix3d information = Eigen::Matrix3d::Identity();
};

/// A landmark point seen in the vehicle frame.
struct PointObservationFactor {
  VariableId pose;
  VariableId point;
  Point2 measurement;
  Eigen::Matrix2d information = Eigen::Matrix2d::Identity();
};

/// Right angle at `corner` between the rays towards `prev` and `next`.
struct RectAngleFactor {
  VariableId prev;
  VariableId corner;
  VariableId next;
  double information = 1.0;
};

/// Nominal distance between two slot corners.
struct RectDistanceFactor {
  VariableId first;
  VariableId second;
  double nominal = 1.0;
  double information = 1.0;
};

/// Fiducial tag position in the vehicle frame, derived from range and bearing.
struct TagObservationFactor {
  VariableId pose;
  VariableId tag;
  Point2 measurement;
  Eigen::Matrix2d information = Eigen::Matrix2d::Identity();
};

/// One association hypothesis: the measured points belong to `targets`.
struct MaxMixtureComponent {
  double weight = 1.0;
  std::vector<VariableId> targets;
  Eigen::MatrixXd information;
};

/// Max-mixture over association hypotheses. Every component predicts the same
/// measured points from a different set of landmark variables; only the
/// maximum-likelihood component contributes at any linearization point.
struct MaxMixtureFactor {
  VariableId pose;
  std::vector<Point2> measurements;
  std::vector<MaxMixtureComponent> components;
};

using Factor = std::variant<OdometryFactor, PointObservationFactor, RectAngleFactor,
                            RectDistanceFactor, TagObservationFactor, MaxMixtureFactor>;

std::string_view factor_name(const Factor& factor);

// Residuals ------------------------------------------------------------------

/// between(xi, xj) expressed relative to z, angle normalized.
Eigen::Vector3d residual_odometry(const Pose2& xi, const Pose2& xj, const Pose2& z);
Eigen::Vector2d residual_point_obs(const Pose2& pose, Point2 landmark, Point2 z);
/// Interior angle at `corner` minus pi/2. Throws DegenerateCorner when either ray
/// is shorter than 1e-9 m.
double residual_rect_angle(Point2 prev, Point2 corner, Point2 next);
double residual_rect_distance(Point2 first, Point2 second, double nominal);

struct OdometryJacobians {
  Eigen::Matrix3d d_from;
  Eigen::Matrix3d d_to;
};
OdometryJacobians odometry_jacobians(const Pose2& xi, const Pose2& xj, const Pose2& z);

struct PointObsJacobians {
  Eigen::Matrix<double, 2, 3> d_pose;
  Eigen::Matrix2d d_point;
};
PointObsJacobians point_obs_jacobians(const Pose2& pose, Point2 landmark);

struct RectAngleJacobians {
  Eigen::RowVector2d d_prev;
  Eigen::RowVector2d d_corner;
  Eigen::RowVector2d d_next;
};
RectAngleJacobians rect_angle_jacobians(Point2 prev, Point2 corner, Point2 next);

struct RectDistanceJacobians {
  Eigen::RowVector2d d_first;
  Eigen::RowVector2d d_second;
};
RectDistanceJacobians rect_distance_jacobians(Point2 first, Point2 second);

// Variables and linearization --------------------------------------------------

struct Estimates {
  std::vector<Pose2> poses;
  std::vector<Point2> points;

  const Pose2& pose(VariableId id) const { return poses[id.index]; }
  Point2 point(VariableId id) const { return points[id.index]; }
};

struct JacobianBlock {
  VariableId variable;
  Eigen::MatrixXd jacobian;
};

struct LinearizedFactor {
  Eigen::VectorXd residual;
  std::vector<JacobianBlock> blocks;
  Eigen::MatrixXd information;
};

/// Residual, Jacobians and information of `factor` at `values`. For mixture
/// factors `active_component` picks the hypothesis; it is ignored otherwise.
LinearizedFactor linearize(const Factor& factor, const Estimates& values,
                           std::size_t active_component = 0);

/// Residual vector only (no Jacobians).
Eigen::VectorXd evaluate_residual(const Factor& factor, const Estimates& values,
                                  std::size_t active_component = 0);

/// r' * information * r.
double factor_chi2(const Factor& factor, const Estimates& values,
                   std::size_t active_component = 0);

// Max-Mixture -------------------------------------------------------------------

/// Residual of component `j`: predicted body-frame points minus measurements.
Eigen::VectorXd component_residual(const MaxMixtureFactor& factor, std::size_t j,
                                   const Estimates& values);

/// Negative log-likelihood (up to a shared constant) of component `j`:
/// r' L r - 2 ln w - ln det L.
double component_score(const MaxMixtureFactor& factor, std::size_t j,
                       const Estimates& values);

/// Maximum-likelihood component; ties go to the lowest index.
std::size_t select_component(const MaxMixtureFactor& factor, const Estimates& values);

/// The single component with the largest weight (ties to the lowest index),
/// repackaged as a one-component mixture.
MaxMixtureFactor highest_weight_component(const MaxMixtureFactor& factor);

/// Per-factor re-selection of mixture components; zero for plain factors.
std::vector<std::size_t> select_components(std::span<const Factor> factors,
                                           const Estimates& values);

// Graph -------------------------------------------------------------------------

class Graph {
 public:
  VariableId add_pose(const Pose2& initial);
  VariableId add_point(Point2 initial);

  /// Validates references, dimensions and information matrices. Returns the
  /// factor index. Throws InvalidArgument on any violation.
  std::size_t add_factor(Factor factor);

  void fix(VariableId id);
  bool is_fixed(VariableId id) const;
  bool contains(VariableId id) const;

  std::size_t pose_count() const { return values_.poses.size(); }
  std::size_t point_count() const { return values_.points.size(); }
  std::size_t variable_count() const { return order_.size(); }
  std::size_t fixed_pose_count() const;
  std::size_t fixed_count() const;

  /// Variables in insertion order.
  std::span<const VariableId> variables() const { return order_; }
  std::span<const Factor> factors() const { return factors_; }
  const Factor& factor(std::size_t i) const { return factors_[i]; }
  Factor& mutable_factor(std::size_t i) { return factors_[i]; }

  const Estimates& estimates() const { return values_; }
  void set_estimates(Estimates values);
  void set_pose(VariableId id, const Pose2& pose) { values_.poses[id.index] = pose; }
  void set_point(VariableId id, Point2 point) { values_.points[id.index] = point; }

  /// Tally of factors by variant name, for audits.
  std::size_t count_factors(std::string_view name) const;

 private:
  void require(VariableId id, VariableKind kind) const;

  Estimates values_;
  std::vector<bool> pose_fixed_;
  std::vector<bool> point_fixed_;
  std::vector<VariableId> order_;
  std::vector<Factor> factors_;
};

// Optimizer -------------------------------------------------------------------

struct LmConfig {
  int max_iterations = 100;
  double initial_lambda = 1e-4;
  double lambda_up = 10.0;
  double lambda_down = 0.1;
  /// Relative objective decrease below which the solve is considered converged.
  double convergence_tol = 1e-12;
  /// Objective below which further iterations are pointless.
  double absolute_tol = 1e-26;
  double max_lambda = 1e14;

  void validate() const;
};

struct OptimizeResult {
  Estimates estimates;
  /// Sum of r' L r over all factors using each mixture's active component.
  double final_chi2 = 0.0;
  /// The minimized objective: chi2 plus each mixture's normalizer offset
  /// relative to its best-scoring component constant.
  double final_objective = 0.0;
  int iterations = 0;
  bool converged = true;
  std::vector<std::size_t> active_components;
  /// Objective at the start and after each accepted step.
  std::vector<double> objective_history;
};

/// Levenberg-Marquardt on the sparse normal equations. Requires at least one
/// fixed variable. Mixture components are re-selected after every accepted
/// step. Throws SingularSystem when the damped system cannot be factorized at
/// maximum damping.
OptimizeResult optimize(const Graph& graph, const LmConfig& config = {});

/// Objective as defined by OptimizeResult::final_objective.
double total_objective(std::span<const Factor> factors, const Estimates& values,
                       std::span<const std::size_t> active);
double total_chi2(std::span<const Factor> factors, const Estimates& values,
                  std::span<const std::size_t> active);

}  // namespace parkslam
