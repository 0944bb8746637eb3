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

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <optional>

#include "parkslam/errors.hpp"
#include "parkslam/factor_graph.hpp"

namespace parkslam {

void LmConfig::validate() const {
  if (max_iterations < 1 || !(initial_lambda > 0.0) || !(lambda_up > 1.0) ||
      !(lambda_down > 0.0 && lambda_down < 1.0) || !(convergence_tol > 0.0) ||
      !(absolute_tol > 0.0) || !(max_lambda > initial_lambda)) {
    throw Error(ErrorCategory::InvalidArgument, "invalid Levenberg-Marquardt configuration");
  }
}

namespace {

constexpr double kMinDiagonal = 1e-9;

struct Ordering {
  std::vector<int> pose_offset;
  std::vector<int> point_offset;
  int dimension = 0;

  int offset(VariableId id) const {
    return id.kind == VariableKind::Pose ? pose_offset[id.index] : point_offset[id.index];
  }
};

Ordering make_ordering(const Graph& graph) {
  Ordering o;
  o.pose_offset.assign(graph.pose_count(), -1);
  o.point_offset.assign(graph.point_count(), -1);
  for (const VariableId id : graph.variables()) {
    if (graph.is_fixed(id)) continue;
    if (id.kind == VariableKind::Pose) {
      o.pose_offset[id.index] = o.dimension;
      o.dimension += 3;
    } else {
      o.point_offset[id.index] = o.dimension;
      o.dimension += 2;
    }
  }
  return o;
}

struct NormalEquations {
  Eigen::SparseMatrix<double> hessian;
  Eigen::VectorXd gradient;
};

NormalEquations build_normal_equations(std::span<const Factor> factors,
                                       const Estimates& values,
                                       std::span<const std::size_t> active,
                                       const Ordering& ordering) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(factors.size() * 64);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(ordering.dimension);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const LinearizedFactor lin = linearize(factors[i], values, active[i]);
    const Eigen::VectorXd wr = lin.information * lin.residual;
    for (const auto& ba : lin.blocks) {
      const int oa = ordering.offset(ba.variable);
      if (oa < 0) continue;
      g.segment(oa, ba.jacobian.cols()) += ba.jacobian.transpose() * wr;
      const Eigen::MatrixXd jt_info = ba.jacobian.transpose() * lin.information;
      for (const auto& bb : lin.blocks) {
        const int ob = ordering.offset(bb.variable);
        if (ob < 0) continue;
        const Eigen::MatrixXd h = jt_info * bb.jacobian;
        for (Eigen::Index r = 0; r < h.rows(); ++r) {
          for (Eigen::Index c = 0; c < h.cols(); ++c) {
            // Zeros are kept so the pattern depends only on the active components.
            triplets.emplace_back(oa + static_cast<int>(r), ob + static_cast<int>(c), h(r, c));
          }
        }
      }
    }
  }
  NormalEquations ne;
  ne.hessian.resize(ordering.dimension, ordering.dimension);
  ne.hessian.setFromTriplets(triplets.begin(), triplets.end());
  ne.gradient = std::move(g);
  return ne;
}

Estimates apply_step(const Graph& graph, const Estimates& values, const Ordering& ordering,
                     const Eigen::VectorXd& step) {
  Estimates out = values;
  for (const VariableId id : graph.variables()) {
    const int o = ordering.offset(id);
    if (o < 0) continue;
    if (id.kind == VariableKind::Pose) {
      const Pose2& p = values.poses[id.index];
      out.poses[id.index] = Pose2(p.x() + step(o), p.y() + step(o + 1), p.theta() + step(o + 2));
    } else {
      const Point2 p = values.points[id.index];
      out.points[id.index] = Point2{p.x + step(o), p.y + step(o + 1)};
    }
  }
  return out;
}

}  // namespace

OptimizeResult optimize(const Graph& graph, const LmConfig& config) {
  config.validate();
  if (graph.fixed_pose_count() == 0) {
    throw Error(ErrorCategory::InvalidArgument,
                "graph needs at least one fixed pose before optimization");
  }
  const auto factors = graph.factors();
  const Ordering ordering = make_ordering(graph);

  OptimizeResult result;
  result.estimates = graph.estimates();
  result.active_components = select_components(factors, result.estimates);
  double objective = total_objective(factors, result.estimates, result.active_components);
  result.objective_history.push_back(objective);

  if (ordering.dimension == 0) {
    result.final_objective = objective;
    result.final_chi2 = total_chi2(factors, result.estimates, result.active_components);
    return result;
  }

  double lambda = config.initial_lambda;
  bool converged = false;
  using Solver = Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                                      Eigen::AMDOrdering<int>>;
  Solver solver;
  std::optional<std::vector<std::size_t>> analyzed_components;
  bool need_linearization = true;
  NormalEquations ne;
  Eigen::VectorXd diagonal;

  while (result.iterations < config.max_iterations) {
    if (objective <= config.absolute_tol) {
      converged = true;
      break;
    }
    if (need_linearization) {
      ne = build_normal_equations(factors, result.estimates, result.active_components,
                                  ordering);
      diagonal = ne.hessian.diagonal().cwiseMax(kMinDiagonal);
      need_linearization = false;
    }
    ++result.iterations;

    Eigen::SparseMatrix<double> damped = ne.hessian;
    for (int i = 0; i < ordering.dimension; ++i) damped.coeffRef(i, i) += lambda * diagonal(i);
    // The sparsity pattern only changes when a mixture switches component.
    if (analyzed_components != result.active_components) {
      solver.analyzePattern(damped);
      analyzed_components = result.active_components;
    }
    solver.factorize(damped);
    if (solver.info() != Eigen::Success) {
      lambda *= config.lambda_up;
      if (lambda > config.max_lambda) {
        throw Error(ErrorCategory::SingularSystem,
                    "damped normal equations not positive-definite at maximum damping");
      }
      continue;
    }
    const Eigen::VectorXd step = solver.solve(-ne.gradient);
    if (!step.allFinite()) {
      lambda *= config.lambda_up;
      if (lambda > config.max_lambda) {
        throw Error(ErrorCategory::SingularSystem, "non-finite step at maximum damping");
      }
      continue;
    }
    Estimates trial = apply_step(graph, result.estimates, ordering, step);
    const double trial_objective = total_objective(factors, trial, result.active_components);

    if (trial_objective < objective) {
      const double previous = objective;
      result.estimates = std::move(trial);
      // Re-selection can only lower the objective: each mixture switches to a
      // component whose score is no worse than the current one.
      result.active_components = select_components(factors, result.estimates);
      objective = total_objective(factors, result.estimates, result.active_components);
      result.objective_history.push_back(objective);
      lambda = std::max(lambda * config.lambda_down, 1e-15);
      need_linearization = true;
      const double decrease = previous - objective;
      const double scale = 1.0 + result.estimates.poses.size() + result.estimates.points.size();
      if (decrease <= config.convergence_tol * previous ||
          step.norm() <= 1e-14 * scale) {
        converged = true;
        break;
      }
    } else {
      lambda *= config.lambda_up;
      if (lambda > config.max_lambda) {
        // No damped step reduces the objective: we sit at a minimum to
        // working precision.
        converged = true;
        break;
      }
    }
  }

  result.converged = converged;
  result.final_objective = objective;
  result.final_chi2 = total_chi2(factors, result.estimates, result.active_components);
  return result;
}

}  // namespace parkslam
