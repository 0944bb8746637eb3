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

// Reference computations written independently of the library: homogeneous
// matrices instead of rotations, acos instead of atan2, determinants instead
// of Cholesky factors, numeric instead of analytic derivatives.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "parkslam/factor_graph.hpp"

namespace oracle {

inline Eigen::Matrix3d homogeneous(double x, double y, double theta) {
  Eigen::Matrix3d t;
  t << std::cos(theta), -std::sin(theta), x, std::sin(theta), std::cos(theta), y, 0, 0, 1;
  return t;
}

inline Eigen::Matrix3d homogeneous(const parkslam::Pose2& p) {
  return homogeneous(p.x(), p.y(), p.theta());
}

inline double wrap(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a <= -M_PI) a += 2.0 * M_PI;
  return a;
}

inline Eigen::Vector3d odometry(const parkslam::Pose2& xi, const parkslam::Pose2& xj,
                                const parkslam::Pose2& z) {
  const Eigen::Matrix3d e = homogeneous(z).inverse() * homogeneous(xi).inverse() * homogeneous(xj);
  return {e(0, 2), e(1, 2), wrap(xj.theta() - xi.theta() - z.theta())};
}

inline Eigen::Vector2d point_obs(const parkslam::Pose2& pose, parkslam::Point2 lm,
                                 parkslam::Point2 z) {
  const Eigen::Vector3d b = homogeneous(pose).inverse() * Eigen::Vector3d(lm.x, lm.y, 1.0);
  return {b.x() - z.x, b.y() - z.y};
}

inline double rect_angle(parkslam::Point2 prev, parkslam::Point2 corner, parkslam::Point2 next) {
  const Eigen::Vector2d a(prev.x - corner.x, prev.y - corner.y);
  const Eigen::Vector2d b(next.x - corner.x, next.y - corner.y);
  const double c = std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0);
  return std::acos(c) - M_PI / 2.0;
}

inline double rect_distance(parkslam::Point2 a, parkslam::Point2 b, double d) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y)) - d;
}

/// Residual of any factor, evaluated with the functions above.
inline Eigen::VectorXd residual(const parkslam::Factor& factor, const parkslam::Estimates& x,
                                std::size_t active = 0) {
  using namespace parkslam;
  if (const auto* f = std::get_if<OdometryFactor>(&factor)) {
    return odometry(x.pose(f->from), x.pose(f->to), f->measurement);
  }
  if (const auto* f = std::get_if<PointObservationFactor>(&factor)) {
    return point_obs(x.pose(f->pose), x.point(f->point), f->measurement);
  }
  if (const auto* f = std::get_if<TagObservationFactor>(&factor)) {
    return point_obs(x.pose(f->pose), x.point(f->tag), f->measurement);
  }
  if (const auto* f = std::get_if<RectAngleFactor>(&factor)) {
    return Eigen::VectorXd::Constant(1, rect_angle(x.point(f->prev), x.point(f->corner), x.point(f->next)));
  }
  if (const auto* f = std::get_if<RectDistanceFactor>(&factor)) {
    return Eigen::VectorXd::Constant(1, rect_distance(x.point(f->first), x.point(f->second), f->nominal));
  }
  const auto& m = std::get<MaxMixtureFactor>(factor);
  Eigen::VectorXd r(2 * m.measurements.size());
  for (std::size_t k = 0; k < m.measurements.size(); ++k) {
    r.segment<2>(2 * k) = point_obs(x.pose(m.pose), x.point(m.components[active].targets[k]), m.measurements[k]);
  }
  return r;
}

/// Central-difference Jacobian of `residual` with respect to one variable.
inline Eigen::MatrixXd numeric_jacobian(const parkslam::Factor& factor, const parkslam::Estimates& x,
                                        parkslam::VariableId id, std::size_t active = 0,
                                        double h = 1e-6) {
  const int dim = id.kind == parkslam::VariableKind::Pose ? 3 : 2;
  const Eigen::Index m = residual(factor, x, active).size();
  Eigen::MatrixXd j(m, dim);
  for (int c = 0; c < dim; ++c) {
    parkslam::Estimates a = x, b = x;
    if (id.kind == parkslam::VariableKind::Pose) {
      const auto& p = x.pose(id);
      double da[3] = {p.x(), p.y(), p.theta()};
      double db[3] = {p.x(), p.y(), p.theta()};
      da[c] += h;
      db[c] -= h;
      a.poses[id.index] = parkslam::Pose2(da[0], da[1], da[2]);
      b.poses[id.index] = parkslam::Pose2(db[0], db[1], db[2]);
    } else {
      (c == 0 ? a.points[id.index].x : a.points[id.index].y) += h;
      (c == 0 ? b.points[id.index].x : b.points[id.index].y) -= h;
    }
    Eigen::VectorXd d = residual(factor, a, active) - residual(factor, b, active);
    for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = std::remainder(d(k), 2.0 * M_PI);
    j.col(c) = d / (2.0 * h);
  }
  return j;
}

/// ||J_analytic - J_numeric|| / ||J_numeric|| over all blocks of a factor.
inline double jacobian_relative_error(const parkslam::Factor& factor, const parkslam::Estimates& x,
                                      std::size_t active = 0) {
  const parkslam::LinearizedFactor lin = parkslam::linearize(factor, x, active);
  double diff2 = 0.0;
  double ref2 = 0.0;
  for (const auto& block : lin.blocks) {
    const Eigen::MatrixXd num = numeric_jacobian(factor, x, block.variable, active);
    if (num.rows() != block.jacobian.rows() || num.cols() != block.jacobian.cols()) return 1e300;
    diff2 += (block.jacobian - num).squaredNorm();
    ref2 += num.squaredNorm();
  }
  return std::sqrt(diff2) / std::max(std::sqrt(ref2), 1e-12);
}

/// Maximum-likelihood component by direct evaluation of w * N(r; 0, L^-1).
inline std::size_t brute_force_component(const parkslam::MaxMixtureFactor& f,
                                         const parkslam::Estimates& values) {
  std::size_t best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < f.components.size(); ++j) {
    const auto& c = f.components[j];
    Eigen::VectorXd r(2 * f.measurements.size());
    for (std::size_t k = 0; k < f.measurements.size(); ++k) {
      r.segment<2>(2 * k) = point_obs(values.pose(f.pose), values.point(c.targets[k]), f.measurements[k]);
    }
    const double ll = std::log(c.weight) - 0.5 * r.dot(c.information * r) +
                      0.5 * std::log(c.information.determinant());
    if (ll > best_ll) {
      best_ll = ll;
      best = j;
    }
  }
  return best;
}

/// Dense Gauss-Newton over the free variables of a graph made of odometry and
/// point-observation factors. Jacobians by central differences.
class DenseGaussNewton {
 public:
  explicit DenseGaussNewton(const parkslam::Graph& graph) : graph_(graph) {
    for (const auto id : graph.variables()) {
      if (!graph.is_fixed(id)) free_.push_back(id);
    }
  }

  parkslam::Estimates solve(int max_iterations = 200) {
    parkslam::Estimates x = graph_.estimates();
    Eigen::VectorXd v = pack(x);
    double cost = objective(v);
    for (int it = 0; it < max_iterations; ++it) {
      const Eigen::VectorXd r = residuals(v);
      const Eigen::MatrixXd j = jacobian(v);
      const Eigen::MatrixXd w = weights();
      const Eigen::MatrixXd h = j.transpose() * w * j;
      const Eigen::VectorXd g = j.transpose() * w * r;
      const Eigen::VectorXd dx = h.fullPivLu().solve(-g);
      double alpha = 1.0;
      bool moved = false;
      while (alpha > 1e-6) {
        const Eigen::VectorXd trial = v + alpha * dx;
        const double c = objective(trial);
        if (c <= cost) {
          v = trial;
          cost = c;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved || dx.norm() < 1e-13) break;
    }
    return unpack(v);
  }

 private:
  Eigen::VectorXd pack(const parkslam::Estimates& x) const {
    std::vector<double> out;
    for (const auto id : free_) {
      if (id.kind == parkslam::VariableKind::Pose) {
        const auto& p = x.pose(id);
        out.insert(out.end(), {p.x(), p.y(), p.theta()});
      } else {
        const auto p = x.point(id);
        out.insert(out.end(), {p.x, p.y});
      }
    }
    return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
  }

  parkslam::Estimates unpack(const Eigen::VectorXd& v) const {
    parkslam::Estimates x = graph_.estimates();
    Eigen::Index i = 0;
    for (const auto id : free_) {
      if (id.kind == parkslam::VariableKind::Pose) {
        // Keep the raw angle; wrapping happens in the residuals.
        x.poses[id.index] = parkslam::Pose2(v(i), v(i + 1), v(i + 2));
        i += 3;
      } else {
        x.points[id.index] = {v(i), v(i + 1)};
        i += 2;
      }
    }
    return x;
  }

  Eigen::VectorXd residuals(const Eigen::VectorXd& v) const {
    const parkslam::Estimates x = unpack(v);
    std::vector<double> out;
    for (const auto& f : graph_.factors()) {
      if (const auto* o = std::get_if<parkslam::OdometryFactor>(&f)) {
        const auto r = odometry(x.pose(o->from), x.pose(o->to), o->measurement);
        out.insert(out.end(), r.data(), r.data() + 3);
      } else if (const auto* p = std::get_if<parkslam::PointObservationFactor>(&f)) {
        const auto r = point_obs(x.pose(p->pose), x.point(p->point), p->measurement);
        out.insert(out.end(), r.data(), r.data() + 2);
      }
    }
    return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
  }

  Eigen::MatrixXd weights() const {
    std::vector<Eigen::MatrixXd> blocks;
    Eigen::Index n = 0;
    for (const auto& f : graph_.factors()) {
      if (const auto* o = std::get_if<parkslam::OdometryFactor>(&f)) {
        blocks.push_back(o->information);
      } else if (const auto* p = std::get_if<parkslam::PointObservationFactor>(&f)) {
        blocks.push_back(p->information);
      }
      n += blocks.back().rows();
    }
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
      w.block(at, at, b.rows(), b.cols()) = b;
      at += b.rows();
    }
    return w;
  }

  double objective(const Eigen::VectorXd& v) const {
    const Eigen::VectorXd r = residuals(v);
    return r.dot(weights() * r);
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& v) const {
    const double h = 1e-6;
    const Eigen::Index m = residuals(v).size();
    Eigen::MatrixXd j(m, v.size());
    for (Eigen::Index c = 0; c < v.size(); ++c) {
      Eigen::VectorXd a = v, b = v;
      a(c) += h;
      b(c) -= h;
      Eigen::VectorXd d = residuals(a) - residuals(b);
      // Angle residuals may wrap between the two probes.
      for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = std::remainder(d(k), 2.0 * M_PI);
      j.col(c) = d / (2.0 * h);
    }
    return j;
  }

  const parkslam::Graph& graph_;
  std::vector<parkslam::VariableId> free_;
};

}  // namespace oracle
