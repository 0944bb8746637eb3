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

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

#include "parkslam/errors.hpp"
#include "parkslam/fiducial.hpp"

namespace parkslam {
namespace {

constexpr int kMaxRefineIterations = 50;

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w) {
  const double angle = w.norm();
  if (angle < 1e-12) return Eigen::Matrix3d::Identity() + skew(w);
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

// Hartley normalization of 2D points: centroid at origin, mean distance sqrt(2).
Eigen::Matrix3d normalizer(std::span<const Eigen::Vector2d, 4> pts) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= 4.0;
  double spread = 0.0;
  for (const auto& p : pts) spread += (p - mean).norm();
  spread /= 4.0;
  const double s = spread > 0.0 ? std::sqrt(2.0) / spread : 1.0;
  Eigen::Matrix3d t;
  t << s, 0, -s * mean.x(), 0, s, -s * mean.y(), 0, 0, 1;
  return t;
}

// Homography mapping tag-plane (X, Y, 1) to normalized image coordinates.
Eigen::Matrix3d estimate_homography(std::span<const Eigen::Vector2d, 4> model,
                                    std::span<const Eigen::Vector2d, 4> image) {
  const Eigen::Matrix3d tm = normalizer(model);
  const Eigen::Matrix3d ti = normalizer(image);
  Eigen::Matrix<double, 8, 9> a;
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector3d m = tm * model[k].homogeneous();
    const Eigen::Vector3d p = ti * image[k].homogeneous();
    const double u = p.x() / p.z();
    const double v = p.y() / p.z();
    a.row(2 * k) << -m.x(), -m.y(), -m.z(), 0, 0, 0, u * m.x(), u * m.y(), u * m.z();
    a.row(2 * k + 1) << 0, 0, 0, -m.x(), -m.y(), -m.z(), v * m.x(), v * m.y(), v * m.z();
  }
  const Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // Four points in general position give rank 8; anything less is degenerate.
  if (!(sv(7) > 1e-9 * sv(0))) {
    throw Error(ErrorCategory::DegenerateHomography, "tag corners are rank-deficient");
  }
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return ti.inverse() * hn * tm;
}

double reprojection_cost(const Eigen::Matrix3d& r, const Eigen::Vector3d& t,
                         std::span<const Eigen::Vector3d, 4> model,
                         std::span<const Point2, 4> image, const CameraIntrinsics& cam) {
  double cost = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector3d pc = r * model[k] + t;
    if (!(pc.z() > 0.0)) return std::numeric_limits<double>::infinity();
    const Point2 p = project(pc, cam);
    cost += (p.x - image[k].x) * (p.x - image[k].x) + (p.y - image[k].y) * (p.y - image[k].y);
  }
  return cost;
}

}  // namespace

std::array<Eigen::Vector3d, 4> tag_model_points(double tag_side) {
  const double h = 0.5 * tag_side;
  return {Eigen::Vector3d(-h, -h, 0), Eigen::Vector3d(h, -h, 0), Eigen::Vector3d(h, h, 0),
          Eigen::Vector3d(-h, h, 0)};
}

Point2 project(const Eigen::Vector3d& pc, const CameraIntrinsics& cam) {
  return {cam.f * pc.x() / pc.z() + cam.x0, cam.f * pc.y() / pc.z() + cam.y0};
}

PnpSolution solve_pnp(const TagDetection& detection, const CameraIntrinsics& cam,
                      double tag_side) {
  if (!(tag_side > 0.0) || !(cam.f > 0.0)) {
    throw Error(ErrorCategory::InvalidArgument, "tag side and focal length must be positive");
  }
  const auto model = tag_model_points(tag_side);
  std::array<Eigen::Vector2d, 4> model2;
  std::array<Eigen::Vector2d, 4> normalized;
  for (int k = 0; k < 4; ++k) {
    model2[k] = model[k].head<2>();
    normalized[k] = {(detection.corners[k].x - cam.x0) / cam.f,
                     (detection.corners[k].y - cam.y0) / cam.f};
  }
  const Eigen::Matrix3d h = estimate_homography(model2, normalized);

  // H ~ [r1 r2 t].
  double scale = 2.0 / (h.col(0).norm() + h.col(1).norm());
  if (h(2, 2) < 0.0) scale = -scale;
  Eigen::Matrix3d r0;
  r0.col(0) = scale * h.col(0);
  r0.col(1) = scale * h.col(1);
  r0.col(2) = r0.col(0).cross(r0.col(1));
  PnpSolution sol;
  sol.rotation = nearest_rotation(r0);
  sol.translation = scale * h.col(2);

  // Levenberg-damped Gauss-Newton on the 8 reprojection residuals with a left
  // rotation increment.
  double cost = reprojection_cost(sol.rotation, sol.translation, model, detection.corners, cam);
  double lambda = 1e-6;
  for (int it = 0; it < kMaxRefineIterations; ++it) {
    sol.iterations = it + 1;
    Eigen::Matrix<double, 8, 6> j;
    Eigen::Matrix<double, 8, 1> r;
    for (int k = 0; k < 4; ++k) {
      const Eigen::Vector3d rx = sol.rotation * model[k];
      const Eigen::Vector3d pc = rx + sol.translation;
      const Point2 p = project(pc, cam);
      r(2 * k) = p.x - detection.corners[k].x;
      r(2 * k + 1) = p.y - detection.corners[k].y;
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << cam.f / pc.z(), 0, -cam.f * pc.x() / (pc.z() * pc.z()), 0, cam.f / pc.z(),
          -cam.f * pc.y() / (pc.z() * pc.z());
      j.block<2, 3>(2 * k, 0) = dproj * (-skew(rx));
      j.block<2, 3>(2 * k, 3) = dproj;
    }
    const Eigen::Matrix<double, 6, 6> hess = j.transpose() * j;
    const Eigen::Matrix<double, 6, 1> g = j.transpose() * r;
    if (g.norm() < 1e-14) break;
    bool improved = false;
    while (lambda < 1e12) {
      Eigen::Matrix<double, 6, 6> damped = hess;
      damped.diagonal() += lambda * hess.diagonal().cwiseMax(1e-12);
      const Eigen::Matrix<double, 6, 1> step = damped.ldlt().solve(-g);
      const Eigen::Matrix3d r_new = exp_so3(step.head<3>()) * sol.rotation;
      const Eigen::Vector3d t_new = sol.translation + step.tail<3>();
      const double c_new = reprojection_cost(r_new, t_new, model, detection.corners, cam);
      if (c_new < cost) {
        const double decrease = cost - c_new;
        sol.rotation = nearest_rotation(r_new);
        sol.translation = t_new;
        cost = c_new;
        lambda = std::max(lambda * 0.1, 1e-12);
        improved = decrease > 1e-16 * (1.0 + cost);
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  if (!std::isfinite(cost) || !sol.translation.allFinite() || !(sol.translation.z() > 0.0)) {
    throw Error(ErrorCategory::NoConvergence, "tag pose refinement failed");
  }
  sol.rms_reprojection = std::sqrt(cost / 4.0);
  return sol;
}

double direct_angle(double x_i, const CameraIntrinsics& cam) {
  return std::atan((x_i - cam.x0) / cam.f);
}

Point2 tag_position(double alpha, double d) { return {std::sin(alpha) * d, std::cos(alpha) * d}; }

double pnp_bearing(const PnpSolution& pnp) {
  return std::atan2(pnp.translation.x(), pnp.translation.z());
}

bool validate(const PnpSolution& pnp, double alpha, double tol) {
  return std::abs(pnp_bearing(pnp) - alpha) <= tol;
}

TagPoseEstimate estimate_tag(const TagDetection& detection, const CameraIntrinsics& cam,
                             double tag_side, double tolerance) {
  const PnpSolution pnp = solve_pnp(detection, cam, tag_side);
  TagPoseEstimate est;
  est.tag_id = detection.tag_id;
  est.rotation = pnp.rotation;
  est.translation = pnp.translation;
  est.alpha = direct_angle(detection.center_x, cam);
  est.distance = pnp.translation.norm();
  est.valid = validate(pnp, est.alpha, tolerance);
  est.position = est.valid ? Point2{pnp.translation.x(), pnp.translation.z()}
                           : tag_position(est.alpha, est.distance);
  return est;
}

std::vector<TagPoseEstimate> range_filter(std::span<const TagPoseEstimate> estimates,
                                          double max_range) {
  if (!(max_range > 0.0)) throw Error(ErrorCategory::InvalidArgument, "max range must be positive");
  std::vector<TagPoseEstimate> kept;
  for (const auto& e : estimates) {
    if (e.distance < max_range) kept.push_back(e);
  }
  return kept;
}

}  // namespace parkslam
