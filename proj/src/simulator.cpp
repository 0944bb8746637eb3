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

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "parkslam/errors.hpp"
#include "parkslam/simulator.hpp"

namespace parkslam {
namespace {

constexpr double kPi = std::numbers::pi;

// Geometry of the loop road around the upper row of the first row pair.
struct LoopRect {
  double x_left;
  double x_right;
  double y_bottom;
  double y_top;
};

LoopRect loop_rect(const LotSpec& spec) {
  const double a = spec.aisle_width;
  const double w = spec.slots_per_row * spec.slot_width;
  return {-a / 2.0, w + a / 2.0, a / 2.0, a + spec.slot_depth + a / 2.0};
}

double pair_base_y(const LotSpec& spec, int pair) {
  return pair * (2.0 * spec.aisle_width + 2.0 * spec.slot_depth);
}

int slot_id_for(const LotSpec& spec, std::size_t index) {
  return spec.id_assignment.empty() ? 10 + static_cast<int>(index) : spec.id_assignment[index];
}

struct Primitive {
  int steps;
  double curvature;
};

std::vector<Pose2> integrate(const Pose2& start, std::span<const Primitive> primitives,
                             double step, bool include_end) {
  std::vector<Pose2> poses{start};
  Pose2 p = start;
  for (const Primitive& prim : primitives) {
    const double dtheta = prim.curvature * step;
    Pose2 inc;
    if (prim.curvature == 0.0) {
      inc = Pose2(step, 0.0, 0.0);
    } else {
      const double r = 1.0 / prim.curvature;
      inc = Pose2(r * std::sin(dtheta), r * (1.0 - std::cos(dtheta)), dtheta);
    }
    for (int k = 0; k < prim.steps; ++k) {
      p = compose(p, inc);
      poses.push_back(p);
    }
  }
  if (!include_end) poses.pop_back();
  return poses;
}

}  // namespace

LotSpec default_lot_spec(int rows, int slots_per_row, int tag_count) {
  LotSpec spec;
  spec.rows = rows;
  spec.slots_per_row = slots_per_row;
  const LoopRect rect = loop_rect(spec);
  const double a = spec.aisle_width;

  spec.entrance_corridor = {{-a - 24.0, a / 2.0}, {-a, a / 2.0}, {rect.x_left, a / 2.0}};

  const int corridor_tags = tag_count / 6;
  const double corridor_start = spec.entrance_corridor.front().x;
  const double corridor_end = spec.entrance_corridor[1].x;
  int next_id = 0;
  for (int k = 0; k < corridor_tags; ++k) {
    const double u = (k + 0.5) / corridor_tags;
    const double x = corridor_start + u * (corridor_end - corridor_start);
    const double side = k % 2 == 0 ? 1.5 : -1.5;
    spec.tag_placements.push_back({next_id++, {x, a / 2.0 + side}, k % 4 < 2 ? kPi : 0.0});
  }

  // Remaining tags go around the loop, alternating sides and facing both
  // directions of travel.
  const int loop_tags = tag_count - corridor_tags;
  const double wl = rect.x_right - rect.x_left;
  const double hl = rect.y_top - rect.y_bottom;
  const double perimeter = 2.0 * (wl + hl);
  for (int k = 0; k < loop_tags; ++k) {
    double u = (k + 0.5) * perimeter / loop_tags;
    Point2 p;
    double heading;
    if (u < wl) {
      p = {rect.x_left + u, rect.y_bottom};
      heading = 0.0;
    } else if ((u -= wl) < hl) {
      p = {rect.x_right, rect.y_bottom + u};
      heading = kPi / 2.0;
    } else if ((u -= hl) < wl) {
      p = {rect.x_right - u, rect.y_top};
      heading = kPi;
    } else {
      u -= wl;
      p = {rect.x_left, rect.y_top - u};
      heading = -kPi / 2.0;
    }
    const double side = k % 2 == 0 ? 2.0 : -2.0;
    const Point2 left{-std::sin(heading), std::cos(heading)};
    const double facing = k % 4 < 2 ? heading + kPi : heading;
    spec.tag_placements.push_back({next_id++, p + side * left, normalize_angle(facing)});
  }
  return spec;
}

const GroundTruthSlot* GroundTruthLot::find_slot(int id) const {
  const auto it = std::find_if(slots.begin(), slots.end(), [&](const auto& s) { return s.id == id; });
  return it == slots.end() ? nullptr : &*it;
}

const TagPlacement* GroundTruthLot::find_tag(int tag_id) const {
  const auto it =
      std::find_if(tags.begin(), tags.end(), [&](const auto& t) { return t.tag_id == tag_id; });
  return it == tags.end() ? nullptr : &*it;
}

GroundTruthLot generate_lot(const LotSpec& spec) {
  if (spec.rows <= 0 || spec.slots_per_row <= 0 || !(spec.slot_width > 0.0) ||
      !(spec.slot_depth > 0.0) || !(spec.aisle_width > 0.0)) {
    throw Error(ErrorCategory::SpecOverlap, "lot dimensions must be positive");
  }
  const std::size_t count = static_cast<std::size_t>(spec.rows) * spec.slots_per_row;
  if (!spec.id_assignment.empty() && spec.id_assignment.size() != count) {
    throw Error(ErrorCategory::SpecOverlap, "id assignment does not cover every slot");
  }
  if (spec.id_assignment.empty() && count > 90) {
    throw Error(ErrorCategory::SpecOverlap, "more slots than two-digit IDs");
  }

  GroundTruthLot lot;
  lot.spec = spec;
  std::set<int> seen;
  const double w = spec.slot_width;
  const double h = spec.slot_depth;
  const double a = spec.aisle_width;
  for (int r = 0; r < spec.rows; ++r) {
    const double base = pair_base_y(spec, r / 2);
    for (int i = 0; i < spec.slots_per_row; ++i) {
      const std::size_t index = static_cast<std::size_t>(r) * spec.slots_per_row + i;
      const int id = slot_id_for(spec, index);
      if (id < 10 || id > 99) throw Error(ErrorCategory::SpecOverlap, "slot ID is not two-digit");
      if (!seen.insert(id).second) {
        throw Error(ErrorCategory::SpecOverlap, "duplicate slot ID " + std::to_string(id));
      }
      const double x = i * w;
      GroundTruthSlot slot;
      slot.id = id;
      slot.row = r;
      if (r % 2 == 0) {
        // Below the aisle, entrance on top.
        slot.corners = {{{x + w, base}, {x, base}, {x, base - h}, {x + w, base - h}}};
      } else {
        const double y = base + a;
        slot.corners = {{{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}}};
      }
      lot.slots.push_back(slot);
    }
  }

  // Axis-aligned slots: interiors must be disjoint.
  for (std::size_t i = 0; i < lot.slots.size(); ++i) {
    for (std::size_t j = i + 1; j < lot.slots.size(); ++j) {
      auto box = [](const GroundTruthSlot& s) {
        double x0 = s.corners[0].x, x1 = x0, y0 = s.corners[0].y, y1 = y0;
        for (const auto& c : s.corners) {
          x0 = std::min(x0, c.x);
          x1 = std::max(x1, c.x);
          y0 = std::min(y0, c.y);
          y1 = std::max(y1, c.y);
        }
        return std::array<double, 4>{x0, x1, y0, y1};
      };
      const auto bi = box(lot.slots[i]);
      const auto bj = box(lot.slots[j]);
      constexpr double kTouch = 1e-9;
      if (bi[0] < bj[1] - kTouch && bj[0] < bi[1] - kTouch && bi[2] < bj[3] - kTouch &&
          bj[2] < bi[3] - kTouch) {
        throw Error(ErrorCategory::SpecOverlap, "slots overlap");
      }
    }
  }

  std::set<int> tag_ids;
  for (const auto& t : spec.tag_placements) {
    if (!tag_ids.insert(t.tag_id).second) {
      throw Error(ErrorCategory::SpecOverlap, "duplicate tag ID " + std::to_string(t.tag_id));
    }
    if (!is_finite(t.position)) throw Error(ErrorCategory::SpecOverlap, "non-finite tag position");
  }
  lot.tags = spec.tag_placements;

  const int last_pair = (spec.rows - 1) / 2;
  lot.bounds_min = {-a, -h};
  lot.bounds_max = {spec.slots_per_row * w + a, pair_base_y(spec, last_pair) + 2.0 * a + h};
  return lot;
}

std::vector<Pose2> generate_trajectory(const GroundTruthLot& lot, const TrajectorySpec& spec) {
  if (!(spec.speed > 0.0) || !(spec.dt > 0.0)) {
    throw Error(ErrorCategory::InvalidArgument, "speed and dt must be positive");
  }
  const double step = spec.speed * spec.dt;
  const LotSpec& ls = lot.spec;

  switch (spec.kind) {
    case TrajectoryKind::Straight: {
      const int n = static_cast<int>(std::lround(spec.straight_length / step));
      if (n <= 0) throw Error(ErrorCategory::InvalidArgument, "straight path shorter than one step");
      const Pose2 start(0.0, ls.aisle_width / 2.0, 0.0);
      const std::array<Primitive, 1> prims{{{n, 0.0}}};
      return integrate(start, prims, step, false);
    }
    case TrajectoryKind::Repeat: {
      if (spec.reference.empty() || spec.repeats <= 0) {
        throw Error(ErrorCategory::InvalidArgument, "repeat needs a reference and repeats > 0");
      }
      const bool closed = distance(spec.reference.front().translation(),
                                   spec.reference.back().translation()) < 1e-6;
      std::vector<Pose2> out;
      for (int r = 0; r < spec.repeats; ++r) {
        const std::size_t skip = (r > 0 && closed) ? 1 : 0;
        out.insert(out.end(), spec.reference.begin() + static_cast<std::ptrdiff_t>(skip),
                   spec.reference.end());
      }
      return out;
    }
    case TrajectoryKind::Loop:
      break;
  }

  if (!(spec.min_turn_radius > 0.0)) {
    throw Error(ErrorCategory::InvalidArgument, "minimum turn radius must be positive");
  }
  const LoopRect rect = loop_rect(ls);
  // Quarter turns span a whole number of steps, rounded up so the radius never
  // drops below the bound.
  const int arc_steps =
      std::max(1, static_cast<int>(std::ceil(kPi / 2.0 * spec.min_turn_radius / step - 1e-9)));
  const double radius = 2.0 * arc_steps * step / kPi;
  if (radius > ls.aisle_width / 2.0 + 1e-12) {
    throw Error(ErrorCategory::InfeasiblePath, "aisle too narrow for the turn radius");
  }
  const double wl = rect.x_right - rect.x_left;
  const double hl = rect.y_top - rect.y_bottom;
  const int horizontal = static_cast<int>(std::floor((wl - 2.0 * radius) / step));
  const int vertical = static_cast<int>(std::floor((hl - 2.0 * radius) / step));
  if (horizontal < 0 || vertical < 0) {
    throw Error(ErrorCategory::InfeasiblePath, "loop too small for the turn radius");
  }
  const double span_x = horizontal * step + 2.0 * radius;
  const double x0 = 0.5 * (rect.x_left + rect.x_right - span_x);
  const double y0 = rect.y_bottom;
  const double kappa = spec.clockwise ? -1.0 / radius : 1.0 / radius;

  std::vector<Primitive> prims;
  for (int side = 0; side < 4; ++side) {
    const int straight = side % 2 == 0 ? horizontal : vertical;
    if (straight > 0) prims.push_back({straight, 0.0});
    prims.push_back({arc_steps, kappa});
  }
  const Pose2 start = spec.clockwise ? Pose2(x0 + span_x - radius, y0, kPi)
                                     : Pose2(x0 + radius, y0, 0.0);
  std::vector<Pose2> poses = integrate(start, prims, step, true);
  poses.back() = poses.front();
  return poses;
}

// Noise ---------------------------------------------------------------------------

void NoiseModel::validate() const {
  const double p[4] = {id_p_correct, id_p_one_digit_wrong, id_p_partial, id_p_missing};
  double sum = 0.0;
  for (const double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCategory::InvalidArgument, "ID probability outside [0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCategory::InvalidArgument, "ID probabilities must sum to 1");
  }
  if (corner_sigma < 0.0 || (odom_sigma.array() < 0.0).any() || tag_corner_sigma < 0.0 ||
      compass_sigma < 0.0 || !(detection_range > 0.0) || !(tag_detection_range > 0.0)) {
    throw Error(ErrorCategory::InvalidArgument, "noise sigmas must be non-negative");
  }
}

NoiseModel NoiseModel::zero() {
  NoiseModel n;
  n.corner_sigma = 0.0;
  n.id_p_correct = 1.0;
  n.id_p_one_digit_wrong = 0.0;
  n.id_p_partial = 0.0;
  n.id_p_missing = 0.0;
  n.odom_sigma.setZero();
  n.tag_corner_sigma = 0.0;
  n.compass_sigma = 0.0;
  return n;
}

NoiseModel NoiseModel::profile(const std::string& name) {
  if (name == "default") return {};
  if (name == "zero") return zero();
  if (name == "harsh") {
    NoiseModel n;
    n.corner_sigma = 0.08;
    n.id_p_correct = 0.7;
    n.id_p_one_digit_wrong = 0.1;
    n.id_p_partial = 0.1;
    n.id_p_missing = 0.1;
    n.tag_corner_sigma = 1.0;
    return n;
  }
  throw Error(ErrorCategory::InvalidArgument, "unknown noise profile '" + name + "'");
}

// Rendering ---------------------------------------------------------------------------

std::vector<Pose2> Dataset::ground_truth_trace() const {
  std::vector<Pose2> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.ground_truth);
  return out;
}

Eigen::Vector3d world_to_camera(const Pose2& vehicle, const Eigen::Vector3d& world) {
  const Point2 body = transform_to_body(vehicle, {world.x(), world.y()});
  return {-body.y, -world.z(), body.x};
}

std::array<Eigen::Vector3d, 4> tag_world_corners(const TagPlacement& tag, double tag_side) {
  const Eigen::Vector3d center(tag.position.x, tag.position.y, 0.0);
  const Eigen::Vector3d right(-std::sin(tag.facing), std::cos(tag.facing), 0.0);
  const Eigen::Vector3d down(0.0, 0.0, -1.0);
  const auto model = tag_model_points(tag_side);
  std::array<Eigen::Vector3d, 4> out;
  for (int k = 0; k < 4; ++k) out[k] = center + model[k].x() * right + model[k].y() * down;
  return out;
}

namespace {

SlotId corrupt_id(int truth, const NoiseModel& noise, std::mt19937_64& rng) {
  constexpr double kClean = 0.95;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> murky(0.3, 0.7);
  const std::array<int, 2> digits{truth / 10, truth % 10};
  const double u = unit(rng);
  double acc = noise.id_p_correct;
  // A reader that never errs reports full confidence.
  if (acc >= 1.0) return SlotId(digits, {1.0, 1.0});
  if (u < acc) return SlotId(digits, {kClean, kClean});
  acc += noise.id_p_one_digit_wrong;
  if (u < acc) {
    const std::size_t pos = std::uniform_int_distribution<int>(0, 1)(rng);
    std::array<int, 2> wrong = digits;
    // A uniformly drawn digit different from the true one.
    int d = std::uniform_int_distribution<int>(0, 8)(rng);
    if (d >= digits[pos]) ++d;
    wrong[pos] = d;
    std::array<double, 2> conf{kClean, kClean};
    conf[pos] = murky(rng);
    return SlotId(wrong, conf);
  }
  acc += noise.id_p_partial;
  if (u < acc) {
    const std::size_t pos = std::uniform_int_distribution<int>(0, 1)(rng);
    std::array<int, 2> partial = digits;
    partial[pos] = SlotId::kUnreadable;
    std::array<double, 2> conf{kClean, kClean};
    conf[pos] = 0.0;
    return SlotId(partial, conf);
  }
  return SlotId::missing();
}

double gaussian(std::mt19937_64& rng, double sigma) {
  if (sigma == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

Point2 line_intersection(Point2 a0, Point2 a1, Point2 b0, Point2 b1) {
  const Point2 da = a1 - a0;
  const Point2 db = b1 - b0;
  const double denom = cross(da, db);
  if (std::abs(denom) < 1e-12) return 0.5 * (a0 + a1);
  const double t = cross(b0 - a0, db) / denom;
  return a0 + t * da;
}

}  // namespace

Dataset render_frames(const GroundTruthLot& lot, std::span<const Pose2> trajectory,
                      const NoiseModel& noise, const SensorConfig& sensors, std::uint64_t seed) {
  noise.validate();
  Dataset ds;
  ds.seed = seed;
  ds.lot = lot.spec;
  ds.sensors = sensors;
  if (trajectory.empty()) return ds;
  ds.start_pose = trajectory.front();

  std::mt19937_64 rng(seed);
  std::map<int, int> swaps_left;
  for (const auto& s : noise.injected_swaps) swaps_left[s.true_id] += s.occurrences;

  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const Pose2& pose = trajectory[k];
    ObservationFrame frame;
    frame.timestamp = static_cast<double>(k) * sensors.dt;
    frame.ground_truth = pose;

    if (k > 0) {
      const Pose2 inc = between(trajectory[k - 1], pose);
      const double chord = std::hypot(inc.x(), inc.y());
      const double dtheta = inc.theta();
      const double arc =
          std::abs(dtheta) < 1e-12 ? chord : chord * (dtheta / 2.0) / std::sin(dtheta / 2.0);
      const double s = arc + gaussian(rng, noise.odom_sigma(0));
      const double dth = dtheta + gaussian(rng, noise.odom_sigma(2));
      frame.odom.speed = s / sensors.dt;
      frame.odom.steering = std::abs(s) > 1e-9 ? std::atan(sensors.wheelbase * dth / s) : 0.0;
    }
    frame.odom.compass = normalize_angle(pose.theta() + gaussian(rng, noise.compass_sigma));

    for (std::size_t s = 0; s < lot.slots.size(); ++s) {
      const GroundTruthSlot& slot = lot.slots[s];
      std::array<Point2, 4> body;
      bool visible = true;
      for (std::size_t c = 0; c < 4; ++c) {
        body[c] = transform_to_body(pose, slot.corners[c]);
        visible = visible && norm(body[c]) <= noise.detection_range && body[c].x > 0.0;
      }
      if (!visible) continue;
      SlotDetection det;
      det.truth_index = s;
      for (std::size_t c = 0; c < 4; ++c) {
        det.corners[c] = {body[c].x + gaussian(rng, noise.corner_sigma),
                          body[c].y + gaussian(rng, noise.corner_sigma)};
      }
      auto swap = swaps_left.find(slot.id);
      if (swap != swaps_left.end() && swap->second > 0) {
        --swap->second;
        const auto* rule = &*std::find_if(noise.injected_swaps.begin(), noise.injected_swaps.end(),
                                          [&](const IdSwap& x) { return x.true_id == slot.id; });
        det.id = SlotId::full(rule->read_id, 0.95);
      } else {
        det.id = corrupt_id(slot.id, noise, rng);
      }
      frame.slot_detections.push_back(det);
    }

    const Point2 position = pose.translation();
    for (const TagPlacement& tag : lot.tags) {
      const Point2 to_camera = position - tag.position;
      const double dist = norm(to_camera);
      if (dist >= noise.tag_detection_range || dist < 1e-6) continue;
      const Point2 normal{std::cos(tag.facing), std::sin(tag.facing)};
      // Printed face must point at the camera within 75 degrees.
      if (dot(normal, to_camera) <= std::cos(75.0 * kPi / 180.0) * dist) continue;
      const auto world = tag_world_corners(tag, sensors.tag_side);
      TagDetection det;
      det.tag_id = tag.tag_id;
      bool visible = true;
      for (int c = 0; c < 4 && visible; ++c) {
        const Eigen::Vector3d pc = world_to_camera(pose, world[c]);
        if (pc.z() < 0.5) {
          visible = false;
          break;
        }
        const Point2 px = project(pc, sensors.camera);
        visible = px.x >= 0.0 && px.x <= sensors.image_width && px.y >= 0.0 &&
                  px.y <= sensors.image_height;
        det.corners[c] = px;
      }
      if (!visible) continue;
      for (auto& c : det.corners) {
        c.x += gaussian(rng, noise.tag_corner_sigma);
        c.y += gaussian(rng, noise.tag_corner_sigma);
      }
      det.center_x =
          line_intersection(det.corners[0], det.corners[2], det.corners[1], det.corners[3]).x;
      frame.tag_detections.push_back(det);
    }
    ds.frames.push_back(std::move(frame));
  }
  return ds;
}

}  // namespace parkslam
