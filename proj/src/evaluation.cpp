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

#include <cmath>
#include <limits>
#include <set>

#include "parkslam/errors.hpp"
#include "parkslam/harness.hpp"

namespace parkslam {

void SemanticMap::check() const {
  std::set<int> ids;
  for (const MapSlot& s : slots) {
    if (s.id && !ids.insert(*s.id).second) {
      throw Error(ErrorCategory::InvalidArgument, "map slot ID " + std::to_string(*s.id) + " is not unique");
    }
    for (std::size_t k = 0; k < 4; ++k) {
      const double err =
          residual_rect_angle(s.corners[(k + 3) % 4], s.corners[k], s.corners[(k + 1) % 4]);
      if (std::abs(err) >= 0.1) {
        throw Error(ErrorCategory::InvalidArgument, "map slot " + s.label() + " is not rectangular");
      }
    }
  }
}

double signed_lateral_offset(Point2 p, std::span<const Pose2> reference) {
  if (reference.empty()) throw Error(ErrorCategory::InvalidArgument, "empty reference trace");
  if (reference.size() == 1) {
    const Pose2& r = reference.front();
    const Point2 d = p - r.translation();
    return cross({std::cos(r.theta()), std::sin(r.theta())}, d);
  }
  double best = std::numeric_limits<double>::infinity();
  double signed_best = 0.0;
  for (std::size_t i = 0; i + 1 < reference.size(); ++i) {
    const Point2 a = reference[i].translation();
    const Point2 b = reference[i + 1].translation();
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) continue;
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    const Point2 foot = a + t * ab;
    const double d = distance(p, foot);
    if (d < best) {
      best = d;
      const double side = cross(ab, p - a);
      signed_best = side < 0.0 ? -d : d;
    }
  }
  if (!std::isfinite(best)) {
    // Every segment is degenerate: the trace is a single point.
    const Pose2& r = reference.front();
    return cross({std::cos(r.theta()), std::sin(r.theta())}, p - r.translation());
  }
  return signed_best;
}

LateralStats lateral_stats(std::span<const Pose2> estimated, std::span<const Pose2> reference) {
  if (estimated.size() != reference.size()) {
    throw Error(ErrorCategory::LengthMismatch,
                "trace lengths differ: " + std::to_string(estimated.size()) + " vs " +
                    std::to_string(reference.size()));
  }
  LateralStats stats;
  if (estimated.empty()) return stats;
  std::vector<double> offsets;
  offsets.reserve(estimated.size());
  for (const Pose2& p : estimated) offsets.push_back(signed_lateral_offset(p.translation(), reference));
  double sum = 0.0;
  for (const double o : offsets) sum += o;
  stats.mean = sum / static_cast<double>(offsets.size());
  double var = 0.0;
  for (const double o : offsets) var += (o - stats.mean) * (o - stats.mean);
  stats.std = std::sqrt(var / static_cast<double>(offsets.size()));
  return stats;
}

EvalReport evaluate(std::span<const Pose2> estimated, std::span<const Pose2> reference,
                    std::span<const Pose2> ground_truth) {
  if (estimated.size() != ground_truth.size()) {
    throw Error(ErrorCategory::LengthMismatch, "estimated and ground-truth traces differ in length");
  }
  EvalReport report;
  const LateralStats lat = lateral_stats(estimated, reference);
  report.trace_lateral_mean = lat.mean;
  report.trace_lateral_std = lat.std;
  report.frames = estimated.size();
  double sq = 0.0;
  for (std::size_t i = 0; i < estimated.size(); ++i) {
    const double d = distance(estimated[i].translation(), ground_truth[i].translation());
    sq += d * d;
  }
  report.trace_rmse = estimated.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(estimated.size()));
  return report;
}

double landmark_rmse(const SemanticMap& map, const GroundTruthLot& lot) {
  double sq = 0.0;
  std::size_t n = 0;
  for (const MapSlot& s : map.slots) {
    if (!s.id) continue;
    const GroundTruthSlot* truth = lot.find_slot(*s.id);
    if (truth == nullptr) continue;
    for (std::size_t k = 0; k < 4; ++k) {
      const double d = distance(s.corners[k], truth->corners[k]);
      sq += d * d;
      ++n;
    }
  }
  return n == 0 ? 0.0 : std::sqrt(sq / static_cast<double>(n));
}

double id_accuracy(const SemanticMap& map, const GroundTruthLot& lot) {
  if (map.slots.empty() || lot.slots.empty()) return 0.0;
  std::size_t correct = 0;
  for (const MapSlot& s : map.slots) {
    const Point2 c = centroid(s.corners);
    const GroundTruthSlot* nearest = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const GroundTruthSlot& t : lot.slots) {
      const double d = distance(c, centroid(t.corners));
      if (d < best) {
        best = d;
        nearest = &t;
      }
    }
    if (s.id && *s.id == nearest->id) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(map.slots.size());
}

double tag_rmse(const SemanticMap& map, const GroundTruthLot& lot) {
  double sq = 0.0;
  std::size_t n = 0;
  for (const MapTag& t : map.tags) {
    const TagPlacement* truth = lot.find_tag(t.tag_id);
    if (truth == nullptr) continue;
    const double d = distance(t.position, truth->position);
    sq += d * d;
    ++n;
  }
  return n == 0 ? 0.0 : std::sqrt(sq / static_cast<double>(n));
}

}  // namespace parkslam
