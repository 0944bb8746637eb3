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

#include "parkslam/association.hpp"
#include "parkslam/errors.hpp"

namespace parkslam {

// SlotId -----------------------------------------------------------------------------

SlotId::SlotId(std::array<int, 2> digits, std::array<double, 2> confidence)
    : digits_(digits), confidence_(confidence) {
  for (std::size_t i = 0; i < 2; ++i) {
    if (digits_[i] != kUnreadable && (digits_[i] < 0 || digits_[i] > 9)) {
      throw Error(ErrorCategory::InvalidArgument, "slot digit out of range");
    }
    if (!(confidence_[i] >= 0.0 && confidence_[i] <= 1.0)) {
      throw Error(ErrorCategory::InvalidArgument, "digit confidence outside [0, 1]");
    }
    if (digits_[i] == kUnreadable) confidence_[i] = 0.0;
  }
}

SlotId SlotId::full(int id, double confidence) {
  if (id < 0 || id > 99) throw Error(ErrorCategory::InvalidArgument, "slot id must have two digits");
  return SlotId({id / 10, id % 10}, {confidence, confidence});
}

IdStatus SlotId::status() const {
  const int readable = (digits_[0] != kUnreadable) + (digits_[1] != kUnreadable);
  if (readable == 2) return IdStatus::Full;
  return readable == 1 ? IdStatus::Partial : IdStatus::Missing;
}

std::optional<int> SlotId::value() const {
  if (status() != IdStatus::Full) return std::nullopt;
  return digits_[0] * 10 + digits_[1];
}

double SlotId::confidence_product() const {
  if (status() == IdStatus::Missing) return 0.0;
  double p = 1.0;
  for (std::size_t i = 0; i < 2; ++i) {
    if (digits_[i] != kUnreadable) p *= confidence_[i];
  }
  return p;
}

bool SlotId::matches(int label) const {
  const std::array<int, 2> d{label / 10, label % 10};
  for (std::size_t i = 0; i < 2; ++i) {
    if (digits_[i] != kUnreadable && digits_[i] != d[i]) return false;
  }
  return true;
}

std::string SlotId::to_string() const {
  std::string s;
  for (const int d : digits_) s += d == kUnreadable ? '?' : static_cast<char>('0' + d);
  return s;
}

Point2 centroid(std::span<const Point2, 4> corners) {
  Point2 c{};
  for (const Point2& p : corners) c = c + p;
  return 0.25 * c;
}

std::string_view to_string(CandidateSource source) {
  switch (source) {
    case CandidateSource::ExactId: return "exact_id";
    case CandidateSource::PartialId: return "partial_id";
    case CandidateSource::NearestNeighbor: return "nearest_neighbor";
  }
  return "unknown";
}

bool CandidateSet::any_in_gate() const {
  return std::any_of(candidates.begin(), candidates.end(),
                     [&](const Candidate& c) { return c.centroid_distance <= gate_radius; });
}

// Pre-association ----------------------------------------------------------------------

std::vector<CandidateSet> pre_associate(std::span<const SlotDetection> detections,
                                        std::span<const MapSlotView> map,
                                        const Pose2& predicted_pose,
                                        const AssociationConfig& config) {
  if (!(config.gate_radius > 0.0)) {
    throw Error(ErrorCategory::InvalidArgument, "gate radius must be positive");
  }
  std::vector<CandidateSet> out;
  out.reserve(detections.size());
  for (std::size_t d = 0; d < detections.size(); ++d) {
    const SlotDetection& det = detections[d];
    std::array<Point2, 4> world;
    for (std::size_t k = 0; k < 4; ++k) world[k] = transform_to_world(predicted_pose, det.corners[k]);
    const Point2 c = centroid(world);

    CandidateSet set;
    set.detection = d;
    set.gate_radius = config.gate_radius;

    const IdStatus status = det.id.status();
    const double id_weight = det.id.confidence_product();
    double id_mass = 0.0;
    bool id_in_gate = false;
    if (status != IdStatus::Missing) {
      const CandidateSource source =
          status == IdStatus::Full ? CandidateSource::ExactId : CandidateSource::PartialId;
      for (std::size_t s = 0; s < map.size(); ++s) {
        if (!map[s].label || !det.id.matches(*map[s].label)) continue;
        const double dist = distance(c, map[s].centroid);
        set.candidates.push_back({s, source, id_weight, dist});
        id_mass += id_weight;
        id_in_gate = id_in_gate || dist <= config.gate_radius;
      }
    }

    const bool uncertain = status != IdStatus::Full || id_weight < config.high_confidence ||
                           !id_in_gate;
    if (uncertain) {
      const double nn_weight = id_mass > 0.0 ? config.nn_floor * id_mass : 1.0;
      for (std::size_t s = 0; s < map.size(); ++s) {
        const double dist = distance(c, map[s].centroid);
        if (dist > config.gate_radius) continue;
        const bool present = std::any_of(set.candidates.begin(), set.candidates.end(),
                                         [&](const Candidate& k) { return k.slot == s; });
        if (!present) set.candidates.push_back({s, CandidateSource::NearestNeighbor, nn_weight, dist});
      }
    }
    out.push_back(std::move(set));
  }
  return out;
}

MaxMixtureFactor build_mixture(const CandidateSet& candidates, const SlotDetection& detection,
                               VariableId pose, std::span<const SlotCorners> slot_corners,
                               const Eigen::Matrix2d& corner_information) {
  if (candidates.empty()) {
    throw Error(ErrorCategory::EmptyCandidates, "detection has no association candidates");
  }
  double total = 0.0;
  for (const auto& c : candidates.candidates) total += c.weight;
  if (!(total > 0.0)) throw Error(ErrorCategory::InvalidArgument, "candidate weights must be positive");

  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(8, 8);
  for (int k = 0; k < 4; ++k) info.block<2, 2>(2 * k, 2 * k) = corner_information;

  MaxMixtureFactor f;
  f.pose = pose;
  f.measurements.assign(detection.corners.begin(), detection.corners.end());
  for (const auto& c : candidates.candidates) {
    const SlotCorners& vars = slot_corners[c.slot];
    f.components.push_back({c.weight / total, {vars.begin(), vars.end()}, info});
  }
  return f;
}

// Lazy addition ----------------------------------------------------------------------------

std::vector<std::size_t> add_rectangle_factors(Graph& graph, const SlotCorners& corners,
                                               const RectangleConfig& config) {
  std::vector<std::size_t> ids;
  ids.reserve(10);
  for (std::size_t k = 0; k < 4; ++k) {
    ids.push_back(graph.add_factor(RectAngleFactor{corners[(k + 3) % 4], corners[k],
                                                   corners[(k + 1) % 4],
                                                   config.angle_information}));
  }
  // Sides alternate entrance width and depth: 0-1 entrance, 1-2 depth, ...
  const double sides[4] = {config.width, config.depth, config.width, config.depth};
  for (std::size_t k = 0; k < 4; ++k) {
    ids.push_back(graph.add_factor(RectDistanceFactor{corners[k], corners[(k + 1) % 4], sides[k],
                                                      config.distance_information}));
  }
  const double diagonal = std::hypot(config.width, config.depth);
  ids.push_back(graph.add_factor(
      RectDistanceFactor{corners[0], corners[2], diagonal, config.distance_information}));
  ids.push_back(graph.add_factor(
      RectDistanceFactor{corners[1], corners[3], diagonal, config.distance_information}));
  return ids;
}

LazyAddResult lazy_add(const SlotDetection& detection, const Pose2& predicted_pose,
                       VariableId pose, std::size_t frame, std::span<const Candidate> deferred,
                       ProvisionalStore& store, Graph& graph, const LazyConfig& config) {
  std::array<Point2, 4> world;
  for (std::size_t k = 0; k < 4; ++k) world[k] = transform_to_world(predicted_pose, detection.corners[k]);
  const Point2 c = centroid(world);

  auto& entries = store.mutable_entries();
  std::size_t best = entries.size();
  double best_dist = config.match_radius;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double dist = distance(c, centroid(entries[i].corners));
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }

  LazyAddResult result;
  Sighting sighting{frame, pose, detection, {deferred.begin(), deferred.end()}};
  if (best == entries.size()) {
    ProvisionalLandmark fresh;
    fresh.corners = world;
    fresh.first_seen_frame = frame;
    fresh.temp_id = store.next_temp_id();
    entries.push_back(std::move(fresh));
    result.created = true;
  } else {
    // Running mean of the sighted corners.
    auto& entry = entries[best];
    const double n = entry.sighting_count;
    for (std::size_t k = 0; k < 4; ++k) {
      entry.corners[k] = (1.0 / (n + 1.0)) * (n * entry.corners[k] + world[k]);
    }
  }
  auto& entry = entries[best];
  entry.sighting_count += 1;
  entry.sightings.push_back(std::move(sighting));
  result.sighting_count = entry.sighting_count;

  if (entry.sighting_count >= config.promotion_threshold) {
    PromotedSlot promoted;
    for (std::size_t k = 0; k < 4; ++k) promoted.corners[k] = graph.add_point(entry.corners[k]);
    promoted.rectangle_factors = add_rectangle_factors(graph, promoted.corners, config.rectangle);
    promoted.landmark = std::move(entry);
    entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(best));
    result.promoted = std::move(promoted);
  }
  return result;
}

// ID resolution --------------------------------------------------------------------------------

std::vector<ResolvedLabel> resolve_ids(std::span<const IdVote> votes,
                                       std::span<const std::string> temp_ids) {
  const std::size_t n = temp_ids.size();
  std::vector<std::map<int, std::size_t>> tallies(n);
  for (const IdVote& v : votes) {
    if (v.slot >= n) throw Error(ErrorCategory::InvalidArgument, "vote for unknown slot");
    ++tallies[v.slot][v.id];
  }

  std::vector<ResolvedLabel> labels(n);
  for (std::size_t s = 0; s < n; ++s) {
    labels[s].temp_id = temp_ids[s];
    std::size_t top = 0;
    std::size_t top_count = 0;
    int winner = 0;
    for (const auto& [id, count] : tallies[s]) {
      if (count > top) {
        top = count;
        winner = id;
        top_count = 1;
      } else if (count == top) {
        ++top_count;
      }
    }
    if (top > 0 && top_count == 1) {
      labels[s].id = winner;
      labels[s].votes = top;
    }
  }

  // Uniqueness: the strongest claim on an ID keeps it.
  std::map<int, std::size_t> owner;
  for (std::size_t s = 0; s < n; ++s) {
    if (!labels[s].id) continue;
    const auto [it, inserted] = owner.emplace(*labels[s].id, s);
    if (inserted) continue;
    std::size_t& holder = it->second;
    if (labels[s].votes > labels[holder].votes) {
      labels[holder].id.reset();
      holder = s;
    } else {
      labels[s].id.reset();
    }
  }
  return labels;
}

}  // namespace parkslam
