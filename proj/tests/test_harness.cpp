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

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "parkslam/config.hpp"
#include "parkslam/errors.hpp"
#include "parkslam/harness.hpp"
#include "parkslam/plot.hpp"
#include "parkslam/serialization.hpp"
#include "parkslam/simulator.hpp"

using namespace parkslam;

namespace {

ErrorCategory category_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.category();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCategory::InvalidArgument;
}

Dataset make_dataset(const NoiseModel& noise, std::uint64_t seed, bool clockwise = false) {
  const GroundTruthLot lot = generate_lot(default_lot_spec());
  TrajectorySpec ts;
  ts.clockwise = clockwise;
  return render_frames(lot, generate_trajectory(lot, ts), noise, {}, seed);
}

std::vector<Pose2> straight_line(int n, double offset) {
  std::vector<Pose2> out;
  for (int i = 0; i < n; ++i) out.emplace_back(0.1 * i, offset, 0.0);
  return out;
}

SemanticMap forty_slot_map() {
  const GroundTruthLot lot = generate_lot(default_lot_spec());
  SemanticMap map;
  for (const auto& s : lot.slots) map.slots.push_back({s.id, "", s.corners});
  map.slots[7].id.reset();
  map.slots[7].temp_id = "t4";
  for (const auto& t : lot.tags) map.tags.push_back({t.tag_id, t.position});
  map.reference_trace = {Pose2(0.1, 0.2, 0.3), Pose2(1.0 / 3.0, -2.0, 3.1)};
  return map;
}

}  // namespace

TEST(MapBuild, NoiselessIsExact) {
  const Dataset ds = make_dataset(NoiseModel::zero(), 7);
  const MapBuildResult r = map_build(ds, {}, true);
  const GroundTruthLot lot = generate_lot(ds.lot);
  EXPECT_LT(r.report.landmark_rmse, 1e-6);
  EXPECT_DOUBLE_EQ(r.report.id_accuracy, 1.0);
  EXPECT_LT(r.report.chi2_final, 1e-12);
  EXPECT_EQ(r.map.slots.size(), lot.slots.size());
  for (const auto& s : r.map.slots) {
    ASSERT_TRUE(s.id.has_value());
    const GroundTruthSlot* truth = lot.find_slot(*s.id);
    ASSERT_NE(truth, nullptr);
    for (int k = 0; k < 4; ++k) EXPECT_LT(distance(s.corners[k], truth->corners[k]), 1e-6);
  }
  for (const auto& t : r.map.tags) {
    EXPECT_LT(distance(t.position, lot.find_tag(t.tag_id)->position), 1e-6);
  }
  r.map.check();
}

TEST(MapBuild, RobustCorrectsInjectedSwapNaiveDoesNot) {
  NoiseModel noise;
  noise.injected_swaps = {{39, 38, 1}};
  const Dataset ds = make_dataset(noise, 11, true);
  const MapBuildResult robust = map_build(ds, {}, true);
  const MapBuildResult naive = map_build(ds, {}, false);
  EXPECT_DOUBLE_EQ(robust.report.id_accuracy, 1.0);
  EXPECT_LT(robust.report.landmark_rmse, 0.1);
  EXPECT_GE(naive.report.landmark_rmse, robust.report.landmark_rmse + 2.5);
}

TEST(MapBuild, RangeGateKeepsFarTagsOut) {
  const Dataset ds = make_dataset({}, 12);
  const MapBuildResult r = map_build(ds, {}, true);
  std::size_t tag_factors = 0;
  for (const auto& f : r.graph.factors()) {
    if (const auto* t = std::get_if<TagObservationFactor>(&f)) {
      EXPECT_LT(norm(t->measurement), 20.0);
      ++tag_factors;
    }
  }
  EXPECT_EQ(tag_factors, r.graph.count_factors("TagObservation"));
  EXPECT_GT(tag_factors, 0u);

  PipelineConfig near_only;
  near_only.tag_max_range = 8.0;
  const MapBuildResult n = map_build(ds, near_only, true);
  EXPECT_LT(n.graph.count_factors("TagObservation"), tag_factors);
  for (const auto& f : n.graph.factors()) {
    if (const auto* t = std::get_if<TagObservationFactor>(&f)) EXPECT_LT(norm(t->measurement), 8.0 + 0.5);
  }
}

TEST(MapBuild, Deterministic) {
  const Dataset a = make_dataset({}, 13);
  const Dataset b = make_dataset({}, 13);
  ASSERT_EQ(a, b);
  const MapBuildResult ra = map_build(a, {}, true);
  const MapBuildResult rb = map_build(b, {}, true);
  EXPECT_EQ(ra.map, rb.map);
  EXPECT_EQ(ra.report, rb.report);
}

TEST(Localize, ZeroNoiseReplayIsExact) {
  const Dataset mapping = make_dataset(NoiseModel::zero(), 7);
  const MapBuildResult m = map_build(mapping, {}, true);
  const GroundTruthLot lot = generate_lot(mapping.lot);
  TrajectorySpec ts;
  ts.kind = TrajectoryKind::Repeat;
  ts.reference = m.map.reference_trace;
  const Dataset replay = render_frames(lot, generate_trajectory(lot, ts), NoiseModel::zero(), {}, 8);
  const LocalizeResult r = localize(m.map, replay, {});
  ASSERT_EQ(r.trace.size(), replay.frames.size());
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    EXPECT_LT(distance(r.trace[i].translation(), replay.frames[i].ground_truth.translation()), 1e-6) << i;
  }
  EXPECT_FALSE(r.lost_track);
}

TEST(Localize, NoDetectionsMeansLostTrack) {
  const Dataset mapping = make_dataset(NoiseModel::zero(), 7);
  SemanticMap map = forty_slot_map();
  Dataset blind = mapping;
  for (auto& f : blind.frames) {
    f.slot_detections.clear();
    f.tag_detections.clear();
  }
  const LocalizeResult r = localize(map, blind, {});
  EXPECT_TRUE(r.lost_track);
  EXPECT_TRUE(r.report.lost_track);
  EXPECT_EQ(r.matched_frames, 0u);
}

TEST(Evaluate, IdenticalTraces) {
  const auto ref = straight_line(50, 0.0);
  const EvalReport r = evaluate(ref, ref, ref);
  EXPECT_DOUBLE_EQ(r.trace_lateral_std, 0.0);
  EXPECT_DOUBLE_EQ(r.trace_lateral_mean, 0.0);
  EXPECT_DOUBLE_EQ(r.trace_rmse, 0.0);
}

TEST(Evaluate, ConstantOffset) {
  const auto ref = straight_line(50, 0.0);
  const auto est = straight_line(50, 0.1);
  const LateralStats s = lateral_stats(est, ref);
  EXPECT_NEAR(s.mean, 0.1, 1e-12);
  EXPECT_NEAR(s.std, 0.0, 1e-12);
  EXPECT_NEAR(lateral_stats(straight_line(50, -0.1), ref).mean, -0.1, 1e-12);
}

TEST(Evaluate, RandomPerturbationStd) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 0.05);
  const auto ref = straight_line(10000, 0.0);
  std::vector<Pose2> est;
  for (const auto& p : ref) est.emplace_back(p.x(), p.y() + n(rng), 0.0);
  EXPECT_NEAR(lateral_stats(est, ref).std, 0.05, 0.002);
}

TEST(Evaluate, SignedOffsetOnCurve) {
  std::vector<Pose2> ref;
  for (int i = 0; i <= 100; ++i) {
    const double a = i * M_PI / 100.0;
    ref.emplace_back(10.0 * std::cos(a), 10.0 * std::sin(a), a + M_PI / 2);
  }
  // Counter-clockwise travel: the center lies to the left.
  EXPECT_NEAR(signed_lateral_offset({0.0, 9.0}, ref), 1.0, 2e-3);
  EXPECT_NEAR(signed_lateral_offset({0.0, 11.0}, ref), -1.0, 2e-3);
}

TEST(Evaluate, LengthMismatch) {
  const auto a = straight_line(10, 0.0);
  const auto b = straight_line(11, 0.0);
  EXPECT_EQ(category_of([&] { lateral_stats(a, b); }), ErrorCategory::LengthMismatch);
}

TEST(MapIo, RoundTripIsFieldExact) {
  const SemanticMap map = forty_slot_map();
  std::stringstream ss;
  write_map(ss, map);
  EXPECT_EQ(read_map(ss), map);

  const auto path = std::filesystem::temp_directory_path() / "parkslam_test_map.txt";
  export_map(map, path.string());
  EXPECT_EQ(import_map(path.string()), map);
  std::filesystem::remove(path);
}

TEST(MapIo, VersionMismatch) {
  std::stringstream ss;
  write_map(ss, forty_slot_map());
  std::string text = ss.str();
  text.replace(text.find("parkslam-map 1"), 14, "parkslam-map 9");
  std::istringstream in(text);
  EXPECT_EQ(category_of([&] { read_map(in); }), ErrorCategory::VersionMismatch);
}

TEST(MapIo, TruncatedFileNamesRecord) {
  std::stringstream ss;
  write_map(ss, forty_slot_map());
  const std::string text = ss.str();
  std::istringstream in(text.substr(0, text.size() / 2));
  try {
    read_map(in);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::ParseError);
    EXPECT_NE(std::string(e.what()).find("record"), std::string::npos) << e.what();
  }
}

TEST(MapIo, ExportRejectsInvalidMap) {
  SemanticMap map = forty_slot_map();
  map.slots[1].id = map.slots[0].id;
  EXPECT_EQ(category_of([&] { map.check(); }), ErrorCategory::InvalidArgument);
}

TEST(DatasetIo, RoundTrip) {
  NoiseModel noise;
  noise.injected_swaps = {{39, 38, 1}};
  const Dataset ds = make_dataset(noise, 19);
  std::stringstream ss;
  write_dataset(ss, ds);
  EXPECT_EQ(read_dataset(ss), ds);
}

TEST(TraceAndReportIo, RoundTrip) {
  const std::vector<Pose2> trace = {Pose2(0.1, 0.2, 0.3), Pose2(-1e-17, 5e300, -3.0)};
  std::stringstream ts;
  write_trace(ts, trace);
  EXPECT_EQ(read_trace(ts), trace);

  EvalReport r;
  r.landmark_rmse = 0.1;
  r.trace_lateral_mean = -1.0 / 3.0;
  r.frames = 12;
  r.lost_track = true;
  std::stringstream rs;
  write_report(rs, r);
  EXPECT_EQ(read_report(rs), r);
}

TEST(Plot, EmptyMapHasAxesAndLegend) {
  const std::string svg = render_svg({}, {});
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("class=\"axis\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"legend\""), std::string::npos);
  EXPECT_EQ(svg.find("class=\"slot\""), std::string::npos);
}

TEST(Plot, FortyLabelledSlots) {
  const SemanticMap map = forty_slot_map();
  const std::string svg = render_svg(map, {});
  const std::regex polygon("<polygon class=\"slot\" points=\"([^\"]*)\"");
  std::size_t polygons = 0;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), polygon); it != std::sregex_iterator(); ++it) {
    std::istringstream pts((*it)[1].str());
    std::string pair;
    int n = 0;
    while (pts >> pair) ++n;
    EXPECT_EQ(n, 4);
    ++polygons;
  }
  EXPECT_EQ(polygons, 40u);
  const std::regex label("<text class=\"slot-label\"[^>]*>([^<]*)</text>");
  std::set<std::string> labels;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), label); it != std::sregex_iterator(); ++it) {
    labels.insert((*it)[1].str());
  }
  std::set<std::string> expected;
  for (const auto& s : map.slots) expected.insert(s.label());
  EXPECT_EQ(labels, expected);
}

TEST(Plot, TracesGetDistinctStyles) {
  const std::vector<NamedTrace> traces = {{"reference", straight_line(10, 0.0)},
                                          {"run", straight_line(10, 0.3)}};
  const std::string svg = render_svg({}, traces);
  const std::regex style("<polyline class=\"trace\"[^>]*style=\"([^\"]*)\"");
  std::vector<std::string> styles;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), style); it != std::sregex_iterator(); ++it) {
    styles.push_back((*it)[1].str());
  }
  ASSERT_EQ(styles.size(), 2u);
  EXPECT_NE(styles[0], styles[1]);
  EXPECT_EQ(render_svg({}, traces), svg);
}

TEST(Config, ParsesOverridesAndRejectsUnknownKeys) {
  const PipelineConfig cfg = parse_config(R"({"gate_cap": 3.0, "promotion_threshold": 4,
      "odometry_sigma": [0.1, 0.2, 0.3], "tag_tolerance_deg": 10})");
  EXPECT_DOUBLE_EQ(cfg.gate_cap, 3.0);
  EXPECT_EQ(cfg.lazy.promotion_threshold, 4);
  EXPECT_DOUBLE_EQ(cfg.odometry_sigma(2), 0.3);
  EXPECT_NEAR(cfg.tag_tolerance, 10.0 * M_PI / 180.0, 1e-15);
  EXPECT_EQ(category_of([] { parse_config(R"({"gate_capp": 3})"); }), ErrorCategory::ParseError);
  EXPECT_EQ(category_of([] { parse_config("{"); }), ErrorCategory::ParseError);
  EXPECT_EQ(category_of([] { parse_config(R"({"gate_cap": -1})"); }), ErrorCategory::InvalidArgument);
  EXPECT_EQ(category_of([] { load_config("/nonexistent/parkslam.json"); }), ErrorCategory::IoFailure);
}
