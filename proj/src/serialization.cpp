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

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "parkslam/errors.hpp"
#include "parkslam/serialization.hpp"

namespace parkslam {
namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string fmt_int(T v) {
  return std::to_string(v);
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename... Fields>
  void record(std::string_view name, const Fields&... fields) {
    out_ << name;
    ((out_ << ' ' << field(fields)), ...);
    out_ << '\n';
  }

 private:
  static std::string field(double v) { return fmt(v); }
  static std::string field(int v) { return fmt_int(v); }
  static std::string field(std::size_t v) { return fmt_int(v); }
  static std::string field(const std::string& v) { return v; }
  static std::string field(const char* v) { return v; }
  static std::string field(Point2 p) { return fmt(p.x) + ' ' + fmt(p.y); }
  static std::string field(const Pose2& p) {
    return fmt(p.x()) + ' ' + fmt(p.y()) + ' ' + fmt(p.theta());
  }

  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void header(std::string_view magic, int version) {
    const auto f = next("header");
    if (f.size() != 2 || f[0] != magic) {
      fail("header", "expected '" + std::string(magic) + " <version>'");
    }
    int v = 0;
    const auto res = std::from_chars(f[1].data(), f[1].data() + f[1].size(), v);
    if (res.ec != std::errc() || res.ptr != f[1].data() + f[1].size()) {
      fail("header", "unreadable version '" + f[1] + "'");
    }
    if (v != version) {
      throw Error(ErrorCategory::VersionMismatch,
                  std::string(magic) + " version " + std::to_string(v) + " is not supported (expected " +
                      std::to_string(version) + ")");
    }
  }

  /// Next record, which must be called `name` and carry `count` fields.
  std::vector<std::string> record(std::string_view name, std::size_t count) {
    auto f = next(name);
    if (f[0] != name) fail(name, "expected record '" + std::string(name) + "', found '" + f[0] + "'");
    if (f.size() != count + 1) {
      fail(name, "expected " + std::to_string(count) + " fields, found " + std::to_string(f.size() - 1));
    }
    f.erase(f.begin());
    return f;
  }

  /// Next record with a leading count and `per_item` fields per item.
  std::vector<std::string> counted(std::string_view name, std::size_t per_item, std::size_t& n) {
    auto f = next(name);
    if (f[0] != name) fail(name, "expected record '" + std::string(name) + "', found '" + f[0] + "'");
    if (f.size() < 2) fail(name, "missing count");
    n = to_size(f[1], name, "count");
    if (f.size() != 2 + n * per_item) fail(name, "field count does not match the declared count");
    f.erase(f.begin(), f.begin() + 2);
    return f;
  }

  void end() {
    const auto f = next("end");
    if (f.size() != 1 || f[0] != "end") fail("end", "expected 'end', found '" + f[0] + "'");
  }

  double to_double(const std::string& s, std::string_view record, std::string_view field) const {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail(record, "field '" + std::string(field) + "' is not a number: '" + s + "'");
    }
    return v;
  }

  long long to_int(const std::string& s, std::string_view record, std::string_view field) const {
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail(record, "field '" + std::string(field) + "' is not an integer: '" + s + "'");
    }
    return v;
  }

  std::size_t to_size(const std::string& s, std::string_view record, std::string_view field) const {
    unsigned long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail(record, "field '" + std::string(field) + "' is not a count: '" + s + "'");
    }
    return static_cast<std::size_t>(v);
  }

  [[noreturn]] void fail(std::string_view record, const std::string& what) const {
    throw Error(ErrorCategory::ParseError,
                "line " + std::to_string(line_) + ", record '" + std::string(record) + "': " + what);
  }

 private:
  std::vector<std::string> next(std::string_view expected) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      std::istringstream ss(line);
      std::vector<std::string> fields;
      for (std::string tok; ss >> tok;) fields.push_back(tok);
      if (!fields.empty()) return fields;
    }
    ++line_;
    fail(expected, "unexpected end of file");
  }

  std::istream& in_;
  std::size_t line_ = 0;
};

// Field cursor over one record.
class Fields {
 public:
  Fields(const Reader& r, std::vector<std::string> f, std::string_view record)
      : r_(r), f_(std::move(f)), record_(record) {}

  double real(std::string_view name) { return r_.to_double(f_.at(i_++), record_, name); }
  int integer(std::string_view name) { return static_cast<int>(r_.to_int(f_.at(i_++), record_, name)); }
  std::size_t size(std::string_view name) { return r_.to_size(f_.at(i_++), record_, name); }
  std::string text() { return f_.at(i_++); }
  Point2 point(std::string_view name) {
    const double x = real(name);
    return {x, real(name)};
  }
  Pose2 pose(std::string_view name) {
    const double x = real(name);
    const double y = real(name);
    return {x, y, real(name)};
  }

 private:
  const Reader& r_;
  std::vector<std::string> f_;
  std::string_view record_;
  std::size_t i_ = 0;
};

template <typename Fn>
void read_list(Reader& r, std::string_view count_name, std::string_view item_name,
               std::size_t fields, Fn&& fn) {
  const auto c = r.record(count_name, 1);
  const std::size_t n = r.to_size(c[0], count_name, "count");
  for (std::size_t i = 0; i < n; ++i) {
    Fields f(r, r.record(item_name, fields), item_name);
    fn(f);
  }
}

void write_poses(Writer& w, const std::vector<Pose2>& poses) {
  w.record("poses", poses.size());
  for (const Pose2& p : poses) w.record("pose", p);
}

std::vector<Pose2> read_poses(Reader& r) {
  std::vector<Pose2> out;
  read_list(r, "poses", "pose", 3, [&](Fields& f) { out.push_back(f.pose("pose")); });
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::IoFailure, "cannot write '" + path + "'");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::IoFailure, "cannot read '" + path + "'");
  return in;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorCategory::IoFailure, "write to '" + path + "' failed");
}

}  // namespace

// Map ------------------------------------------------------------------------------------

void write_map(std::ostream& out, const SemanticMap& map) {
  Writer w(out);
  w.record("parkslam-map", map.format_version);
  w.record("slots", map.slots.size());
  for (const MapSlot& s : map.slots) {
    w.record("slot", s.id ? std::to_string(*s.id) : std::string("-"),
             s.temp_id.empty() ? std::string("-") : s.temp_id, s.corners[0], s.corners[1],
             s.corners[2], s.corners[3]);
  }
  w.record("tags", map.tags.size());
  for (const MapTag& t : map.tags) w.record("tag", t.tag_id, t.position);
  write_poses(w, map.reference_trace);
  w.record("end");
}

SemanticMap read_map(std::istream& in) {
  Reader r(in);
  r.header("parkslam-map", SemanticMap::kFormatVersion);
  SemanticMap map;
  read_list(r, "slots", "slot", 10, [&](Fields& f) {
    MapSlot s;
    const std::string id = f.text();
    if (id != "-") {
      std::size_t pos = 0;
      try {
        s.id = std::stoi(id, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != id.size()) r.fail("slot", "field 'id' is not an integer: '" + id + "'");
    }
    const std::string temp = f.text();
    s.temp_id = temp == "-" ? std::string() : temp;
    for (auto& c : s.corners) c = f.point("corner");
    map.slots.push_back(s);
  });
  read_list(r, "tags", "tag", 3, [&](Fields& f) {
    MapTag t;
    t.tag_id = f.integer("tag_id");
    t.position = f.point("position");
    map.tags.push_back(t);
  });
  map.reference_trace = read_poses(r);
  r.end();
  return map;
}

// Dataset -----------------------------------------------------------------------------------

void write_dataset(std::ostream& out, const Dataset& ds) {
  Writer w(out);
  w.record("parkslam-dataset", 1);
  w.record("seed", fmt_int(ds.seed));
  const LotSpec& lot = ds.lot;
  w.record("lot", lot.rows, lot.slots_per_row, lot.slot_width, lot.slot_depth, lot.aisle_width);
  std::string ids;
  for (const int id : lot.id_assignment) ids += ' ' + std::to_string(id);
  out << "ids " << lot.id_assignment.size() << ids << '\n';
  w.record("placements", lot.tag_placements.size());
  for (const TagPlacement& t : lot.tag_placements) w.record("placement", t.tag_id, t.position, t.facing);
  std::string corridor;
  for (const Point2& p : lot.entrance_corridor) corridor += ' ' + fmt(p.x) + ' ' + fmt(p.y);
  out << "corridor " << lot.entrance_corridor.size() << corridor << '\n';
  const SensorConfig& s = ds.sensors;
  w.record("sensors", s.camera.f, s.camera.x0, s.camera.y0, s.image_width, s.image_height,
           s.tag_side, s.wheelbase, s.dt);
  w.record("start", ds.start_pose);
  w.record("frames", ds.frames.size());
  for (const ObservationFrame& f : ds.frames) {
    w.record("frame", f.timestamp, f.odom.speed, f.odom.steering, f.odom.compass, f.ground_truth,
             f.slot_detections.size(), f.tag_detections.size());
    for (const SlotDetection& d : f.slot_detections) {
      w.record("sd", d.corners[0], d.corners[1], d.corners[2], d.corners[3], d.id.digit(0),
               d.id.digit(1), d.id.confidence(0), d.id.confidence(1), d.truth_index);
    }
    for (const TagDetection& d : f.tag_detections) {
      w.record("td", d.tag_id, d.corners[0], d.corners[1], d.corners[2], d.corners[3], d.center_x);
    }
  }
  w.record("end");
}

Dataset read_dataset(std::istream& in) {
  Reader r(in);
  r.header("parkslam-dataset", 1);
  Dataset ds;
  {
    const auto f = r.record("seed", 1);
    std::uint64_t seed = 0;
    const auto res = std::from_chars(f[0].data(), f[0].data() + f[0].size(), seed);
    if (res.ec != std::errc() || res.ptr != f[0].data() + f[0].size()) {
      r.fail("seed", "field 'seed' is not an unsigned integer");
    }
    ds.seed = seed;
  }
  {
    Fields f(r, r.record("lot", 5), "lot");
    ds.lot.rows = f.integer("rows");
    ds.lot.slots_per_row = f.integer("slots_per_row");
    ds.lot.slot_width = f.real("slot_width");
    ds.lot.slot_depth = f.real("slot_depth");
    ds.lot.aisle_width = f.real("aisle_width");
  }
  {
    std::size_t n = 0;
    Fields f(r, r.counted("ids", 1, n), "ids");
    for (std::size_t i = 0; i < n; ++i) ds.lot.id_assignment.push_back(f.integer("id"));
  }
  read_list(r, "placements", "placement", 4, [&](Fields& f) {
    TagPlacement t;
    t.tag_id = f.integer("tag_id");
    t.position = f.point("position");
    t.facing = f.real("facing");
    ds.lot.tag_placements.push_back(t);
  });
  {
    std::size_t n = 0;
    Fields f(r, r.counted("corridor", 2, n), "corridor");
    for (std::size_t i = 0; i < n; ++i) ds.lot.entrance_corridor.push_back(f.point("point"));
  }
  {
    Fields f(r, r.record("sensors", 8), "sensors");
    SensorConfig& s = ds.sensors;
    s.camera.f = f.real("f");
    s.camera.x0 = f.real("x0");
    s.camera.y0 = f.real("y0");
    s.image_width = f.integer("image_width");
    s.image_height = f.integer("image_height");
    s.tag_side = f.real("tag_side");
    s.wheelbase = f.real("wheelbase");
    s.dt = f.real("dt");
  }
  {
    Fields f(r, r.record("start", 3), "start");
    ds.start_pose = f.pose("start");
  }
  const auto count = r.record("frames", 1);
  const std::size_t frames = r.to_size(count[0], "frames", "count");
  ds.frames.reserve(frames);
  for (std::size_t k = 0; k < frames; ++k) {
    Fields f(r, r.record("frame", 9), "frame");
    ObservationFrame frame;
    frame.timestamp = f.real("timestamp");
    frame.odom.speed = f.real("speed");
    frame.odom.steering = f.real("steering");
    frame.odom.compass = f.real("compass");
    frame.ground_truth = f.pose("ground_truth");
    const std::size_t slots = f.size("slot_count");
    const std::size_t tags = f.size("tag_count");
    for (std::size_t i = 0; i < slots; ++i) {
      Fields d(r, r.record("sd", 13), "sd");
      SlotDetection det;
      for (auto& c : det.corners) c = d.point("corner");
      const int d0 = d.integer("digit0");
      const int d1 = d.integer("digit1");
      const double c0 = d.real("confidence0");
      const double c1 = d.real("confidence1");
      try {
        det.id = SlotId({d0, d1}, {c0, c1});
      } catch (const Error& e) {
        r.fail("sd", e.what());
      }
      det.truth_index = d.size("truth_index");
      frame.slot_detections.push_back(det);
    }
    for (std::size_t i = 0; i < tags; ++i) {
      Fields d(r, r.record("td", 10), "td");
      TagDetection det;
      det.tag_id = d.integer("tag_id");
      for (auto& c : det.corners) c = d.point("corner");
      det.center_x = d.real("center_x");
      frame.tag_detections.push_back(det);
    }
    ds.frames.push_back(std::move(frame));
  }
  r.end();
  return ds;
}

// Trace and report ---------------------------------------------------------------------------

void write_trace(std::ostream& out, const std::vector<Pose2>& trace) {
  Writer w(out);
  w.record("parkslam-trace", 1);
  write_poses(w, trace);
  w.record("end");
}

std::vector<Pose2> read_trace(std::istream& in) {
  Reader r(in);
  r.header("parkslam-trace", 1);
  auto poses = read_poses(r);
  r.end();
  return poses;
}

namespace {

struct ReportField {
  const char* name;
  double EvalReport::*member;
};

constexpr ReportField kReportFields[] = {
    {"landmark_rmse", &EvalReport::landmark_rmse},
    {"tag_rmse", &EvalReport::tag_rmse},
    {"trace_lateral_mean", &EvalReport::trace_lateral_mean},
    {"trace_lateral_std", &EvalReport::trace_lateral_std},
    {"trace_rmse", &EvalReport::trace_rmse},
    {"id_accuracy", &EvalReport::id_accuracy},
    {"association_precision", &EvalReport::association_precision},
    {"chi2_final", &EvalReport::chi2_final},
};

}  // namespace

void write_report(std::ostream& out, const EvalReport& report) {
  Writer w(out);
  w.record("parkslam-report", EvalReport::kFormatVersion);
  for (const auto& field : kReportFields) w.record(field.name, report.*field.member);
  w.record("frames", report.frames);
  w.record("lost_track", report.lost_track ? 1 : 0);
  w.record("end");
}

EvalReport read_report(std::istream& in) {
  Reader r(in);
  r.header("parkslam-report", EvalReport::kFormatVersion);
  EvalReport report;
  for (const auto& field : kReportFields) {
    report.*field.member = r.to_double(r.record(field.name, 1)[0], field.name, "value");
  }
  report.frames = r.to_size(r.record("frames", 1)[0], "frames", "value");
  report.lost_track = r.to_int(r.record("lost_track", 1)[0], "lost_track", "value") != 0;
  r.end();
  return report;
}

// Files -----------------------------------------------------------------------------------------

void export_map(const SemanticMap& map, const std::string& path) {
  map.check();
  auto out = open_out(path);
  write_map(out, map);
  finish(out, path);
}

SemanticMap import_map(const std::string& path) {
  auto in = open_in(path);
  return read_map(in);
}

void export_dataset(const Dataset& dataset, const std::string& path) {
  auto out = open_out(path);
  write_dataset(out, dataset);
  finish(out, path);
}

Dataset import_dataset(const std::string& path) {
  auto in = open_in(path);
  return read_dataset(in);
}

void export_trace(const std::vector<Pose2>& trace, const std::string& path) {
  auto out = open_out(path);
  write_trace(out, trace);
  finish(out, path);
}

std::vector<Pose2> import_trace(const std::string& path) {
  auto in = open_in(path);
  return read_trace(in);
}

void export_report(const EvalReport& report, const std::string& path) {
  auto out = open_out(path);
  write_report(out, report);
  finish(out, path);
}

EvalReport import_report(const std::string& path) {
  auto in = open_in(path);
  return read_report(in);
}

}  // namespace parkslam
