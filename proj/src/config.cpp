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

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "parkslam/config.hpp"
#include "parkslam/errors.hpp"

namespace parkslam {
namespace {

using nlohmann::json;

void read(const json& j, const char* key, double& out) {
  if (j.contains(key)) out = j.at(key).get<double>();
}

void read(const json& j, const char* key, int& out) {
  if (j.contains(key)) out = j.at(key).get<int>();
}

const std::set<std::string> kKnownKeys = {
    "gate_radius",       "high_confidence",        "nn_floor",
    "gate_cap",          "promotion_threshold",    "match_radius",
    "slot_width",        "slot_depth",             "angle_sigma",
    "distance_sigma",    "max_iterations",         "initial_lambda",
    "lambda_up",         "lambda_down",            "convergence_tol",
    "wheelbase",         "position_noise_rate",    "heading_noise_rate",
    "compass_sigma",     "corner_sigma_confident", "corner_sigma_uncertain",
    "odometry_sigma",    "tag_side",               "tag_tolerance_deg",
    "tag_max_range",     "tag_pixel_sigma",        "tag_range_pixel_sigma", "tag_min_sigma",
    "optimize_interval", "window_size",            "lost_track_frames",
};

}  // namespace

void PipelineConfig::validate() const {
  lm.validate();
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw Error(ErrorCategory::InvalidArgument, std::string(name) + " must be positive");
  };
  positive(gate_cap, "gate_cap");
  positive(association.nn_floor, "nn_floor");
  positive(lazy.match_radius, "match_radius");
  positive(lazy.rectangle.width, "slot_width");
  positive(lazy.rectangle.depth, "slot_depth");
  positive(corner_sigma_confident, "corner_sigma_confident");
  positive(corner_sigma_uncertain, "corner_sigma_uncertain");
  positive(odometry_sigma.minCoeff(), "odometry_sigma");
  positive(tag_side, "tag_side");
  positive(tag_tolerance, "tag_tolerance");
  positive(tag_max_range, "tag_max_range");
  positive(tag_min_sigma, "tag_min_sigma");
  positive(tag_pixel_sigma, "tag_pixel_sigma");
  positive(tag_range_pixel_sigma, "tag_range_pixel_sigma");
  if (lazy.promotion_threshold < 1 || optimize_interval < 1 || window_size < 2 ||
      lost_track_frames < 1) {
    throw Error(ErrorCategory::InvalidArgument, "counts in the pipeline config must be positive");
  }
}

PipelineConfig parse_config(const std::string& json_text) {
  PipelineConfig cfg;
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw Error(ErrorCategory::ParseError, "config: top level must be an object");
    for (const auto& [key, value] : j.items()) {
      if (!kKnownKeys.contains(key)) {
        throw Error(ErrorCategory::ParseError, "config: unknown key '" + key + "'");
      }
    }
    read(j, "gate_radius", cfg.association.gate_radius);
    read(j, "high_confidence", cfg.association.high_confidence);
    read(j, "nn_floor", cfg.association.nn_floor);
    read(j, "gate_cap", cfg.gate_cap);
    read(j, "promotion_threshold", cfg.lazy.promotion_threshold);
    read(j, "match_radius", cfg.lazy.match_radius);
    read(j, "slot_width", cfg.lazy.rectangle.width);
    read(j, "slot_depth", cfg.lazy.rectangle.depth);
    if (j.contains("angle_sigma")) {
      const double s = j.at("angle_sigma").get<double>();
      cfg.lazy.rectangle.angle_information = 1.0 / (s * s);
    }
    if (j.contains("distance_sigma")) {
      const double s = j.at("distance_sigma").get<double>();
      cfg.lazy.rectangle.distance_information = 1.0 / (s * s);
    }
    read(j, "max_iterations", cfg.lm.max_iterations);
    read(j, "initial_lambda", cfg.lm.initial_lambda);
    read(j, "lambda_up", cfg.lm.lambda_up);
    read(j, "lambda_down", cfg.lm.lambda_down);
    read(j, "convergence_tol", cfg.lm.convergence_tol);
    read(j, "wheelbase", cfg.dead_reckoner.wheelbase);
    read(j, "position_noise_rate", cfg.dead_reckoner.position_noise_rate);
    read(j, "heading_noise_rate", cfg.dead_reckoner.heading_noise_rate);
    read(j, "compass_sigma", cfg.dead_reckoner.compass_sigma);
    read(j, "corner_sigma_confident", cfg.corner_sigma_confident);
    read(j, "corner_sigma_uncertain", cfg.corner_sigma_uncertain);
    if (j.contains("odometry_sigma")) {
      const auto v = j.at("odometry_sigma").get<std::vector<double>>();
      if (v.size() != 3) throw Error(ErrorCategory::ParseError, "config: odometry_sigma needs 3 values");
      cfg.odometry_sigma = {v[0], v[1], v[2]};
    }
    read(j, "tag_side", cfg.tag_side);
    if (j.contains("tag_tolerance_deg")) {
      cfg.tag_tolerance = j.at("tag_tolerance_deg").get<double>() * 3.14159265358979323846 / 180.0;
    }
    read(j, "tag_max_range", cfg.tag_max_range);
    read(j, "tag_pixel_sigma", cfg.tag_pixel_sigma);
    read(j, "tag_range_pixel_sigma", cfg.tag_range_pixel_sigma);
    read(j, "tag_min_sigma", cfg.tag_min_sigma);
    read(j, "optimize_interval", cfg.optimize_interval);
    read(j, "window_size", cfg.window_size);
    read(j, "lost_track_frames", cfg.lost_track_frames);
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::ParseError, std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::IoFailure, "cannot read config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace parkslam
