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

#include <string>
#include <vector>

#include "parkslam/harness.hpp"

namespace parkslam {

struct NamedTrace {
  std::string name;
  std::vector<Pose2> poses;
};

/// SVG drawing of the map: labeled slot rectangles, tag markers and one
/// polyline per trace, each trace in its own style. Deterministic output.
std::string render_svg(const SemanticMap& map, const std::vector<NamedTrace>& traces);

/// Writes render_svg to `path`. Throws IoFailure.
void export_plot(const SemanticMap& map, const std::vector<NamedTrace>& traces,
                 const std::string& path);

}  // namespace parkslam
