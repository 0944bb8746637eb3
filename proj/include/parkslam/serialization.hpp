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

#include <iosfwd>
#include <string>
#include <vector>

#include "parkslam/harness.hpp"
#include "parkslam/simulator.hpp"

namespace parkslam {

// Line-oriented text formats. The first line names the format and its
// version; floating-point values are written in shortest round-trip form.
// Readers throw VersionMismatch for a foreign version and ParseError (with
// line number and field) for anything malformed or truncated.

void write_map(std::ostream& out, const SemanticMap& map);
SemanticMap read_map(std::istream& in);

void write_dataset(std::ostream& out, const Dataset& dataset);
Dataset read_dataset(std::istream& in);

void write_trace(std::ostream& out, const std::vector<Pose2>& trace);
std::vector<Pose2> read_trace(std::istream& in);

void write_report(std::ostream& out, const EvalReport& report);
EvalReport read_report(std::istream& in);

/// File wrappers; IoFailure when the file cannot be opened or written.
void export_map(const SemanticMap& map, const std::string& path);
SemanticMap import_map(const std::string& path);
void export_dataset(const Dataset& dataset, const std::string& path);
Dataset import_dataset(const std::string& path);
void export_trace(const std::vector<Pose2>& trace, const std::string& path);
std::vector<Pose2> import_trace(const std::string& path);
void export_report(const EvalReport& report, const std::string& path);
EvalReport import_report(const std::string& path);

}  // namespace parkslam
