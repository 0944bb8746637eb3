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

#include "parkslam/errors.hpp"

namespace parkslam {

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::InvalidArgument: return "InvalidArgument";
    case ErrorCategory::DegenerateCorner: return "DegenerateCorner";
    case ErrorCategory::SingularSystem: return "SingularSystem";
    case ErrorCategory::EmptyCandidates: return "EmptyCandidates";
    case ErrorCategory::DegenerateHomography: return "DegenerateHomography";
    case ErrorCategory::NoConvergence: return "NoConvergence";
    case ErrorCategory::SpecOverlap: return "SpecOverlap";
    case ErrorCategory::InfeasiblePath: return "InfeasiblePath";
    case ErrorCategory::SolverFailure: return "SolverFailure";
    case ErrorCategory::LengthMismatch: return "LengthMismatch";
    case ErrorCategory::VersionMismatch: return "VersionMismatch";
    case ErrorCategory::ParseError: return "ParseError";
    case ErrorCategory::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCategory category, const std::string& message)
    : std::runtime_error(std::string(to_string(category)) + ": " + message),
      category_(category) {}

}  // namespace parkslam
