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

#include <stdexcept>
#include <string>
#include <string_view>

namespace parkslam {

/// Machine-readable failure categories. The CLI prints the category name on
/// failure so scripts can branch on it.
enum class ErrorCategory {
  InvalidArgument,
  DegenerateCorner,
  SingularSystem,
  EmptyCandidates,
  DegenerateHomography,
  NoConvergence,
  SpecOverlap,
  InfeasiblePath,
  SolverFailure,
  LengthMismatch,
  VersionMismatch,
  ParseError,
  IoFailure,
};

std::string_view to_string(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message);

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace parkslam
