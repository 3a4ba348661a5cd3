// Copyright 2026 The ghzdistill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

namespace ghzdistill {

enum class ErrorCode {
  ZeroVector,
  DegenerateQuadratic,
  NotGHZClass,
  IllConditioned,
  ParallelVectors,
  NonPositiveX,
  PreconditionViolated,
  InfeasibleBalance,
  InvariantViolation,
  InfeasibleX,
  NumericalUnderflow,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DegenerateQuadratic: return "DegenerateQuadratic";
    case ErrorCode::NotGHZClass: return "NotGHZClass";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::ParallelVectors: return "ParallelVectors";
    case ErrorCode::NonPositiveX: return "NonPositiveX";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::InfeasibleBalance: return "InfeasibleBalance";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::InfeasibleX: return "InfeasibleX";
    case ErrorCode::NumericalUnderflow: return "NumericalUnderflow";
  }
  return "Unknown";
}

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ghzdistill
