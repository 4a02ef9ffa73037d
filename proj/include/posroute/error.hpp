// Copyright 2026 The posroute Authors
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

namespace posroute {

enum class ErrorCode {
  // Input errors.
  kInvalidModel,
  kDuplicateEdge,
  kVertexOutOfRange,
  kSelfLoop,
  kEmptyGraph,
  kNonpositiveS,
  kNegativeR,
  kInvalidBounds,
  kUnreachableGoal,
  kInvalidLambda,
  kLambdaNotAdmissible,
  kX0OutOfBounds,
  kGammaBelowOne,
  kInvalidArgument,
  kMissingBounds,
  kInfeasibleInput,
  // Numerical or internal failures.
  kCycleDetected,
  kNumericalFailure,
  kCertificateMismatch,
  kUnbounded,
  kMaxIterations,
  kAdmissibilityViolation,
  kTruncatedCost,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidModel: return "InvalidModel";
    case ErrorCode::kDuplicateEdge: return "DuplicateEdge";
    case ErrorCode::kVertexOutOfRange: return "VertexOutOfRange";
    case ErrorCode::kSelfLoop: return "SelfLoop";
    case ErrorCode::kEmptyGraph: return "EmptyGraph";
    case ErrorCode::kNonpositiveS: return "NonpositiveS";
    case ErrorCode::kNegativeR: return "NegativeR";
    case ErrorCode::kInvalidBounds: return "InvalidBounds";
    case ErrorCode::kUnreachableGoal: return "UnreachableGoal";
    case ErrorCode::kInvalidLambda: return "InvalidLambda";
    case ErrorCode::kLambdaNotAdmissible: return "LambdaNotAdmissible";
    case ErrorCode::kX0OutOfBounds: return "X0OutOfBounds";
    case ErrorCode::kGammaBelowOne: return "GammaBelowOne";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMissingBounds: return "MissingBounds";
    case ErrorCode::kInfeasibleInput: return "InfeasibleInput";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kCertificateMismatch: return "CertificateMismatch";
    case ErrorCode::kUnbounded: return "Unbounded";
    case ErrorCode::kMaxIterations: return "MaxIterations";
    case ErrorCode::kAdmissibilityViolation: return "AdmissibilityViolation";
    case ErrorCode::kTruncatedCost: return "TruncatedCost";
  }
  return "Unknown";
}

/// True for errors caused by bad user input (CLI exit code 2); everything
/// else is a numerical or internal failure (exit code 1).
constexpr bool is_input_error(ErrorCode code) {
  return code <= ErrorCode::kInfeasibleInput;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace posroute
