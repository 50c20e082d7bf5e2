// Copyright 2026 The safedoe Authors
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

#ifndef SAFEDOE_ERRORS_HPP
#define SAFEDOE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace safedoe {

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  CholeskyFailure,
  NotFitted,
  IntegrationFailure,
  OptimizationFailure,
  DegreesOfFreedom,
  ConfigSchema,
  IncompatibleTraces,
  Io,
};

/// Exception carrying a machine-readable code plus a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::CholeskyFailure: return "cholesky_failure";
    case ErrorCode::NotFitted: return "not_fitted";
    case ErrorCode::IntegrationFailure: return "integration_failure";
    case ErrorCode::OptimizationFailure: return "optimization_failure";
    case ErrorCode::DegreesOfFreedom: return "degrees_of_freedom";
    case ErrorCode::ConfigSchema: return "config_schema";
    case ErrorCode::IncompatibleTraces: return "incompatible_traces";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace safedoe

#endif  // SAFEDOE_ERRORS_HPP
