// Copyright 2026 The GraphMAD Toolkit Authors
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

namespace graphmad {

enum class ErrorCode {
  kLoad,
  kFormat,
  kWrite,
  kEstimation,
  kShape,
  kValidity,
  kConfig,
  kSolver,
  kPartition,
  kLocked,
};

// Stable machine-readable names, printed by the CLI as `error[E_...]`.
constexpr std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kLoad: return "E_LOAD";
    case ErrorCode::kFormat: return "E_FORMAT";
    case ErrorCode::kWrite: return "E_WRITE";
    case ErrorCode::kEstimation: return "E_ESTIMATION";
    case ErrorCode::kShape: return "E_SHAPE";
    case ErrorCode::kValidity: return "E_VALIDITY";
    case ErrorCode::kConfig: return "E_CONFIG";
    case ErrorCode::kSolver: return "E_SOLVER";
    case ErrorCode::kPartition: return "E_PARTITION";
    case ErrorCode::kLocked: return "E_LOCKED";
  }
  return "E_UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when the fusion solver cannot certify stationarity.
class SolverError : public Error {
 public:
  SolverError(const std::string& message, double residual)
      : Error(ErrorCode::kSolver, message), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace graphmad
