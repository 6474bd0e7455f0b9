// Copyright 2026 The WMCG Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace wmcg {

enum class ErrorCode {
  kInvalidArgument,
  kNotInGroup,
  kDegeneratePivot,
  kIllConditioned,
  kUnsupportedDegree,
  kInternal,
  kDegenerateKernel,
  kLayerContractViolation,
  kIo,
  kConfig,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures surface as this exception; code() tells callers which
// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kNotInGroup: return "not-in-group";
    case ErrorCode::kDegeneratePivot: return "degenerate-pivot";
    case ErrorCode::kIllConditioned: return "ill-conditioned";
    case ErrorCode::kUnsupportedDegree: return "unsupported-degree";
    case ErrorCode::kInternal: return "internal-error";
    case ErrorCode::kDegenerateKernel: return "degenerate-kernel";
    case ErrorCode::kLayerContractViolation: return "layer-contract-violation";
    case ErrorCode::kIo: return "io-error";
    case ErrorCode::kConfig: return "config-error";
  }
  return "unknown";
}

}  // namespace wmcg
