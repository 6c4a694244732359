// Copyright 2026 The pastq Authors
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

#include "pastq/error.hpp"

namespace pastq {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidParameter: return "InvalidParameter";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kZeroProbabilityOutcome: return "ZeroProbabilityOutcome";
    case ErrorKind::kIncompleteMeasurement: return "IncompleteMeasurement";
    case ErrorKind::kDegeneratePastState: return "DegeneratePastState";
    case ErrorKind::kNonOrthogonalProjectors: return "NonOrthogonalProjectors";
    case ErrorKind::kStepTooLarge: return "StepTooLarge";
    case ErrorKind::kNonFiniteIncrement: return "NonFiniteIncrement";
    case ErrorKind::kFingerprintMismatch: return "FingerprintMismatch";
    case ErrorKind::kImpossibleObservation: return "ImpossibleObservation";
    case ErrorKind::kTooLargeForEnumeration: return "TooLargeForEnumeration";
    case ErrorKind::kTrajectoryFailures: return "TrajectoryFailures";
    case ErrorKind::kSchemaError: return "SchemaError";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace pastq
