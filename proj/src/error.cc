// Copyright 2026 The SBFL Engine Authors.
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

#include "sbfl/error.h"

namespace sbfl {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kDanglingReference: return "DanglingReference";
    case ErrorCode::kInvalidHierarchy: return "InvalidHierarchy";
    case ErrorCode::kUnknownElement: return "UnknownElement";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::kNoSuchGranularity: return "NoSuchGranularity";
    case ErrorCode::kNotCoarser: return "NotCoarser";
    case ErrorCode::kSessionConcluded: return "SessionConcluded";
    case ErrorCode::kEmptyLog: return "EmptyLog";
    case ErrorCode::kNonPositiveC: return "NonPositiveC";
    case ErrorCode::kUnknownItem: return "UnknownItem";
    case ErrorCode::kSelfMatch: return "SelfMatch";
    case ErrorCode::kTooFewItems: return "TooFewItems";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace sbfl
