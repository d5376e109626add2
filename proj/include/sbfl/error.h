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

#ifndef SBFL_ERROR_H_
#define SBFL_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sbfl {

enum class ErrorCode {
  // spectrum
  kDuplicateId,
  kDanglingReference,
  kInvalidHierarchy,
  kUnknownElement,
  // formulas
  kParseError,
  kUnknownIdentifier,
  // ranking
  kNoSuchGranularity,
  kNotCoarser,
  // interactive
  kSessionConcluded,
  kEmptyLog,
  // elo
  kNonPositiveC,
  kUnknownItem,
  kSelfMatch,
  kTooFewItems,
  // ingestion
  kSchemaError,
  kVersionMismatch,
  kMalformedRecord,
  kMalformedDocument,
  // service
  kUnknownSession,
  // anything else the caller got wrong (bad flag value, unreadable file, ...)
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

// All engine failures are reported through this type; `code()` is stable and
// is what the service and CLI map to status and exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Formula syntax error. `offset` is the 1-based character position of the
// offending token (input length + 1 for an unexpected end of input).
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error(ErrorCode::kParseError,
              "offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace sbfl

#endif  // SBFL_ERROR_H_
