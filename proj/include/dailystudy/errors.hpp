// Copyright 2026 The dailystudy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DAILYSTUDY_ERRORS_HPP
#define DAILYSTUDY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dailystudy {

enum class Err {
  IllegalTransition,
  OutOfWindow,
  WindowExpired,
  DuplicateDay,
  ConsentIncomplete,
  InvalidMeasurement,
  GatewayError,
  IndexOutOfRange,
  UnknownWorker,
  UnknownAssignment,
  AlreadyResolved,
  DuplicateHit,
  UnknownQualification,
  UnknownZone,
  ValidationError,
  StorageError,
  CorruptLog,
  BadConfig,
  EmptyMatrix,
};

const char* err_name(Err code);

// Error thrown by all service and domain operations. `code()` identifies
// the failure class so callers can branch without string matching.
class StudyError : public std::runtime_error {
 public:
  StudyError(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what),
        code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) {
  throw StudyError(code, what);
}

inline const char* err_name(Err code) {
  switch (code) {
    case Err::IllegalTransition: return "IllegalTransition";
    case Err::OutOfWindow: return "OutOfWindow";
    case Err::WindowExpired: return "WindowExpired";
    case Err::DuplicateDay: return "DuplicateDay";
    case Err::ConsentIncomplete: return "ConsentIncomplete";
    case Err::InvalidMeasurement: return "InvalidMeasurement";
    case Err::GatewayError: return "GatewayError";
    case Err::IndexOutOfRange: return "IndexOutOfRange";
    case Err::UnknownWorker: return "UnknownWorker";
    case Err::UnknownAssignment: return "UnknownAssignment";
    case Err::AlreadyResolved: return "AlreadyResolved";
    case Err::DuplicateHit: return "DuplicateHit";
    case Err::UnknownQualification: return "UnknownQualification";
    case Err::UnknownZone: return "UnknownZone";
    case Err::ValidationError: return "ValidationError";
    case Err::StorageError: return "StorageError";
    case Err::CorruptLog: return "CorruptLog";
    case Err::BadConfig: return "BadConfig";
    case Err::EmptyMatrix: return "EmptyMatrix";
  }
  return "UnknownError";
}

}  // namespace dailystudy

#endif  // DAILYSTUDY_ERRORS_HPP
