// include/wavefront/error.h

// Copyright 2026  The Wavefront Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef WAVEFRONT_ERROR_H_
#define WAVEFRONT_ERROR_H_

#include <stdexcept>
#include <string>

namespace wavefront {

// Error taxonomy. The CLI maps each family to a stable exit code:
// ConfigError -> 2, DataError (and subclasses) -> 3, NumericError -> 4.
// Plain std::invalid_argument signals a contract violation by the caller.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported file content. `field()` names the offending
/// header field (e.g. "sample_rate") when one applies.
class FormatError : public DataError {
 public:
  FormatError(std::string field, const std::string& what)
      : DataError(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wavefront

#endif  // WAVEFRONT_ERROR_H_
