// Copyright 2026 The mcqa-probe Authors.
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

#ifndef MCQA_PROBE_ERRORS_H_
#define MCQA_PROBE_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcqa_probe {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed line-delimited JSON. `line()` is 1-based; 0 when the input is
// not line oriented (e.g. a model file).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a data invariant (gold out of range,
// duplicate or mismatched ids, bad probabilities, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Invalid combination of options, e.g. multiclass loss with augmentation.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Filesystem failure while reading or writing.
class IoError : public Error {
 public:
  using Error::Error;
};

// Remote scoring failure: transport, HTTP status, or response contents.
class ScoringError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcqa_probe

#endif  // MCQA_PROBE_ERRORS_H_
