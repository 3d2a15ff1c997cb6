// Copyright 2026 The kgwalk Authors.
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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgwalk {

// Base class for every error raised by the toolkit. The CLI maps
// ValidationError and its subclasses to exit status 1, IoError and
// AdapterError to exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that is well-formed at the byte level but violates a contract.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A malformed record in an input stream. Line numbers are 1-based.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class LookupError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Raised when a walk query has no completion in the graph. `hop` is the
// 1-based index of the first hop whose frontier is empty.
class NoPathError : public ValidationError {
 public:
  NoPathError(std::size_t hop, std::string relation)
      : ValidationError("no path: hop " + std::to_string(hop) +
                        " via relation '" + relation + "' has no successor"),
        hop_(hop),
        relation_(std::move(relation)) {}

  std::size_t hop() const noexcept { return hop_; }
  const std::string& relation() const noexcept { return relation_; }

 private:
  std::size_t hop_;
  std::string relation_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Failure of a model adapter while serving a batch. `partial` is set when
// some responses were received before the failure; `missing_ids` names
// the requests that never got a response.
class AdapterError : public Error {
 public:
  AdapterError(const std::string& what, bool partial,
               std::vector<std::string> missing_ids = {})
      : Error(what), partial_(partial), missing_ids_(std::move(missing_ids)) {}

  bool partial() const noexcept { return partial_; }
  const std::vector<std::string>& missing_ids() const noexcept {
    return missing_ids_;
  }

 private:
  bool partial_;
  std::vector<std::string> missing_ids_;
};

}  // namespace kgwalk
