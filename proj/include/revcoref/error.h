// Copyright 2026 The revcoref Authors.
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

#ifndef REVCOREF_ERROR_H_
#define REVCOREF_ERROR_H_

#include <stdexcept>
#include <string>

namespace revcoref {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

// Malformed input record. Carries the 1-based line (or row) number and the
// offending field so callers can point at the exact spot in the file.
class IngestError : public Error {
 public:
  IngestError(const std::string &source, int line, const std::string &field,
              const std::string &detail)
      : Error(source + ":" + std::to_string(line) + ": field '" + field +
              "': " + detail),
        line_(line),
        field_(field) {}

  int line() const { return line_; }
  const std::string &field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

// Well-formed input that violates a structural invariant (dangling
// dependency heads, spans crossing sentences, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Mismatched tensor or vector widths.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or argument values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// A pipeline stage failed; wraps the underlying message with the stage name.
class StageError : public Error {
 public:
  StageError(const std::string &stage, const std::string &detail)
      : Error("stage '" + stage + "' failed: " + detail), stage_(stage) {}

  const std::string &stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace revcoref

#endif  // REVCOREF_ERROR_H_
