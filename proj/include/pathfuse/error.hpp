// Copyright 2026 The PathFuse Authors
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

namespace pathfuse {

enum class ErrorKind {
  parse,
  validation,
  too_short,
  invalid_angle,
  argument,
  frame_mismatch,
  degenerate_path,
  degenerate_window,
  division_by_zero,
  schema,
  parameter,
  already_expanded,
  io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::too_short: return "too-short error";
    case ErrorKind::invalid_angle: return "invalid-angle error";
    case ErrorKind::argument: return "argument error";
    case ErrorKind::frame_mismatch: return "frame-mismatch error";
    case ErrorKind::degenerate_path: return "degenerate-path error";
    case ErrorKind::degenerate_window: return "degenerate-window error";
    case ErrorKind::division_by_zero: return "division-by-zero error";
    case ErrorKind::schema: return "schema error";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::already_expanded: return "already-expanded error";
    case ErrorKind::io: return "io error";
  }
  return "error";
}

/// Every failure raised by the library. `line()` is 1-based and 0 when the
/// error is not tied to a line of input.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::size_t line = 0)
      : std::runtime_error(compose(kind, message, line)),
        kind_(kind),
        line_(line) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string compose(ErrorKind kind, const std::string& message,
                             std::size_t line) {
    std::string out = to_string(kind);
    if (line > 0) out += " at line " + std::to_string(line);
    out += ": ";
    out += message;
    return out;
  }

  ErrorKind kind_;
  std::size_t line_;
};

}  // namespace pathfuse
