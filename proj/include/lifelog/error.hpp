/* Copyright (c) 2026 The Lifelog Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <stdexcept>
#include <string>

namespace lifelog {

// Machine-readable error kinds. The CLI prints the kind name as the error code.
enum class ErrorKind {
  missing_label,
  shape_mismatch,
  length_mismatch,
  out_of_range,
  empty_input,
  invalid_argument,
  non_finite,
  no_forward_state,
  schedule_overflow,
  parse_error,
  io_error,
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::missing_label: return "missing_label";
    case ErrorKind::shape_mismatch: return "shape_mismatch";
    case ErrorKind::length_mismatch: return "length_mismatch";
    case ErrorKind::out_of_range: return "out_of_range";
    case ErrorKind::empty_input: return "empty_input";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::no_forward_state: return "no_forward_state";
    case ErrorKind::schedule_overflow: return "schedule_overflow";
    case ErrorKind::parse_error: return "parse_error";
    case ErrorKind::io_error: return "io_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  const char* code() const noexcept { return error_kind_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace lifelog
