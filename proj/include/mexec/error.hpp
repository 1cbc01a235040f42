// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mexec {

// Position inside a source text, 1-based.
struct SourcePos {
  int line = 0;
  int column = 0;
};

enum class ErrorKind {
  Syntax,
  UndeclaredIdentifier,
  DuplicateFunction,
  DuplicateParameter,
  UnknownFunction,
  TypeError,
  UnsupportedPointerUse,
  ArityMismatch,
  MalformedPath,
  UnknownVariable,
  NonNumericExpression,
  InvalidBracket,
  InvalidConfig,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::UndeclaredIdentifier: return "UndeclaredIdentifier";
    case ErrorKind::DuplicateFunction: return "DuplicateFunction";
    case ErrorKind::DuplicateParameter: return "DuplicateParameter";
    case ErrorKind::UnknownFunction: return "UnknownFunction";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::UnsupportedPointerUse: return "UnsupportedPointerUse";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::MalformedPath: return "MalformedPath";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::NonNumericExpression: return "NonNumericExpression";
    case ErrorKind::InvalidBracket: return "InvalidBracket";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}
  Error(ErrorKind kind, SourcePos pos, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " at " +
                           std::to_string(pos.line) + ":" +
                           std::to_string(pos.column) + ": " + message),
        kind_(kind),
        pos_(pos) {}

  ErrorKind kind() const { return kind_; }
  SourcePos pos() const { return pos_; }

 private:
  ErrorKind kind_;
  SourcePos pos_{};
};

// Raised by the front end; carries the offending position and what the
// parser wanted to see there.
class SyntaxError : public Error {
 public:
  SyntaxError(SourcePos pos, std::string expected, std::string found)
      : Error(ErrorKind::Syntax, pos,
              "expected " + expected + " but found " + found),
        expected_(std::move(expected)),
        found_(std::move(found)) {}

  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::string expected_;
  std::string found_;
};

}  // namespace mexec
