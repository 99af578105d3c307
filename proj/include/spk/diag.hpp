// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace spk {

struct SourceLoc {
  int line = 0;
  int col = 0;
  bool valid() const { return line > 0; }
};

enum class ErrKind {
  Syntax,
  Type,
  UndeclaredIdentifier,
  DuplicateDeclaration,
  MissingHalt,
  MissingParameter,
  DuplicateParameter,
  MalformedParameter,
  NonPositiveCount,
  ZeroLengthArray,
  WidthOutOfRange,
  InputAssigned,
  BadHalt,
  BadOverride,
  Usage,
  Internal,
};

const char* errKindName(ErrKind k);

// Single exception type for the whole pipeline. Frontend errors carry a
// source location; internal invariant violations use ErrKind::Internal and
// are never silently repaired.
class CompileError : public std::runtime_error {
 public:
  CompileError(ErrKind kind, std::string msg, SourceLoc loc = {})
      : std::runtime_error(format(kind, msg, loc)), kind_(kind), loc_(loc) {}

  ErrKind kind() const { return kind_; }
  SourceLoc loc() const { return loc_; }

 private:
  static std::string format(ErrKind kind, const std::string& msg, SourceLoc loc);
  ErrKind kind_;
  SourceLoc loc_;
};

[[noreturn]] inline void internalError(const std::string& msg) {
  throw CompileError(ErrKind::Internal, msg);
}

}  // namespace spk
