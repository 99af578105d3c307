// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "spk/diag.hpp"

namespace spk {

const char* errKindName(ErrKind k) {
  switch (k) {
    case ErrKind::Syntax: return "syntax error";
    case ErrKind::Type: return "type error";
    case ErrKind::UndeclaredIdentifier: return "undeclared identifier";
    case ErrKind::DuplicateDeclaration: return "duplicate declaration";
    case ErrKind::MissingHalt: return "missing halt";
    case ErrKind::MissingParameter: return "missing parameter";
    case ErrKind::DuplicateParameter: return "duplicate parameter";
    case ErrKind::MalformedParameter: return "malformed parameter";
    case ErrKind::NonPositiveCount: return "non-positive count";
    case ErrKind::ZeroLengthArray: return "zero-length array";
    case ErrKind::WidthOutOfRange: return "width out of range";
    case ErrKind::InputAssigned: return "input assigned";
    case ErrKind::BadHalt: return "bad halt";
    case ErrKind::BadOverride: return "bad time-bound override";
    case ErrKind::Usage: return "usage error";
    case ErrKind::Internal: return "internal error";
  }
  return "error";
}

std::string CompileError::format(ErrKind kind, const std::string& msg, SourceLoc loc) {
  std::string out = errKindName(kind);
  if (loc.valid()) {
    out += " at " + std::to_string(loc.line) + ":" + std::to_string(loc.col);
  }
  out += ": ";
  out += msg;
  return out;
}

}  // namespace spk
