// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "spk/source.hpp"

namespace spk {

// Parses program text. Performs syntactic checks plus the structural
// validations that need no parameter values: duplicate declarations,
// undeclared identifiers, kind-level typing (bool vs uint vs array),
// input-as-lvalue rejection, exactly one final halt.
SourceProgram parseSource(std::string_view text);

// Parses `name = nonnegative-integer` lines; '#' starts a comment.
ParamMap parseParams(std::string_view text);

// Folds every count expression, array length and bit width to integers and
// completes type checking (width equality, halt argument list). Idempotent.
SourceProgram resolve(const SourceProgram& program, const ParamMap& params);

// Canonical text form; parseSource(prettyPrint(p)) round-trips resolved
// programs.
std::string prettyPrint(const SourceProgram& program);

}  // namespace spk
