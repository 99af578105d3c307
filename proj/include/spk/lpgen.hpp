// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "spk/intervals.hpp"
#include "spk/lpmodel.hpp"

namespace spk {

enum class Mode { UO, HSB };

inline const char* modeName(Mode m) { return m == Mode::UO ? "uo" : "hsb"; }

enum class InputMode {
  None,   // structure-only emission, zero objective
  Free,   // inputs encoded via the objective: maximize sum of +-x_i(1)
  Fixed,  // inputs pinned by bounds x_i(1) = value; objective retained
};

struct BuildOptions {
  Mode mode = Mode::HSB;
  std::int64_t tbOverride = 0;  // UO only; 0 means the computed root bound
  InputMode inputMode = InputMode::None;
  std::vector<std::uint8_t> inputValues;
};

// Generates the full constraint system:
//   state (PC init + exactly-one-line-per-step), control flow (trigger and
//   upper-bound rows), memory updates (gated gate semantics, array
//   load/store with per-cell match variables), carry-forward chains with
//   inter-interval bridges, and non-input initialization equalities.
// UO unrolls every line over 1..TB and versions every bit over 1..TB+1;
// HSB restricts controllers, rows and versions to the blocks' ETIs with
// one constraint set per ETI for sequential blocks.
LpModel build(const AsmProgram& program, const SbTree& tree, const BuildOptions& opt);

}  // namespace spk
