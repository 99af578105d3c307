// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spk/intervals.hpp"

namespace spk {

enum class Semantics { Plain, Barrier };

// Execution trace over steps 1..tb. snapshots[t] holds every bit's value at
// the beginning of step t (snapshots[1] = initial state, inputs loaded,
// everything else zero); snapshots[tb+1] is the final state. The line active
// at step t reads snapshots[t] and its writes land in snapshots[t+1].
struct Trace {
  std::vector<LineNo> lines;                     // lines[t-1], t = 1..tb
  std::vector<std::vector<std::uint8_t>> snapshots;  // index 0 unused; 1..tb+1
  std::vector<std::uint8_t> outputs;
  std::int64_t tb = 0;
  std::int64_t completionStep = 0;  // first step executing HALT

  std::uint8_t value(BitId bit, std::int64_t t) const { return snapshots[t][bit]; }
  LineNo lineAt(std::int64_t t) const { return lines[t - 1]; }
};

// Runs the program on `input` (io-layout order, one byte per bit).
//   Plain: standard sequential execution; IDLE falls through in one step;
//          HALT repeats until step tb. tb defaults to the tree's root bound
//          and may be overridden (UO custom bounds).
//   Barrier: IDLE holds the program counter until the owning block's current
//            ETI ends; completion lands exactly on the root time bound.
// Fails hard if HALT is not reached within the step budget.
Trace run(const AsmProgram& program, const SbTree& tree, const std::vector<std::uint8_t>& input,
          Semantics sem, std::int64_t tbOverride = 0);

}  // namespace spk
