// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "spk/interp.hpp"

namespace spk {

namespace {

std::int64_t indexValue(const std::vector<std::uint8_t>& snap, const std::vector<BitId>& bits) {
  std::int64_t v = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    v |= static_cast<std::int64_t>(snap[bits[k]] & 1) << k;
  }
  return v;
}

}  // namespace

Trace run(const AsmProgram& program, const SbTree& tree, const std::vector<std::uint8_t>& input,
          Semantics sem, std::int64_t tbOverride) {
  if (static_cast<std::int64_t>(input.size()) != program.p()) {
    throw CompileError(ErrKind::Usage, "expected " + std::to_string(program.p()) +
                                           " input bits, got " + std::to_string(input.size()));
  }
  std::int64_t tb = tbOverride > 0 ? tbOverride : tree.rootTb();
  if (sem == Semantics::Barrier && tbOverride > 0 && tbOverride != tree.rootTb()) {
    throw CompileError(ErrKind::Usage, "barrier semantics uses the computed time bound");
  }

  Trace trace;
  trace.tb = tb;
  trace.lines.resize(tb);
  trace.snapshots.assign(tb + 2, {});
  trace.snapshots[1].assign(program.bits.size(), 0);
  for (std::size_t i = 0; i < input.size(); ++i) {
    trace.snapshots[1][program.inputBits[i]] = input[i] & 1;
  }

  LineNo pc = 1;
  for (std::int64_t t = 1; t <= tb; ++t) {
    trace.lines[t - 1] = pc;
    const AsmLine& l = program.line(pc);
    const auto& now = trace.snapshots[t];
    auto& next = trace.snapshots[t + 1];
    next = now;

    LineNo nextPc = pc + 1;
    switch (l.op) {
      case Op::BCONST:
        next[l.dst] = static_cast<std::uint8_t>(l.constVal);
        break;
      case Op::BCOPY:
        next[l.dst] = now[l.a];
        break;
      case Op::BAND:
        next[l.dst] = now[l.a] & now[l.b];
        break;
      case Op::BOR:
        next[l.dst] = now[l.a] | now[l.b];
        break;
      case Op::BXOR:
        next[l.dst] = now[l.a] ^ now[l.b];
        break;
      case Op::BNOT:
        next[l.dst] = !now[l.a];
        break;
      case Op::ALOAD: {
        const ArrayInfo& arr = program.arrays[l.array];
        std::int64_t idx = indexValue(now, l.idxBits);
        if (idx >= arr.length) {
          internalError("array index " + std::to_string(idx) + " out of range for '" + arr.name +
                        "' at line " + std::to_string(pc) + ", step " + std::to_string(t));
        }
        for (std::size_t k = 0; k < l.dstBits.size(); ++k) {
          next[l.dstBits[k]] = now[arr.cellBit(idx, static_cast<std::int64_t>(k))];
        }
        break;
      }
      case Op::ASTORE: {
        const ArrayInfo& arr = program.arrays[l.array];
        std::int64_t idx = indexValue(now, l.idxBits);
        if (idx >= arr.length) {
          internalError("array index " + std::to_string(idx) + " out of range for '" + arr.name +
                        "' at line " + std::to_string(pc) + ", step " + std::to_string(t));
        }
        for (std::size_t k = 0; k < l.srcBits.size(); ++k) {
          next[arr.cellBit(idx, static_cast<std::int64_t>(k))] = now[l.srcBits[k]];
        }
        break;
      }
      case Op::GOTO:
        nextPc = l.target;
        break;
      case Op::BRIF:
        nextPc = now[l.condBit] ? l.target : l.targetFalse;
        break;
      case Op::IDLE: {
        if (sem == Semantics::Plain) {
          nextPc = l.target;
          break;
        }
        auto iv = etiContaining(tree, l.block, t);
        if (!iv) {
          internalError("idle line " + std::to_string(pc) + " reached at step " +
                        std::to_string(t) + " outside every ETI of " + tree.node(l.block).name);
        }
        nextPc = t < iv->end ? pc : l.target;
        break;
      }
      case Op::HALT:
        if (trace.completionStep == 0) trace.completionStep = t;
        nextPc = pc;
        break;
    }
    pc = nextPc;
  }

  if (trace.completionStep == 0) {
    internalError("step budget " + std::to_string(tb) + " exceeded without reaching HALT");
  }
  const auto& fin = trace.snapshots[tb + 1];
  for (BitId b : program.outputBits) trace.outputs.push_back(fin[b]);
  return trace;
}

}  // namespace spk
