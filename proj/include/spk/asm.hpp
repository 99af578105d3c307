// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spk/source.hpp"

namespace spk {

using BitId = std::int32_t;
using LineNo = std::int32_t;  // 1-based dense labels

enum class Op : std::uint8_t {
  BCONST,  // dst := constVal
  BCOPY,   // dst := a
  BAND,    // dst := a & b
  BOR,     // dst := a | b
  BXOR,    // dst := a ^ b
  BNOT,    // dst := !a
  ALOAD,   // dstBits := array[idxBits]
  ASTORE,  // array[idxBits] := srcBits
  GOTO,    // jump to target
  BRIF,    // jump to target if condBit else targetFalse
  IDLE,    // barrier line: stay until the owning block's ETI ends, then jump to target
  HALT,    // final line; its only successor is itself
};

const char* opName(Op op);

enum class BitRole : std::uint8_t { Input, Output, Local, Temp, LoopCounter };

struct BitVar {
  std::string var;        // source variable name; temps are "_t<k>"
  std::int32_t elem = -1; // array element index, -1 for scalars
  std::int32_t bit = 0;   // bit index within the scalar, LSB = 0
  BitRole role = BitRole::Local;

  std::string display() const;  // "key[2].b1"
  std::string mangled() const;  // "key_2_b1" (LP-name charset)
};

struct ArrayInfo {
  std::string name;
  std::int64_t length = 0;
  std::int64_t elemWidth = 0;  // 1 for bool arrays
  std::vector<BitId> cellBits; // element-major, LSB-first
  BitId cellBit(std::int64_t e, std::int64_t k) const { return cellBits[e * elemWidth + k]; }
};

// Structural ownership recorded during lowering; the SB-tree is built from it.
enum class RegionKind : std::uint8_t {
  Root,
  Stmt,       // straight-line statement leaf (merged into seq blocks later)
  Loop,
  LoopInit,   // b1
  LoopBody,   // b2
  LoopStep,   // b3
  Cond,
  CondEval,
  ThenBranch,
  ElseBranch,
  Flow,       // trailing idle-capacity leaf
};

struct Region {
  RegionKind kind;
  std::int32_t parent = -1;
  std::vector<std::int32_t> children;
  LineNo lineLo = 0, lineHi = -1;  // inclusive range, leaves only
  std::int64_t maxIter = 0;        // Loop only
};

struct AsmLine {
  LineNo label = 0;
  Op op;
  BitId dst = -1;
  BitId a = -1, b = -1;
  int constVal = 0;
  std::int32_t array = -1;
  std::vector<BitId> idxBits;
  std::vector<BitId> dstBits;
  std::vector<BitId> srcBits;
  LineNo target = 0;       // GOTO/IDLE exit; BRIF true-target
  LineNo targetFalse = 0;  // BRIF false-target
  BitId condBit = -1;      // BRIF
  std::int32_t region = -1;
  std::int32_t block = -1;  // flat SB index, backfilled by the SB-tree builder
};

struct AsmProgram {
  std::vector<AsmLine> lines;  // lines[i].label == i+1
  std::vector<BitVar> bits;
  std::vector<ArrayInfo> arrays;
  std::vector<BitId> inputBits;   // deterministic io layout
  std::vector<BitId> outputBits;
  std::vector<Region> regions;    // regions[0] is the root
  std::vector<std::vector<BitId>> readSets;   // per line
  std::vector<std::vector<BitId>> writeSets;  // per line

  std::int64_t p() const { return static_cast<std::int64_t>(inputBits.size()); }
  std::int64_t q() const { return static_cast<std::int64_t>(outputBits.size()); }
  const AsmLine& line(LineNo l) const { return lines[l - 1]; }
};

// Lowers a resolved program to bit-level instructions. Total on valid input.
AsmProgram lower(const SourceProgram& program);

// Static successor set of a line (IDLE reports both staying and leaving).
std::vector<LineNo> successors(const AsmProgram& program, LineNo l);

// Debug listing: `l<label>: <op> <operands> ; block=<name>`.
// blockNames maps flat-block index -> display name; empty falls back to ids.
std::string listing(const AsmProgram& program, const std::vector<std::string>& blockNames = {});

// Internal-invariant audit (labels, targets, halt placement, access sets).
void validateAsm(const AsmProgram& program);

}  // namespace spk
