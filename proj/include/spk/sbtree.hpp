// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spk/asm.hpp"

namespace spk {

enum class BlockKind : std::uint8_t {
  Root,
  Seq,        // flat straight-line block (may contain the final HALT)
  Loop,       // composite: init/body/step
  LoopInit,   // b1, flat
  LoopBody,   // b2, composite
  LoopStep,   // b3, flat (increment + bound check + branch)
  Cond,       // composite: eval/then/else
  CondEval,   // flat, ends with BRIF
  ThenBranch, // composite, ends with a Flow child
  ElseBranch, // composite, ends with a Flow child
  Flow,       // flat idle-capacity block (single IDLE line)
};

const char* blockKindName(BlockKind k);

struct SbNode {
  BlockKind kind;
  std::int32_t index = -1;
  std::int32_t parent = -1;
  std::vector<std::int32_t> children;  // execution-time order
  std::string name;

  // Flat blocks only.
  LineNo lineLo = 0, lineHi = -1;
  bool flat() const { return lineHi >= lineLo && lineLo > 0; }
  std::int64_t lineCount() const { return flat() ? lineHi - lineLo + 1 : 0; }

  std::int64_t maxIter = 0;  // Loop only

  // Timing annotations.
  std::int64_t tb = 0;   // local time bound; Flow blocks include their pad
  std::int64_t pad = 0;  // Flow only: idle capacity beyond the single IDLE step
  std::int64_t distParent = 0;
  std::int64_t distCumul = 0;
  std::int64_t penulBase = 0, penulPeriod = 0;  // Loop: distPenul(i) = base + (i-1)*period

  // Loop-ancestor chain, outermost first. Loop init blocks are scheduled once
  // and exclude their own loop; body/step content includes it.
  std::vector<std::int32_t> loopAncestors;
};

struct SbTree {
  std::vector<SbNode> nodes;            // nodes[0] is the root
  std::vector<std::int32_t> flatBlocks; // leaf indices in line order
  std::vector<std::int32_t> lineBlock;  // per line (0-based): owning flat block
  std::int64_t plainWorstBound = 0;     // worst-case plain completion step

  std::int64_t rootTb() const { return nodes[0].tb; }
  const SbNode& node(std::int32_t i) const { return nodes[i]; }
  std::int32_t blockOfLine(LineNo l) const { return lineBlock[l - 1]; }
  std::int32_t findByName(const std::string& name) const;
  std::vector<std::int64_t> iterBounds(std::int32_t block) const;  // LA max iters
};

// Builds the SB-tree from a lowered program's region structure, computes TB
// and branch pads bottom-up, annotates time distances, and backfills each
// line's owning flat block id.
SbTree buildSbTree(AsmProgram& program);

// Validates a user-supplied UO time bound (must cover worst-case plain
// execution). Throws BadOverride otherwise.
void checkTbOverride(const SbTree& tree, std::int64_t tb);

std::string emitSbTreeText(const SbTree& tree);
std::string emitSbTreeJson(const SbTree& tree);

// True when the two blocks live on opposite branches of some conditional and
// can therefore never be active in the same execution (their ETIs may share
// time steps).
bool mutuallyExclusive(const SbTree& tree, std::int32_t a, std::int32_t b);

}  // namespace spk
