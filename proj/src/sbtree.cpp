// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "spk/sbtree.hpp"

#include <json.hpp>

namespace spk {

const char* blockKindName(BlockKind k) {
  switch (k) {
    case BlockKind::Root: return "root";
    case BlockKind::Seq: return "seq";
    case BlockKind::Loop: return "loop";
    case BlockKind::LoopInit: return "loop-init";
    case BlockKind::LoopBody: return "loop-body";
    case BlockKind::LoopStep: return "loop-step";
    case BlockKind::Cond: return "cond";
    case BlockKind::CondEval: return "cond-eval";
    case BlockKind::ThenBranch: return "then-branch";
    case BlockKind::ElseBranch: return "else-branch";
    case BlockKind::Flow: return "flow";
  }
  return "?";
}

std::int32_t SbTree::findByName(const std::string& name) const {
  for (const auto& n : nodes) {
    if (n.name == name) return n.index;
  }
  return -1;
}

std::vector<std::int64_t> SbTree::iterBounds(std::int32_t block) const {
  std::vector<std::int64_t> bounds;
  for (std::int32_t la : nodes[block].loopAncestors) bounds.push_back(nodes[la].maxIter);
  return bounds;
}

namespace {

constexpr std::int64_t kTbCap = std::int64_t(1) << 50;

class Builder {
 public:
  explicit Builder(AsmProgram& program) : program_(program) {}

  SbTree run() {
    std::int32_t root = convert(0, -1);
    if (root != 0) internalError("root must be node 0");
    nameNodes(0, "");
    computeTb(0);
    tree_.plainWorstBound = plainWorst(0);
    annotate(0, 0, {});
    collectFlat();
    return std::move(tree_);
  }

 private:
  // Converts regions to nodes, merging consecutive straight-line statement
  // leaves of one parent into a single seq block.
  std::int32_t convert(std::int32_t regionIdx, std::int32_t parent) {
    const Region& r = program_.regions[regionIdx];
    std::int32_t idx = addNode(kindOf(r.kind), parent);
    SbNode& n = tree_.nodes[idx];
    n.maxIter = r.maxIter;
    if (r.children.empty()) {
      n.lineLo = r.lineLo;
      n.lineHi = r.lineHi;
      return idx;
    }
    std::size_t i = 0;
    const auto& kids = r.children;
    while (i < kids.size()) {
      const Region& child = program_.regions[kids[i]];
      if (child.kind == RegionKind::Stmt) {
        LineNo lo = child.lineLo;
        LineNo hi = child.lineHi;
        while (i + 1 < kids.size() && program_.regions[kids[i + 1]].kind == RegionKind::Stmt) {
          ++i;
          hi = program_.regions[kids[i]].lineHi;
        }
        std::int32_t leaf = addNode(BlockKind::Seq, idx);
        tree_.nodes[leaf].lineLo = lo;
        tree_.nodes[leaf].lineHi = hi;
        tree_.nodes[idx].children.push_back(leaf);
      } else {
        std::int32_t sub = convert(kids[i], idx);
        tree_.nodes[idx].children.push_back(sub);
      }
      ++i;
    }
    return idx;
  }

  static BlockKind kindOf(RegionKind k) {
    switch (k) {
      case RegionKind::Root: return BlockKind::Root;
      case RegionKind::Stmt: return BlockKind::Seq;
      case RegionKind::Loop: return BlockKind::Loop;
      case RegionKind::LoopInit: return BlockKind::LoopInit;
      case RegionKind::LoopBody: return BlockKind::LoopBody;
      case RegionKind::LoopStep: return BlockKind::LoopStep;
      case RegionKind::Cond: return BlockKind::Cond;
      case RegionKind::CondEval: return BlockKind::CondEval;
      case RegionKind::ThenBranch: return BlockKind::ThenBranch;
      case RegionKind::ElseBranch: return BlockKind::ElseBranch;
      case RegionKind::Flow: return BlockKind::Flow;
    }
    internalError("bad region kind");
  }

  std::int32_t addNode(BlockKind kind, std::int32_t parent) {
    SbNode n;
    n.kind = kind;
    n.index = static_cast<std::int32_t>(tree_.nodes.size());
    n.parent = parent;
    tree_.nodes.push_back(std::move(n));
    return tree_.nodes.back().index;
  }

  void nameNodes(std::int32_t idx, const std::string& parentName) {
    SbNode& n = tree_.nodes[idx];
    switch (n.kind) {
      case BlockKind::Root: n.name = "root"; break;
      case BlockKind::Loop: n.name = "F" + std::to_string(++loopCount_); break;
      case BlockKind::Cond: n.name = "I" + std::to_string(++condCount_); break;
      case BlockKind::Seq: n.name = "S" + std::to_string(++seqCount_); break;
      case BlockKind::LoopInit: n.name = parentName + ".init"; break;
      case BlockKind::LoopBody: n.name = parentName + ".body"; break;
      case BlockKind::LoopStep: n.name = parentName + ".step"; break;
      case BlockKind::CondEval: n.name = parentName + ".eval"; break;
      case BlockKind::ThenBranch: n.name = parentName + ".then"; break;
      case BlockKind::ElseBranch: n.name = parentName + ".else"; break;
      case BlockKind::Flow: n.name = parentName + ".flow"; break;
    }
    for (std::int32_t c : n.children) nameNodes(c, tree_.nodes[idx].name);
  }

  std::int64_t computeTb(std::int32_t idx) {
    SbNode& n = tree_.nodes[idx];
    switch (n.kind) {
      case BlockKind::Seq:
      case BlockKind::LoopInit:
      case BlockKind::LoopStep:
      case BlockKind::CondEval:
      case BlockKind::Flow:
        n.tb = n.lineCount();
        return n.tb;
      case BlockKind::Root:
      case BlockKind::LoopBody:
      case BlockKind::ThenBranch:
      case BlockKind::ElseBranch: {
        std::int64_t sum = 0;
        for (std::int32_t c : n.children) sum += computeTb(c);
        n.tb = sum;
        return n.tb;
      }
      case BlockKind::Loop: {
        std::int64_t b1 = computeTb(n.children[0]);
        std::int64_t b2 = computeTb(n.children[1]);
        std::int64_t b3 = computeTb(n.children[2]);
        __int128 total = static_cast<__int128>(n.maxIter) * (b2 + b3) + b1;
        if (total > kTbCap) {
          throw CompileError(ErrKind::WidthOutOfRange,
                             "time bound overflow in loop " + n.name + " (needs " +
                                 std::to_string(static_cast<long long>(total / kTbCap)) +
                                 "x the supported bound)");
        }
        n.tb = static_cast<std::int64_t>(total);
        return n.tb;
      }
      case BlockKind::Cond: {
        std::int64_t eval = computeTb(n.children[0]);
        std::int64_t thenTb = computeTb(n.children[1]);
        std::int64_t elseTb = computeTb(n.children[2]);
        std::int64_t branch = std::max(thenTb, elseTb);
        addPad(n.children[1], branch - thenTb);
        addPad(n.children[2], branch - elseTb);
        n.tb = eval + branch;
        return n.tb;
      }
    }
    internalError("bad block kind");
  }

  // Branch padding lands on the branch's trailing flow block.
  void addPad(std::int32_t branchIdx, std::int64_t pad) {
    if (pad == 0) return;
    SbNode& branch = tree_.nodes[branchIdx];
    SbNode& flow = tree_.nodes[branch.children.back()];
    if (flow.kind != BlockKind::Flow) internalError("branch without trailing flow block");
    flow.pad += pad;
    flow.tb += pad;
    branch.tb += pad;
  }

  // Worst-case plain (non-barrier) execution steps: idle pads don't idle,
  // conditionals take their longer side.
  std::int64_t plainWorst(std::int32_t idx) {
    const SbNode& n = tree_.nodes[idx];
    switch (n.kind) {
      case BlockKind::Flow:
        return n.lineCount();
      case BlockKind::Seq:
      case BlockKind::LoopInit:
      case BlockKind::LoopStep:
      case BlockKind::CondEval:
        return n.lineCount();
      case BlockKind::Root:
      case BlockKind::LoopBody:
      case BlockKind::ThenBranch:
      case BlockKind::ElseBranch: {
        std::int64_t sum = 0;
        for (std::int32_t c : n.children) sum += plainWorst(c);
        return sum;
      }
      case BlockKind::Loop:
        return plainWorst(n.children[0]) +
               n.maxIter * (plainWorst(n.children[1]) + plainWorst(n.children[2]));
      case BlockKind::Cond:
        return plainWorst(n.children[0]) +
               std::max(plainWorst(n.children[1]), plainWorst(n.children[2]));
    }
    internalError("bad block kind");
  }

  // distParent / distCumul / penul coefficients / loop-ancestor chains.
  // Loop bodies and steps are positioned by distPenul, so their distParent
  // does not re-count b1; then/else branches share the eval offset.
  void annotate(std::int32_t idx, std::int64_t ancSum, std::vector<std::int32_t> las) {
    SbNode& n = tree_.nodes[idx];
    n.loopAncestors = las;
    n.distCumul = ancSum + n.distParent;
    if (n.kind == BlockKind::Loop) {
      n.penulBase = tree_.nodes[n.children[0]].tb;
      n.penulPeriod = tree_.nodes[n.children[1]].tb + tree_.nodes[n.children[2]].tb;
    }
    std::int64_t childAnc = ancSum + (n.kind == BlockKind::Root ? 0 : n.distParent);
    switch (n.kind) {
      case BlockKind::Loop: {
        SbNode& b1 = tree_.nodes[n.children[0]];
        SbNode& b2 = tree_.nodes[n.children[1]];
        SbNode& b3 = tree_.nodes[n.children[2]];
        b1.distParent = 0;
        b2.distParent = 0;
        b3.distParent = b2.tb;
        auto withSelf = las;
        withSelf.push_back(idx);
        annotate(b1.index, childAnc, las);  // runs once, before the iterations
        annotate(b2.index, childAnc, withSelf);
        annotate(b3.index, childAnc, withSelf);
        return;
      }
      case BlockKind::Cond: {
        SbNode& eval = tree_.nodes[n.children[0]];
        SbNode& thenB = tree_.nodes[n.children[1]];
        SbNode& elseB = tree_.nodes[n.children[2]];
        eval.distParent = 0;
        thenB.distParent = eval.tb;
        elseB.distParent = eval.tb;
        for (std::int32_t c : n.children) annotate(c, childAnc, las);
        return;
      }
      default: {
        std::int64_t offset = 0;
        for (std::int32_t c : n.children) {
          tree_.nodes[c].distParent = offset;
          offset += tree_.nodes[c].tb;
          annotate(c, childAnc, las);
        }
        return;
      }
    }
  }

  void collectFlat() {
    tree_.lineBlock.assign(program_.lines.size(), -1);
    collectFlatRec(0);
    LineNo expect = 1;
    for (std::int32_t idx : tree_.flatBlocks) {
      const SbNode& n = tree_.nodes[idx];
      if (n.lineLo != expect) internalError("flat blocks do not partition the program");
      expect = n.lineHi + 1;
      for (LineNo l = n.lineLo; l <= n.lineHi; ++l) {
        tree_.lineBlock[l - 1] = idx;
        program_.lines[l - 1].block = idx;
      }
    }
    if (expect != static_cast<LineNo>(program_.lines.size() + 1)) {
      internalError("flat blocks do not cover the program");
    }
  }

  void collectFlatRec(std::int32_t idx) {
    const SbNode& n = tree_.nodes[idx];
    if (n.flat()) {
      tree_.flatBlocks.push_back(idx);
      return;
    }
    for (std::int32_t c : n.children) collectFlatRec(c);
  }

  AsmProgram& program_;
  SbTree tree_;
  int loopCount_ = 0, condCount_ = 0, seqCount_ = 0;
};

}  // namespace

SbTree buildSbTree(AsmProgram& program) { return Builder(program).run(); }

void checkTbOverride(const SbTree& tree, std::int64_t tb) {
  if (tb < tree.plainWorstBound) {
    throw CompileError(ErrKind::BadOverride,
                       "time bound " + std::to_string(tb) +
                           " is below the worst-case completion step " +
                           std::to_string(tree.plainWorstBound));
  }
}

namespace {

void emitText(const SbTree& tree, std::int32_t idx, int depth, std::string& out) {
  const SbNode& n = tree.nodes[idx];
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += n.name + " [" + blockKindName(n.kind) + "]";
  if (n.kind == BlockKind::Loop) {
    out += " M=" + std::to_string(n.maxIter) + " penul=(" + std::to_string(n.penulBase) + "," +
           std::to_string(n.penulPeriod) + ")";
  }
  out += " TB=" + std::to_string(n.tb);
  if (n.pad > 0) out += " pad=" + std::to_string(n.pad);
  out += " distParent=" + std::to_string(n.distParent);
  out += " distCumul=" + std::to_string(n.distCumul);
  if (n.flat()) {
    out += " lines=" + std::to_string(n.lineLo) + ".." + std::to_string(n.lineHi);
  }
  out += "\n";
  for (std::int32_t c : n.children) emitText(tree, c, depth + 1, out);
}

nlohmann::json nodeJson(const SbTree& tree, std::int32_t idx) {
  const SbNode& n = tree.nodes[idx];
  nlohmann::json j;
  j["id"] = n.name;
  j["kind"] = blockKindName(n.kind);
  j["tb"] = n.tb;
  j["distParent"] = n.distParent;
  j["distCumul"] = n.distCumul;
  if (n.kind == BlockKind::Loop) {
    j["maxIter"] = n.maxIter;
    j["distPenul"] = {n.penulBase, n.penulPeriod};
  }
  if (n.pad > 0) j["pad"] = n.pad;
  if (n.flat()) j["lines"] = {n.lineLo, n.lineHi};
  if (!n.children.empty()) {
    nlohmann::json kids = nlohmann::json::array();
    for (std::int32_t c : n.children) kids.push_back(nodeJson(tree, c));
    j["children"] = std::move(kids);
  }
  return j;
}

}  // namespace

std::string emitSbTreeText(const SbTree& tree) {
  std::string out;
  emitText(tree, 0, 0, out);
  return out;
}

std::string emitSbTreeJson(const SbTree& tree) { return nodeJson(tree, 0).dump(2); }

bool mutuallyExclusive(const SbTree& tree, std::int32_t a, std::int32_t b) {
  auto pathToRoot = [&](std::int32_t n) {
    std::vector<std::int32_t> path;
    for (; n >= 0; n = tree.node(n).parent) path.push_back(n);
    std::reverse(path.begin(), path.end());
    return path;
  };
  std::vector<std::int32_t> pa = pathToRoot(a), pb = pathToRoot(b);
  std::size_t i = 0;
  while (i < pa.size() && i < pb.size() && pa[i] == pb[i]) ++i;
  if (i == 0 || i >= pa.size() || i >= pb.size()) return false;
  BlockKind ka = tree.node(pa[i]).kind;
  BlockKind kb = tree.node(pb[i]).kind;
  return tree.node(pa[i - 1]).kind == BlockKind::Cond &&
         ((ka == BlockKind::ThenBranch && kb == BlockKind::ElseBranch) ||
          (ka == BlockKind::ElseBranch && kb == BlockKind::ThenBranch));
}

}  // namespace spk
