// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spk/benchsrc.hpp"
#include "spk/brute.hpp"
#include "support/helpers.hpp"

using namespace spk;
using namespace spktest;

TEST_CASE("straight-line program becomes one seq leaf including HALT") {
  Compiled c = compile(
      "input a:bool; input b:bool; output y:bool;"
      "y := a & b; y := y | a; y := !y; halt(y);");
  const SbTree& t = c.tree;
  REQUIRE(t.nodes[0].children.size() == 1);
  const SbNode& leaf = t.node(t.nodes[0].children[0]);
  CHECK(leaf.kind == BlockKind::Seq);
  CHECK(leaf.tb == 4);  // 3 ops + HALT
  CHECK(t.rootTb() == 4);
}

TEST_CASE("makespan tree shape: two top-level loops, conds inside") {
  Compiled c = compile(makespanSource(3, 2), makespanParams(3, 2));
  const SbTree& t = c.tree;
  std::vector<const SbNode*> loops;
  for (std::int32_t ci : t.nodes[0].children) {
    if (t.node(ci).kind == BlockKind::Loop) loops.push_back(&t.node(ci));
  }
  REQUIRE(loops.size() == 2);
  CHECK(loops[0]->name == "F1");
  CHECK(loops[1]->name == "F2");
  for (const SbNode* loop : loops) {
    CHECK(loop->maxIter == 3);
    REQUIRE(loop->children.size() == 3);
    CHECK(t.node(loop->children[0]).kind == BlockKind::LoopInit);
    CHECK(t.node(loop->children[1]).kind == BlockKind::LoopBody);
    CHECK(t.node(loop->children[2]).kind == BlockKind::LoopStep);
    bool hasCond = false;
    for (std::int32_t bi : t.node(loop->children[1]).children) {
      hasCond |= t.node(bi).kind == BlockKind::Cond;
    }
    CHECK(hasCond);
  }
}

TEST_CASE("single loop with flat body gets b1/b2/b3") {
  Compiled c = compile("output y:bool; for i in 2 { y := !y; } halt(y);");
  const SbTree& t = c.tree;
  const SbNode* loop = nullptr;
  for (std::int32_t ci : t.nodes[0].children) {
    if (t.node(ci).kind == BlockKind::Loop) loop = &t.node(ci);
  }
  REQUIRE(loop);
  CHECK(loop->maxIter == 2);
  const SbNode& b1 = t.node(loop->children[0]);
  const SbNode& b2 = t.node(loop->children[1]);
  const SbNode& b3 = t.node(loop->children[2]);
  CHECK(loop->tb == b1.tb + 2 * (b2.tb + b3.tb));
  CHECK(loop->penulBase == b1.tb);
  CHECK(loop->penulPeriod == b2.tb + b3.tb);
}

TEST_CASE("time bounds satisfy their closed forms everywhere") {
  for (auto& c : {compile(makespanSource(4, 2), makespanParams(4, 2)),
                  compile(mstSource(4, 2), mstParams(4, 2))}) {
    const SbTree& t = c.tree;
    for (const SbNode& n : t.nodes) {
      switch (n.kind) {
        case BlockKind::Root:
        case BlockKind::LoopBody:
        case BlockKind::ThenBranch:
        case BlockKind::ElseBranch: {
          std::int64_t sum = 0;
          for (std::int32_t ci : n.children) sum += t.node(ci).tb;
          CHECK(n.tb == sum);
          break;
        }
        case BlockKind::Loop:
          CHECK(n.tb == t.node(n.children[0]).tb +
                            n.maxIter * (t.node(n.children[1]).tb + t.node(n.children[2]).tb));
          break;
        case BlockKind::Cond: {
          const SbNode& thenB = t.node(n.children[1]);
          const SbNode& elseB = t.node(n.children[2]);
          CHECK(thenB.tb == elseB.tb);  // padded to the max
          CHECK(thenB.distParent == elseB.distParent);
          CHECK(n.tb == t.node(n.children[0]).tb + thenB.tb);
          break;
        }
        case BlockKind::Flow:
          CHECK(n.tb == n.lineCount() + n.pad);
          break;
        default:
          CHECK(n.tb == n.lineCount());
          break;
      }
    }
  }
}

TEST_CASE("cond branch padding goes to the shorter branch's flow block") {
  Compiled c = compile(
      "input b:bool; output y:uint(3);"
      "if b { y := y + 1; y := y + 1; } else { y := 1; }"
      "halt(y);");
  const SbTree& t = c.tree;
  const SbNode* cond = nullptr;
  for (const SbNode& n : t.nodes) {
    if (n.kind == BlockKind::Cond) cond = &n;
  }
  REQUIRE(cond);
  const SbNode& thenB = t.node(cond->children[1]);
  const SbNode& elseB = t.node(cond->children[2]);
  CHECK(thenB.tb == elseB.tb);
  const SbNode& elseFlow = t.node(elseB.children.back());
  CHECK(elseFlow.kind == BlockKind::Flow);
  CHECK(elseFlow.pad > 0);
}

TEST_CASE("distParent and distCumul follow the execution-order rules") {
  Compiled c = compile(mstSource(3, 2), mstParams(3, 2));
  const SbTree& t = c.tree;
  for (const SbNode& n : t.nodes) {
    if (n.kind == BlockKind::Loop) {
      CHECK(t.node(n.children[0]).distParent == 0);           // b1
      CHECK(t.node(n.children[1]).distParent == 0);           // b2 (scheduled by penul)
      CHECK(t.node(n.children[2]).distParent ==
            t.node(n.children[1]).tb);                        // b3 after the body
    }
    if (n.kind == BlockKind::Cond) {
      CHECK(t.node(n.children[0]).distParent == 0);
      CHECK(t.node(n.children[1]).distParent == t.node(n.children[0]).tb);
      CHECK(t.node(n.children[2]).distParent == t.node(n.children[0]).tb);
    }
  }
  CHECK(t.nodes[0].distCumul == 0);
  // distCumul equals distParent plus the sum over non-root ancestors.
  for (const SbNode& n : t.nodes) {
    std::int64_t sum = n.distParent;
    for (std::int32_t p = n.parent; p > 0; p = t.node(p).parent) sum += t.node(p).distParent;
    CHECK(n.distCumul == sum);
  }
  // Non-decreasing along a left-to-right sibling walk.
  for (const SbNode& n : t.nodes) {
    std::int64_t prev = -1;
    for (std::int32_t ci : n.children) {
      CHECK(t.node(ci).distCumul >= prev);
      prev = t.node(ci).distCumul;
    }
  }
}

TEST_CASE("flat blocks partition the program lines") {
  Compiled c = compile(makespanSource(3, 2), makespanParams(3, 2));
  LineNo expect = 1;
  for (std::int32_t b : c.tree.flatBlocks) {
    const SbNode& n = c.tree.node(b);
    CHECK(n.lineLo == expect);
    expect = n.lineHi + 1;
  }
  CHECK(expect == static_cast<LineNo>(c.prog.lines.size() + 1));
  for (std::size_t i = 0; i < c.prog.lines.size(); ++i) {
    CHECK(c.prog.lines[i].block == c.tree.lineBlock[i]);
  }
}

TEST_CASE("custom time bound override validation") {
  Compiled c = compile(makespanSource(3, 2), makespanParams(3, 2));
  CHECK_NOTHROW(checkTbOverride(c.tree, c.tree.plainWorstBound));
  CHECK_NOTHROW(checkTbOverride(c.tree, c.tree.rootTb()));
  CHECK_THROWS_AS(checkTbOverride(c.tree, c.tree.plainWorstBound - 1), CompileError);
  CHECK_THROWS_AS(checkTbOverride(c.tree, 1), CompileError);
  CHECK(c.tree.plainWorstBound <= c.tree.rootTb());
}

// --- interval machinery ----------------------------------------------------

namespace {

// Hand-built tree: root > loop (penul 2 + (i-1)*10, M=3) > leaf(tb 4).
SbTree toyTree() {
  SbTree t;
  SbNode root;
  root.kind = BlockKind::Root;
  root.index = 0;
  t.nodes.push_back(root);
  SbNode loop;
  loop.kind = BlockKind::Loop;
  loop.index = 1;
  loop.parent = 0;
  loop.maxIter = 3;
  loop.penulBase = 2;
  loop.penulPeriod = 10;
  t.nodes.push_back(loop);
  SbNode leaf;
  leaf.kind = BlockKind::Seq;
  leaf.index = 2;
  leaf.parent = 1;
  leaf.lineLo = 1;
  leaf.lineHi = 4;
  leaf.tb = 4;
  leaf.distCumul = 3;
  leaf.loopAncestors = {1};
  t.nodes.push_back(leaf);
  return t;
}

}  // namespace

TEST_CASE("eti formula") {
  SbTree t = toyTree();
  // distPenul(a,2) = 2 + 10 = 12; start = 12 + 3 = 15.
  TimeInterval iv = eti(t, 2, {2});
  CHECK(iv.start == 15);
  CHECK(iv.end == 19);
  CHECK(!iv.contains(15));
  CHECK(iv.contains(16));
  CHECK(iv.contains(19));
  CHECK(!iv.contains(20));

  // No loop ancestors: start = distCumul.
  SbNode flat;
  flat.kind = BlockKind::Seq;
  flat.index = 3;
  flat.parent = 0;
  flat.lineLo = 5;
  flat.lineHi = 8;
  flat.tb = 4;
  flat.distCumul = 5;
  t.nodes.push_back(flat);
  TimeInterval single = eti(t, 3, {});
  CHECK(single.start == 5);
  CHECK(single.end == 9);

  CHECK_THROWS_AS(eti(t, 2, {}), CompileError);      // wrong arity
  CHECK_THROWS_AS(eti(t, 2, {4}), CompileError);     // out of bounds
  CHECK_THROWS_AS(eti(t, 2, {0}), CompileError);
}

TEST_CASE("etig enumerates mixed-base order") {
  Compiled c = compile(
      "output y:uint(4);"
      "for i in 2 { for j in 3 { y := y + 1; } }"
      "halt(y);");
  // Find the inner loop body's seq leaf (nested in two loops).
  std::int32_t target = -1;
  for (const SbNode& n : c.tree.nodes) {
    if (n.flat() && n.loopAncestors.size() == 2) {
      target = n.index;
      break;
    }
  }
  REQUIRE(target >= 0);
  Etig gen(c.tree, target);
  CHECK(gen.total() == 6);
  std::vector<IterTuple> seen;
  std::int64_t prevEnd = -1;
  while (auto iv = gen.next()) {
    seen.push_back(iv->iter);
    CHECK(iv->start >= prevEnd);  // pairwise disjoint, increasing
    prevEnd = iv->end;
    // Matches the closed-form eti().
    TimeInterval direct = eti(c.tree, target, iv->iter);
    CHECK(direct.start == iv->start);
    CHECK(direct.end == iv->end);
  }
  std::vector<IterTuple> expect = {{1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 2}, {2, 3}};
  CHECK(seen == expect);
}

TEST_CASE("etig with no loop ancestors yields exactly one interval") {
  Compiled c = compile("output y:bool; y := !y; halt(y);");
  Etig gen(c.tree, c.tree.flatBlocks[0]);
  CHECK(gen.total() == 1);
  auto iv = gen.next();
  REQUIRE(iv.has_value());
  CHECK(!gen.next().has_value());
}

TEST_CASE("etig total steps equal product of bounds times block tb") {
  Compiled c = compile(mstSource(3, 2), mstParams(3, 2));
  for (std::int32_t b : c.tree.flatBlocks) {
    Etig gen(c.tree, b);
    std::int64_t steps = 0, count = 0;
    while (auto iv = gen.next()) {
      steps += iv->length();
      ++count;
    }
    std::int64_t prod = 1;
    for (std::int64_t m : c.tree.iterBounds(b)) prod *= m;
    CHECK(count == prod);
    CHECK(steps == prod * c.tree.node(b).tb);
  }
}

TEST_CASE("uetig merges member streams in time order") {
  Compiled c = compile(makespanSource(4, 2), makespanParams(4, 2));
  const auto& flats = c.tree.flatBlocks;
  // Pick an interleaved set: loop-1 eval blocks and loop-2 step block etc.
  std::vector<std::int32_t> pick;
  for (std::size_t i = 0; i < flats.size(); i += 2) pick.push_back(flats[i]);
  auto got = collectUnion(c.tree, pick, c.tree.rootTb());
  auto want = bruteUnion(c.tree, pick, c.tree.rootTb());
  REQUIRE(got.size() == want.size());
  std::int64_t prevEnd = -1;
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].start == want[i].start);
    CHECK(got[i].end == want[i].end);
    CHECK(got[i].block == want[i].block);
    CHECK(got[i].start >= prevEnd);
    prevEnd = got[i].end;
  }
}

TEST_CASE("uetig of a single block equals etig; empty set yields nothing") {
  Compiled c = compile(mstSource(3, 2), mstParams(3, 2));
  std::int32_t b = c.tree.flatBlocks[3];
  auto uni = collectUnion(c.tree, {b}, c.tree.rootTb());
  auto each = enumerateEtis(c.tree, b);
  REQUIRE(uni.size() == each.size());
  for (std::size_t i = 0; i < uni.size(); ++i) {
    CHECK(uni[i].start == each[i].start);
    CHECK(uni[i].end == each[i].end);
  }
  Uetig empty(c.tree, {}, c.tree.rootTb());
  CHECK(!empty.next());
}

TEST_CASE("uetig equals the brute membership scan for every benchmark variable") {
  for (auto& c : {compile(makespanSource(3, 2), makespanParams(3, 2)),
                  compile(mstSource(3, 2), mstParams(3, 2))}) {
    // Group flat blocks by the bits they access, mirroring carry planning.
    std::vector<std::vector<std::int32_t>> accessors(c.prog.bits.size());
    for (std::size_t i = 0; i < c.prog.lines.size(); ++i) {
      for (BitId b : c.prog.readSets[i]) accessors[b].push_back(c.prog.lines[i].block);
      for (BitId b : c.prog.writeSets[i]) accessors[b].push_back(c.prog.lines[i].block);
    }
    for (std::size_t bit = 0; bit < accessors.size(); bit += 7) {
      if (accessors[bit].empty()) continue;
      auto got = collectUnion(c.tree, accessors[bit], c.tree.rootTb());
      auto want = bruteUnion(c.tree, accessors[bit], c.tree.rootTb());
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].start == want[i].start);
        CHECK(got[i].end == want[i].end);
      }
    }
  }
}

TEST_CASE("barrier trace stays inside ETIs and completes exactly at the bound") {
  for (auto& c : {compile(makespanSource(3, 2), makespanParams(3, 2)),
                  compile(mstSource(3, 2), mstParams(3, 2))}) {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 5; ++round) {
      std::vector<std::uint8_t> in;
      for (std::int64_t i = 0; i < c.prog.p(); ++i) in.push_back(rng() & 1);
      Trace tr = run(c.prog, c.tree, in, Semantics::Barrier);
      CHECK(tr.completionStep == c.tree.rootTb());
      CHECK(static_cast<std::int64_t>(tr.lines.size()) == c.tree.rootTb());
      for (std::int64_t t = 1; t <= tr.tb; ++t) {
        std::int32_t block = c.tree.blockOfLine(tr.lineAt(t));
        auto iv = etiContaining(c.tree, block, t);
        CHECK(iv.has_value());
      }
      Trace plain = run(c.prog, c.tree, in, Semantics::Plain);
      CHECK(plain.outputs == tr.outputs);
    }
  }
}
