// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "spk/benchsrc.hpp"
#include "support/helpers.hpp"

using namespace spk;
using namespace spktest;

namespace {

// Runs the program on packed inputs and returns the outputs as an integer
// (single-output programs).
std::int64_t evalUint(const Compiled& c, const std::vector<std::uint8_t>& input) {
  Trace tr = run(c.prog, c.tree, input, Semantics::Plain);
  return uintOf(tr.outputs);
}

}  // namespace

TEST_CASE("single boolean op lowers to one line") {
  Compiled c = compile("input a:bool; input b:bool; output y:bool; y := a & b; halt(y);");
  // One BAND plus the final HALT.
  CHECK(c.prog.lines.size() == 2);
  CHECK(c.prog.lines[0].op == Op::BAND);
}

TEST_CASE("two-bit adder expands to one half adder plus one full adder") {
  Compiled c = compile("input x:uint(2); input y:uint(2); output c:uint(2); c := x + y; halt(c);");
  CHECK(c.prog.lines.size() == 8);  // 7 boolean-op lines + HALT
  // Exhaustive: addition mod 4.
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) {
      std::vector<std::uint8_t> in = bitsOf(x, 2);
      auto yb = bitsOf(y, 2);
      in.insert(in.end(), yb.begin(), yb.end());
      CHECK(evalUint(c, in) == (x + y) % 4);
    }
  }
}

TEST_CASE("adders are exact for w <= 3, including in-place accumulation") {
  for (int w = 1; w <= 3; ++w) {
    std::string ws = std::to_string(w);
    Compiled c = compile("input x:uint(" + ws + "); input y:uint(" + ws + "); output z:uint(" +
                         ws + "); z := x; z := z + y; halt(z);");
    for (int x = 0; x < (1 << w); ++x) {
      for (int y = 0; y < (1 << w); ++y) {
        std::vector<std::uint8_t> in = bitsOf(x, w);
        auto yb = bitsOf(y, w);
        in.insert(in.end(), yb.begin(), yb.end());
        CHECK(evalUint(c, in) == ((x + y) & ((1 << w) - 1)));
      }
    }
  }
}

TEST_CASE("comparators are exact for w <= 3") {
  for (int w = 1; w <= 3; ++w) {
    std::string ws = std::to_string(w);
    for (std::string op : {"<", "<=", "=="}) {
      Compiled c = compile("input x:uint(" + ws + "); input y:uint(" + ws +
                           "); output b:bool; b := x " + op + " y; halt(b);");
      for (int x = 0; x < (1 << w); ++x) {
        for (int y = 0; y < (1 << w); ++y) {
          std::vector<std::uint8_t> in = bitsOf(x, w);
          auto yb = bitsOf(y, w);
          in.insert(in.end(), yb.begin(), yb.end());
          std::int64_t expect = op == "<" ? x < y : op == "<=" ? x <= y : x == y;
          CHECK(evalUint(c, in) == expect);
        }
      }
    }
  }
}

TEST_CASE("comparison against literals") {
  Compiled c = compile("input x:uint(3); output b:bool; b := x < 5; halt(b);");
  for (int x = 0; x < 8; ++x) {
    CHECK(evalUint(c, bitsOf(x, 3)) == (x < 5 ? 1 : 0));
  }
}

TEST_CASE("array load with a runtime index is exact (length <= 4, w <= 3)") {
  for (int len : {2, 3, 4}) {
    for (int w : {1, 3}) {
      Compiled c = compile("input a:array(uint(" + std::to_string(w) + "), " +
                               std::to_string(len) +
                               "); input i:uint(2); output y:uint(" + std::to_string(w) +
                               "); y := a[i]; halt(y);");
      int values = 1 << (len * w);
      for (int pattern = 0; pattern < values; ++pattern) {
        for (int idx = 0; idx < len; ++idx) {
          std::vector<std::uint8_t> in;
          for (int e = 0; e < len; ++e) {
            auto eb = bitsOf((pattern >> (e * w)) & ((1 << w) - 1), w);
            in.insert(in.end(), eb.begin(), eb.end());
          }
          auto ib = bitsOf(idx, 2);
          in.insert(in.end(), ib.begin(), ib.end());
          CHECK(evalUint(c, in) == ((pattern >> (idx * w)) & ((1 << w) - 1)));
        }
      }
    }
  }
}

TEST_CASE("array store with a runtime index is exact") {
  Compiled c = compile(
      "input i:uint(2); input v:uint(2); output y:uint(2); local a:array(uint(2), 3);"
      "a[0] := 1; a[1] := 2; a[2] := 3;"
      "a[i] := v;"
      "y := a[i];"
      "halt(y);");
  for (int idx = 0; idx < 3; ++idx) {
    for (int v = 0; v < 4; ++v) {
      std::vector<std::uint8_t> in = bitsOf(idx, 2);
      auto vb = bitsOf(v, 2);
      in.insert(in.end(), vb.begin(), vb.end());
      CHECK(evalUint(c, in) == v);
    }
  }
}

TEST_CASE("out-of-range runtime index is a hard interpreter error") {
  Compiled c = compile(
      "input i:uint(2); output y:bool; local a:array(bool, 2);"
      "a[0] := true; y := a[i]; halt(y);");
  CHECK_THROWS_AS(run(c.prog, c.tree, bits("11"), Semantics::Plain), CompileError);
}

TEST_CASE("successors") {
  Compiled c = compile(makespanSource(3, 2), makespanParams(3, 2));
  const AsmProgram& p = c.prog;
  for (const AsmLine& l : p.lines) {
    auto succ = successors(p, l.label);
    switch (l.op) {
      case Op::BRIF:
        CHECK(succ == std::vector<LineNo>{l.target, l.targetFalse});
        break;
      case Op::HALT:
        CHECK(succ == std::vector<LineNo>{l.label});
        break;
      case Op::IDLE:
        CHECK(succ == std::vector<LineNo>{l.label, l.target});
        break;
      default:
        CHECK(succ == std::vector<LineNo>{l.label + 1});
        break;
    }
    CHECK(!succ.empty());
  }
}

TEST_CASE("successor graph reaches HALT from line 1") {
  for (auto& c : {compile(makespanSource(3, 2), makespanParams(3, 2)),
                  compile(mstSource(3, 2), mstParams(3, 2))}) {
    const AsmProgram& p = c.prog;
    std::set<LineNo> seen{1};
    std::vector<LineNo> work{1};
    bool haltReached = false;
    while (!work.empty()) {
      LineNo l = work.back();
      work.pop_back();
      if (p.line(l).op == Op::HALT) haltReached = true;
      for (LineNo s : successors(p, l)) {
        if (seen.insert(s).second) work.push_back(s);
      }
    }
    CHECK(haltReached);
  }
}

TEST_CASE("io layout order") {
  Compiled c = compile(
      "input x:uint(2); input a:array(bool,3); output y:bool; y := a[0]; halt(y);");
  REQUIRE(c.prog.inputBits.size() == 5);
  CHECK(c.prog.bits[c.prog.inputBits[0]].display() == "x.b0");
  CHECK(c.prog.bits[c.prog.inputBits[1]].display() == "x.b1");
  CHECK(c.prog.bits[c.prog.inputBits[2]].display() == "a[0].b0");
  CHECK(c.prog.bits[c.prog.inputBits[3]].display() == "a[1].b0");
  CHECK(c.prog.bits[c.prog.inputBits[4]].display() == "a[2].b0");
}

TEST_CASE("makespan input width is m*W") {
  Compiled c = compile(makespanSource(5, 3), makespanParams(5, 3));
  CHECK(c.prog.p() == 15);
}

TEST_CASE("lowering is deterministic") {
  auto once = compile(mstSource(3, 2), mstParams(3, 2));
  auto twice = compile(mstSource(3, 2), mstParams(3, 2));
  CHECK(listing(once.prog) == listing(twice.prog));
}

TEST_CASE("read and write sets agree with operands") {
  Compiled c = compile(mstSource(3, 2), mstParams(3, 2));
  const AsmProgram& p = c.prog;
  std::set<BitId> inputs(p.inputBits.begin(), p.inputBits.end());
  for (std::size_t i = 0; i < p.lines.size(); ++i) {
    const AsmLine& l = p.lines[i];
    for (BitId b : p.writeSets[i]) CHECK(!inputs.count(b));
    if (l.op == Op::BAND || l.op == Op::BOR || l.op == Op::BXOR) {
      CHECK(p.readSets[i] == std::vector<BitId>{l.a, l.b});
      CHECK(p.writeSets[i] == std::vector<BitId>{l.dst});
    }
    if (l.op == Op::ASTORE) {
      CHECK(p.writeSets[i] == p.arrays[l.array].cellBits);
    }
  }
}
