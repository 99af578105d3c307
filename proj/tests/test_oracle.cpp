// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spk/benchsrc.hpp"
#include "spk/brute.hpp"
#include "spk/lpgen.hpp"
#include "spk/witness.hpp"
#include "support/gatecheck.hpp"
#include "support/helpers.hpp"

using namespace spk;
using namespace spktest;

TEST_CASE("not-program trace") {
  Compiled c = compile("input b:bool; output y:bool; y := !b; halt(y);");
  Trace tr = run(c.prog, c.tree, {0}, Semantics::Plain);
  CHECK(tr.outputs == std::vector<std::uint8_t>{1});
  CHECK(tr.lineAt(1) == 1);
  CHECK(c.prog.line(tr.lineAt(2)).op == Op::HALT);
  CHECK(tr.completionStep == 2);
}

TEST_CASE("makespan program matches the two-pass greedy reference") {
  for (std::int64_t m : {1, 2, 3, 4}) {
    Compiled c = compile(makespanSource(m, 2), makespanParams(m, 2));
    for (std::int64_t pattern = 0; pattern < (std::int64_t(1) << (2 * m)); ++pattern) {
      std::vector<std::int64_t> weights;
      for (std::int64_t j = 0; j < m; ++j) weights.push_back((pattern >> (2 * j)) & 3);
      Trace tr = run(c.prog, c.tree, packUints(weights, 2), Semantics::Plain);
      CHECK(uintOf(tr.outputs) == refMakespan(weights, 2));
    }
  }
  // The spec's toy instance: weights (1,2,3) on 3 machines -> makespan 3.
  Compiled c = compile(makespanSource(3, 2), makespanParams(3, 2));
  Trace tr = run(c.prog, c.tree, packUints({1, 2, 3}, 2), Semantics::Plain);
  CHECK(uintOf(tr.outputs) == 3);
  CHECK(refMakespan({1, 2, 3}, 2) == 3);
}

TEST_CASE("prim program equals brute-force MST on random instances") {
  std::mt19937_64 rng(3);
  for (std::int64_t n : {2, 3, 4}) {
    Compiled c = compile(mstSource(n, 2), mstParams(n, 2));
    for (int round = 0; round < 50; ++round) {
      std::vector<std::int64_t> edges;
      std::vector<std::vector<std::int64_t>> w(n, std::vector<std::int64_t>(n, 0));
      for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = i + 1; j < n; ++j) {
          // Positive weights below 2^W.
          std::int64_t wt = 1 + static_cast<std::int64_t>(rng() % 3);
          edges.push_back(wt);
          w[i][j] = w[j][i] = wt;
        }
      }
      Trace tr = run(c.prog, c.tree, packUints(edges, 2), Semantics::Plain);
      std::int64_t got = uintOf(tr.outputs);
      CHECK(got == bruteMst(w));
      CHECK(got == refPrim(w));
    }
  }
}

TEST_CASE("bruteMst basics") {
  CHECK(bruteMst({{0, 1, 2}, {1, 0, 3}, {2, 3, 0}}) == 3);
  CHECK(bruteMst({{0, 5}, {5, 0}}) == 5);
}

TEST_CASE("plain and barrier semantics agree on outputs; barrier is input-invariant") {
  std::mt19937_64 rng(5);
  Compiled c = compile(makespanSource(4, 2), makespanParams(4, 2));
  std::int64_t len = -1;
  for (int round = 0; round < 10; ++round) {
    std::vector<std::uint8_t> in;
    for (std::int64_t i = 0; i < c.prog.p(); ++i) in.push_back(rng() & 1);
    Trace plain = run(c.prog, c.tree, in, Semantics::Plain);
    Trace barrier = run(c.prog, c.tree, in, Semantics::Barrier);
    CHECK(plain.outputs == barrier.outputs);
    CHECK(barrier.completionStep == c.tree.rootTb());
    if (len < 0) len = barrier.completionStep;
    CHECK(barrier.completionStep == len);
  }
}

TEST_CASE("idle redistribution: barrier idle+halt steps cover the plain halt tail") {
  std::mt19937_64 rng(9);
  Compiled c = compile(makespanSource(3, 2), makespanParams(3, 2));
  for (int round = 0; round < 5; ++round) {
    std::vector<std::uint8_t> in;
    for (std::int64_t i = 0; i < c.prog.p(); ++i) in.push_back(rng() & 1);
    Trace plain = run(c.prog, c.tree, in, Semantics::Plain);
    Trace barrier = run(c.prog, c.tree, in, Semantics::Barrier);
    auto idleSteps = [&](const Trace& tr) {
      std::int64_t n = 0;
      for (std::int64_t t = 1; t <= tr.tb; ++t) {
        Op op = c.prog.line(tr.lineAt(t)).op;
        n += op == Op::IDLE || op == Op::HALT;
      }
      return n;
    };
    std::int64_t plainTail = plain.tb - plain.completionStep + 1;
    CHECK(idleSteps(barrier) >= plainTail);
  }
}

TEST_CASE("witness controllers sit on the diagonal for straight-line code") {
  Compiled c = compile("input b:bool; output y:bool; y := b; y := !y; halt(y);");
  BuildOptions opt;
  opt.mode = Mode::UO;
  LpModel m = build(c.prog, c.tree, opt);
  Trace tr = run(c.prog, c.tree, {1}, Semantics::Plain);
  Witness w = makeWitness(tr, m);
  for (std::int64_t v = m.ctrlBegin; v < m.ctrlEnd; ++v) {
    const auto& d = m.vars[v];
    bool expect = d.a == d.b || (d.b >= 3 && d.a == 3);  // diagonal, then HALT repeats
    CHECK(w.values[v] == (expect ? 1 : 0));
  }
}

TEST_CASE("HSB witness coverage on makespan m=2") {
  Compiled c = compile(makespanSource(2, 2), makespanParams(2, 2));
  BuildOptions opt;
  opt.mode = Mode::HSB;
  LpModel m = build(c.prog, c.tree, opt);
  for (int x = 0; x < 16; ++x) {
    Trace tr = run(c.prog, c.tree, bitsOf(x, 4), Semantics::Barrier);
    CHECK_NOTHROW(makeWitness(tr, m));  // every visited (l,t) has a controller
  }
}

TEST_CASE("pre-versions take the value at interval start") {
  Compiled c = compile(
      "input b:bool; output y:bool; local v:bool;"
      "v := b;"
      "for i in 2 { y := !y; }"
      "y := v;"
      "halt(y);");
  BuildOptions opt;
  opt.mode = Mode::HSB;
  LpModel m = build(c.prog, c.tree, opt);
  Trace tr = run(c.prog, c.tree, {1}, Semantics::Barrier);
  Witness w = makeWitness(tr, m);
  // All versions of v carry the stored value across the gap.
  for (std::size_t vi = 0; vi < m.vars.size(); ++vi) {
    const auto& d = m.vars[vi];
    if (d.kind == VarKind::BitVersion && m.bitNames[d.a] == "v_b0" && d.b > 2) {
      CHECK(w.values[vi] == 1);
    }
  }
}

TEST_CASE("gate soundness: boolean catalog (unit-size)") {
  GateAudit audit([](const std::string& msg) { FAIL(msg); });
  CHECK(audit.auditGate("true", 0, [](int, int) { return 1; }) == 2);
  CHECK(audit.auditGate("false", 0, [](int, int) { return 0; }) == 2);
  CHECK(audit.auditGate("a", 1, [](int a, int) { return a; }) == 4);
  CHECK(audit.auditGate("!a", 1, [](int a, int) { return !a; }) == 4);
  CHECK(audit.auditGate("a & b", 2, [](int a, int b) { return a & b; }) == 8);
  CHECK(audit.auditGate("a | b", 2, [](int a, int b) { return a | b; }) == 8);
  CHECK(audit.auditGate("a ^ b", 2, [](int a, int b) { return a ^ b; }) == 8);
}

TEST_CASE("gate soundness: array ops (unit-size)") {
  GateAudit audit([](const std::string& msg) { FAIL(msg); });
  CHECK(audit.auditLoad(2, 1) > 0);
  CHECK(audit.auditStore(2, 1) > 0);
}

TEST_CASE("check report JSON shape") {
  Compiled c = compile("input b:bool; output y:bool; y := !b; halt(y);");
  BuildOptions opt;
  opt.mode = Mode::UO;
  opt.inputMode = InputMode::Free;
  opt.inputValues = {0};
  LpModel m = build(c.prog, c.tree, opt);
  Trace tr = run(c.prog, c.tree, {0}, Semantics::Plain);
  Witness w = makeWitness(tr, m);
  CheckReport rep = checkFeasible(m, w);
  std::string js = rep.json();
  CHECK(js.find("\"feasible\":true") != std::string::npos);
  CHECK(js.find("\"violations\":[]") != std::string::npos);
  CHECK(js.find("\"objective\":0") != std::string::npos);
}
