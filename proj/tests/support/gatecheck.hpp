// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "spk/lpgen.hpp"
#include "support/helpers.hpp"

namespace spktest {

// Exhaustive 0/1 soundness audit of the gated memory-update row systems:
// with the controller at 1 the rows must force exactly the instruction's
// semantics; with the controller at 0 every destination value must remain
// feasible. Returns the number of (operand, S) scenarios checked; throws
// doctest-friendly failures via the `fail` callback.
class GateAudit {
 public:
  using FailFn = std::function<void(const std::string&)>;
  explicit GateAudit(FailFn fail) : fail_(std::move(fail)) {}

  // Boolean gate ops, exhaustive over operands and S.
  long auditGate(const std::string& expr, int arity, std::function<int(int, int)> semantics) {
    Compiled c = compile(arity == 0
                             ? "output y:bool; y := " + expr + "; halt(y);"
                             : (arity == 1 ? "input a:bool; output y:bool; y := " + expr +
                                                 "; halt(y);"
                                           : "input a:bool; input b:bool; output y:bool; y := " +
                                                 expr + "; halt(y);"));
    spk::BuildOptions opt;
    opt.mode = spk::Mode::UO;
    spk::LpModel m = spk::build(c.prog, c.tree, opt);

    std::int64_t S = m.findController(1, 1);
    std::int64_t aV = arity >= 1 ? findVersion(c, m, "a_b0", 1) : -1;
    std::int64_t bV = arity >= 2 ? findVersion(c, m, "b_b0", 1) : -1;
    std::int64_t yV = findVersion(c, m, "y_b0", 2);
    auto rows = rowsTouching(m, famRange(m, "update"), S);
    if (rows.empty()) fail_("no update rows found for " + expr);

    long scenarios = 0;
    for (int s = 0; s <= 1; ++s) {
      for (int a = 0; a < (arity >= 1 ? 2 : 1); ++a) {
        for (int b = 0; b < (arity >= 2 ? 2 : 1); ++b) {
          std::map<std::int64_t, int> fixed{{S, s}};
          if (aV >= 0) fixed[aV] = a;
          if (bV >= 0) fixed[bV] = b;
          std::vector<int> feasible;
          for (int y = 0; y <= 1; ++y) {
            fixed[yV] = y;
            if (satisfies(m, rows, fixed)) feasible.push_back(y);
          }
          ++scenarios;
          if (s == 1) {
            int want = semantics(a, b);
            if (feasible.size() != 1 || feasible[0] != want) {
              fail_("gate " + expr + " with S=1 a=" + std::to_string(a) + " b=" +
                    std::to_string(b) + " is not forced to " + std::to_string(want));
            }
          } else if (feasible.size() != 2) {
            fail_("gate " + expr + " with S=0 constrains its destination");
          }
        }
      }
    }
    return scenarios;
  }

  // Array load: dst forced to cells[idx] iff S=1, for every cell pattern and
  // every in-range index; match variables forced to the indicator always.
  long auditLoad(int len, int width) {
    Compiled c = compile("input a:array(uint(" + std::to_string(width) + ")," +
                         std::to_string(len) + "); input i:uint(2); output y:uint(" +
                         std::to_string(width) + "); y := a[i]; halt(y);");
    spk::BuildOptions opt;
    opt.mode = spk::Mode::UO;
    spk::LpModel m = spk::build(c.prog, c.tree, opt);
    std::int64_t S = m.findController(1, 1);
    auto rows = rowsTouching(m, famRange(m, "update"), S);
    auto matchRows = matchRowsAt(m, 1);
    rows.insert(rows.end(), matchRows.begin(), matchRows.end());

    std::vector<std::int64_t> idxV = {findVersion(c, m, "i_b0", 1), findVersion(c, m, "i_b1", 1)};
    std::vector<std::int64_t> cellV, yV;
    for (int e = 0; e < len; ++e) {
      for (int k = 0; k < width; ++k) {
        cellV.push_back(
            findVersion(c, m, "a_" + std::to_string(e) + "_b" + std::to_string(k), 1));
      }
    }
    for (int k = 0; k < width; ++k) yV.push_back(findVersion(c, m, "y_b" + std::to_string(k), 2));
    std::vector<std::int64_t> muV = matchVarsAt(m, 1);

    long scenarios = 0;
    for (int s = 0; s <= 1; ++s) {
      for (int pattern = 0; pattern < (1 << (len * width)); ++pattern) {
        for (int idx = 0; idx < len; ++idx) {
          std::map<std::int64_t, int> fixed{{S, s}};
          for (int k = 0; k < 2; ++k) fixed[idxV[k]] = (idx >> k) & 1;
          for (int e = 0; e < len; ++e) {
            for (int k = 0; k < width; ++k) {
              fixed[cellV[e * width + k]] = (pattern >> (e * width + k)) & 1;
            }
          }
          // Enumerate (mu, y) completions; project the feasible set onto y.
          std::vector<int> feasibleY;
          bool muForced = true;
          for (int y = 0; y < (1 << width); ++y) {
            bool anyMu = false;
            for (int muPat = 0; muPat < (1 << muV.size()); ++muPat) {
              auto trial = fixed;
              for (int k = 0; k < width; ++k) trial[yV[k]] = (y >> k) & 1;
              for (std::size_t g = 0; g < muV.size(); ++g) trial[muV[g]] = (muPat >> g) & 1;
              if (satisfies(m, rows, trial)) {
                anyMu = true;
                // In every feasible completion the match vars must equal the
                // index indicator.
                for (std::size_t g = 0; g < muV.size(); ++g) {
                  int want = m.vars[muV[g]].b == idx ? 1 : 0;
                  if (((muPat >> g) & 1) != want) muForced = false;
                }
              }
            }
            if (anyMu) feasibleY.push_back(y);
          }
          ++scenarios;
          if (!muForced) fail_("match variables not forced to the index indicator");
          int want = (pattern >> (idx * width)) & ((1 << width) - 1);
          if (s == 1) {
            if (feasibleY.size() != 1 || feasibleY[0] != want) {
              fail_("array load not forced with S=1 (len=" + std::to_string(len) + ")");
            }
          } else if (static_cast<int>(feasibleY.size()) != (1 << width)) {
            fail_("array load constrains its destination with S=0");
          }
        }
      }
    }
    return scenarios;
  }

  // Array store: next-step cells forced to the updated pattern iff S=1.
  long auditStore(int len, int width) {
    Compiled c = compile("input i:uint(2); input v:uint(" + std::to_string(width) +
                         "); output y:bool; local a:array(uint(" + std::to_string(width) + ")," +
                         std::to_string(len) + "); a[i] := v; halt(y);");
    spk::BuildOptions opt;
    opt.mode = spk::Mode::UO;
    spk::LpModel m = spk::build(c.prog, c.tree, opt);
    std::int64_t S = m.findController(1, 1);
    auto rows = rowsTouching(m, famRange(m, "update"), S);
    auto matchRows = matchRowsAt(m, 1);
    rows.insert(rows.end(), matchRows.begin(), matchRows.end());

    std::vector<std::int64_t> idxV = {findVersion(c, m, "i_b0", 1), findVersion(c, m, "i_b1", 1)};
    std::vector<std::int64_t> srcV, cellNow, cellNext;
    for (int k = 0; k < width; ++k) srcV.push_back(findVersion(c, m, "v_b" + std::to_string(k), 1));
    for (int e = 0; e < len; ++e) {
      for (int k = 0; k < width; ++k) {
        std::string name = "a_" + std::to_string(e) + "_b" + std::to_string(k);
        cellNow.push_back(findVersion(c, m, name, 1));
        cellNext.push_back(findVersion(c, m, name, 2));
      }
    }
    std::vector<std::int64_t> muV = matchVarsAt(m, 1);

    long scenarios = 0;
    int cellsBits = len * width;
    for (int s = 0; s <= 1; ++s) {
      for (int pattern = 0; pattern < (1 << cellsBits); ++pattern) {
        for (int src = 0; src < (1 << width); ++src) {
          for (int idx = 0; idx < len; ++idx) {
            std::map<std::int64_t, int> fixed{{S, s}};
            for (int k = 0; k < 2; ++k) fixed[idxV[k]] = (idx >> k) & 1;
            for (int k = 0; k < width; ++k) fixed[srcV[k]] = (src >> k) & 1;
            for (int q = 0; q < cellsBits; ++q) fixed[cellNow[q]] = (pattern >> q) & 1;
            std::vector<int> feasibleNext;
            for (int next = 0; next < (1 << cellsBits); ++next) {
              bool any = false;
              for (int muPat = 0; muPat < (1 << muV.size()) && !any; ++muPat) {
                auto trial = fixed;
                for (int q = 0; q < cellsBits; ++q) trial[cellNext[q]] = (next >> q) & 1;
                for (std::size_t g = 0; g < muV.size(); ++g) trial[muV[g]] = (muPat >> g) & 1;
                any = satisfies(m, rows, trial);
              }
              if (any) feasibleNext.push_back(next);
            }
            ++scenarios;
            int want = pattern;
            int mask = ((1 << width) - 1) << (idx * width);
            want = (want & ~mask) | (src << (idx * width));
            if (s == 1) {
              if (feasibleNext.size() != 1 || feasibleNext[0] != want) {
                fail_("array store not forced with S=1");
              }
            } else if (static_cast<int>(feasibleNext.size()) != (1 << cellsBits)) {
              fail_("array store constrains cells with S=0");
            }
          }
        }
      }
    }
    return scenarios;
  }

 private:
  std::pair<std::int64_t, std::int64_t> famRange(const spk::LpModel& m, const std::string& name) {
    std::int64_t prev = 0;
    for (const auto& [fam, upTo] : m.familyRows) {
      if (fam == name) return {prev, upTo};
      prev = upTo;
    }
    fail_("family not found: " + name);
    return {0, 0};
  }

  // Rows in [range) that reference the given variable.
  std::vector<std::int64_t> rowsTouching(const spk::LpModel& m,
                                         std::pair<std::int64_t, std::int64_t> range,
                                         std::int64_t var) {
    std::vector<std::int64_t> out;
    for (std::int64_t r = range.first; r < range.second; ++r) {
      for (std::uint64_t k = m.rowBegin[r]; k < m.rowBegin[r + 1]; ++k) {
        if (m.termVar[k] == var) {
          out.push_back(r);
          break;
        }
      }
    }
    return out;
  }

  std::vector<std::int64_t> matchRowsAt(const spk::LpModel& m, std::int64_t t) {
    auto range = famRange(m, "match");
    std::vector<std::int64_t> out;
    for (std::int64_t r = range.first; r < range.second; ++r) {
      for (std::uint64_t k = m.rowBegin[r]; k < m.rowBegin[r + 1]; ++k) {
        const auto& d = m.vars[m.termVar[k]];
        if (d.kind == spk::VarKind::Match && d.c == t) {
          out.push_back(r);
          break;
        }
      }
    }
    return out;
  }

  std::vector<std::int64_t> matchVarsAt(const spk::LpModel& m, std::int64_t t) {
    std::vector<std::int64_t> out;
    for (std::size_t v = 0; v < m.vars.size(); ++v) {
      if (m.vars[v].kind == spk::VarKind::Match && m.vars[v].c == t) {
        out.push_back(static_cast<std::int64_t>(v));
      }
    }
    return out;
  }

  std::int64_t findVersion(const Compiled& c, const spk::LpModel& m, const std::string& mangled,
                           std::int64_t t) {
    for (std::size_t v = 0; v < m.vars.size(); ++v) {
      const auto& d = m.vars[v];
      if (d.kind == spk::VarKind::BitVersion && d.b == t && m.bitNames[d.a] == mangled) {
        return static_cast<std::int64_t>(v);
      }
    }
    fail_("version not found: " + mangled + " at t=" + std::to_string(t));
    return -1;
  }

  bool satisfies(const spk::LpModel& m, const std::vector<std::int64_t>& rows,
                 const std::map<std::int64_t, int>& assign) {
    for (std::int64_t r : rows) {
      std::int64_t lhs = 0;
      for (std::uint64_t k = m.rowBegin[r]; k < m.rowBegin[r + 1]; ++k) {
        auto it = assign.find(m.termVar[k]);
        if (it == assign.end()) fail_("row touches an unexpected variable");
        lhs += static_cast<std::int64_t>(m.termCoef[k]) * it->second;
      }
      auto rel = static_cast<spk::Rel>(m.rowRel[r]);
      std::int64_t rhs = m.rowRhs[r];
      bool ok = rel == spk::Rel::Le ? lhs <= rhs : rel == spk::Rel::Eq ? lhs == rhs : lhs >= rhs;
      if (!ok) return false;
    }
    return true;
  }

  FailFn fail_;
};

}  // namespace spktest
