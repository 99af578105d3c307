// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "spk/lpgen.hpp"

#include <algorithm>
#include <map>

namespace spk {

namespace {

struct VerSpan {
  std::int64_t lo, hi;  // inclusive version-time range
  std::int64_t base;    // var id of version at lo
};

class LpBuilder {
 public:
  LpBuilder(const AsmProgram& program, const SbTree& tree, const BuildOptions& opt)
      : prog_(program), tree_(tree), opt_(opt) {}

  LpModel run() {
    validateOptions();
    planControllers();
    planVersions();
    planMatches();
    allocateVars();

    emitStartRow();
    emitBitInitRows();
    emitSumRows();
    emitFlowLowerRows();
    emitFlowUpperRows();
    emitMatchRows();
    emitUpdateRows();
    emitCarryRows();
    emitObjective();

    model_.mode = modeName(opt_.mode);
    model_.tb = tb_;
    return std::move(model_);
  }

 private:
  bool uo() const { return opt_.mode == Mode::UO; }
  std::int64_t lineCountI() const { return static_cast<std::int64_t>(prog_.lines.size()); }

  void validateOptions() {
    if (opt_.tbOverride > 0) {
      if (!uo()) {
        throw CompileError(ErrKind::Usage, "a custom time bound applies to UO mode only");
      }
      checkTbOverride(tree_, opt_.tbOverride);
      tb_ = opt_.tbOverride;
    } else {
      tb_ = tree_.rootTb();
    }
    if (opt_.inputMode != InputMode::None &&
        static_cast<std::int64_t>(opt_.inputValues.size()) != prog_.p()) {
      throw CompileError(ErrKind::Usage,
                         "expected " + std::to_string(prog_.p()) + " input values, got " +
                             std::to_string(opt_.inputValues.size()));
    }
  }

  // ---- controller plan ----

  void planControllers() {
    const std::int64_t L = lineCountI();
    if (uo()) {
      ctrlCount_ = L * tb_;
      return;
    }
    ctrlTimes_.resize(L);
    idleEnd_.resize(L);
    for (std::int32_t b : tree_.flatBlocks) {
      const SbNode& n = tree_.node(b);
      Etig gen(tree_, b);
      while (auto iv = gen.next()) {
        if (iv->end > tree_.rootTb()) {
          internalError("ETI of " + n.name + " exceeds the root time bound");
        }
        for (LineNo l = n.lineLo; l <= n.lineHi; ++l) {
          const AsmLine& line = prog_.line(l);
          if (line.op == Op::IDLE) {
            for (std::int64_t t = iv->start + 1; t <= iv->end; ++t) {
              ctrlTimes_[l - 1].push_back(t);
              idleEnd_[l - 1].push_back(iv->end);
            }
          } else {
            std::int64_t t = iv->start + 1 + (l - n.lineLo);
            if (t > iv->end) {
              internalError("line offset outside ETI in block " + n.name);
            }
            ctrlTimes_[l - 1].push_back(t);
          }
        }
      }
    }
    // Ids line-major; per-step supports for the sum rows.
    ctrlBase_.resize(L + 1);
    std::int64_t id = 0;
    perT_.assign(tb_ + 1, {});
    for (std::int64_t l = 0; l < L; ++l) {
      ctrlBase_[l] = id;
      for (std::int64_t t : ctrlTimes_[l]) {
        perT_[t].push_back({static_cast<LineNo>(l + 1), id});
        ++id;
      }
    }
    ctrlBase_[L] = id;
    ctrlCount_ = id;
    for (std::int64_t t = 1; t <= tb_; ++t) {
      if (perT_[t].empty()) {
        internalError("no controllers exist at step " + std::to_string(t));
      }
      std::sort(perT_[t].begin(), perT_[t].end());
    }
  }

  std::int64_t ctrlId(LineNo l, std::int64_t t) const {
    if (t < 1 || t > tb_) return -1;
    if (uo()) return (static_cast<std::int64_t>(l) - 1) * tb_ + (t - 1);
    const auto& times = ctrlTimes_[l - 1];
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end() || *it != t) return -1;
    return ctrlBase_[l - 1] + (it - times.begin());
  }

  // Interval end for an idle line's controller at time t (HSB).
  std::int64_t idleEndAt(LineNo l, std::int64_t t) const {
    const auto& times = ctrlTimes_[l - 1];
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end() || *it != t) internalError("missing idle controller");
    return idleEnd_[l - 1][it - times.begin()];
  }

  // ---- version plan ----

  void planVersions() {
    const std::int64_t nbits = static_cast<std::int64_t>(prog_.bits.size());
    verSpans_.resize(nbits);
    std::int64_t base = ctrlCount_;
    if (uo()) {
      for (std::int64_t b = 0; b < nbits; ++b) {
        verSpans_[b] = {{1, tb_ + 1, base}};
        base += tb_ + 1;
      }
      verCount_ = base - ctrlCount_;
      collectWriters();
      return;
    }
    // Accessing blocks per bit.
    std::vector<std::vector<std::int32_t>> accessors(nbits);
    for (std::size_t i = 0; i < prog_.lines.size(); ++i) {
      std::int32_t block = tree_.blockOfLine(static_cast<LineNo>(i + 1));
      for (BitId bit : prog_.readSets[i]) accessors[bit].push_back(block);
      for (BitId bit : prog_.writeSets[i]) accessors[bit].push_back(block);
    }
    std::vector<std::uint8_t> isInput(nbits, 0);
    for (BitId b : prog_.inputBits) isInput[b] = 1;
    for (std::int64_t b = 0; b < nbits; ++b) {
      auto& acc = accessors[b];
      std::sort(acc.begin(), acc.end());
      acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
      std::vector<VerSpan>& spans = verSpans_[b];
      if (isInput[b]) spans.push_back({1, 1, 0});
      if (!acc.empty()) {
        for (const TimeInterval& iv : collectUnion(tree_, acc, tree_.rootTb())) {
          std::int64_t lo = iv.start + 1, hi = iv.end + 1;
          if (!spans.empty() && lo <= spans.back().hi) {
            spans.back().hi = std::max(spans.back().hi, hi);
          } else {
            spans.push_back({lo, hi, 0});
          }
        }
      }
      for (auto& s : spans) {
        s.base = base;
        base += s.hi - s.lo + 1;
      }
    }
    verCount_ = base - ctrlCount_;
    collectWriters();
  }

  void collectWriters() {
    writers_.resize(prog_.bits.size());
    for (std::size_t i = 0; i < prog_.lines.size(); ++i) {
      for (BitId bit : prog_.writeSets[i]) {
        writers_[bit].push_back(static_cast<LineNo>(i + 1));
      }
    }
  }

  std::int64_t verId(BitId b, std::int64_t t) const {
    for (const VerSpan& s : verSpans_[b]) {
      if (t >= s.lo && t <= s.hi) return s.base + (t - s.lo);
      if (t < s.lo) break;
    }
    return -1;
  }

  std::int64_t verIdReq(BitId b, std::int64_t t, const char* what) const {
    std::int64_t id = verId(b, t);
    if (id < 0) {
      internalError(std::string("missing version of ") + prog_.bits[b].display() + " at t=" +
                    std::to_string(t) + " (" + what + ")");
    }
    return id;
  }

  // ---- match-variable plan (array ops) ----

  struct Group {
    std::vector<BitId> idxBits;
    std::vector<LineNo> lines;
    std::int64_t cells = 0;
    std::vector<std::int64_t> times;  // HSB only
    std::int64_t base = 0;
  };

  void planMatches() {
    lineGroup_.assign(prog_.lines.size(), -1);
    std::map<std::vector<BitId>, std::int32_t> byKey;
    for (std::size_t i = 0; i < prog_.lines.size(); ++i) {
      const AsmLine& l = prog_.lines[i];
      if (l.op != Op::ALOAD && l.op != Op::ASTORE) continue;
      auto [it, fresh] = byKey.try_emplace(l.idxBits, static_cast<std::int32_t>(groups_.size()));
      if (fresh) {
        groups_.push_back(Group{l.idxBits, {}, 0, {}, 0});
      }
      Group& g = groups_[it->second];
      g.lines.push_back(static_cast<LineNo>(i + 1));
      g.cells = std::max(g.cells, prog_.arrays[l.array].length);
      lineGroup_[i] = it->second;
    }
    std::int64_t base = ctrlCount_ + verCount_;
    for (Group& g : groups_) {
      if (!uo()) {
        for (LineNo l : g.lines) {
          const auto& times = ctrlTimes_[l - 1];
          g.times.insert(g.times.end(), times.begin(), times.end());
        }
        std::sort(g.times.begin(), g.times.end());
        g.times.erase(std::unique(g.times.begin(), g.times.end()), g.times.end());
      }
      g.base = base;
      base += (uo() ? tb_ : static_cast<std::int64_t>(g.times.size())) * g.cells;
    }
    matchCount_ = base - ctrlCount_ - verCount_;
  }

  std::int64_t matchId(std::int32_t g, std::int64_t cell, std::int64_t t) const {
    const Group& grp = groups_[g];
    if (uo()) return grp.base + (t - 1) * grp.cells + cell;
    auto it = std::lower_bound(grp.times.begin(), grp.times.end(), t);
    if (it == grp.times.end() || *it != t) internalError("missing match time");
    return grp.base + (it - grp.times.begin()) * grp.cells + cell;
  }

  // Cells whose index is not representable in the group's index width can
  // never match; their variables are pinned to zero and get no rows.
  bool cellAddressable(const Group& g, std::int64_t cell) const {
    int wc = static_cast<int>(g.idxBits.size());
    return wc >= 63 || (cell >> wc) == 0;
  }

  // ---- variable table ----

  void allocateVars() {
    model_.vars.reserve(ctrlCount_ + verCount_ + matchCount_);
    const std::int64_t L = lineCountI();
    if (uo()) {
      for (std::int64_t l = 1; l <= L; ++l) {
        for (std::int64_t t = 1; t <= tb_; ++t) {
          model_.vars.push_back({VarKind::Controller, static_cast<std::int32_t>(l),
                                 static_cast<std::int32_t>(t), 0, 0, 1});
        }
      }
    } else {
      for (std::int64_t l = 1; l <= L; ++l) {
        for (std::int64_t t : ctrlTimes_[l - 1]) {
          model_.vars.push_back({VarKind::Controller, static_cast<std::int32_t>(l),
                                 static_cast<std::int32_t>(t), 0, 0, 1});
        }
      }
    }
    model_.ctrlBegin = 0;
    model_.ctrlEnd = ctrlCount_;

    for (std::size_t b = 0; b < prog_.bits.size(); ++b) {
      for (const VerSpan& s : verSpans_[b]) {
        for (std::int64_t t = s.lo; t <= s.hi; ++t) {
          model_.vars.push_back({VarKind::BitVersion, static_cast<std::int32_t>(b),
                                 static_cast<std::int32_t>(t), 0, 0, 1});
        }
      }
    }
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const Group& grp = groups_[g];
      std::int64_t nt = uo() ? tb_ : static_cast<std::int64_t>(grp.times.size());
      for (std::int64_t ti = 0; ti < nt; ++ti) {
        std::int64_t t = uo() ? ti + 1 : grp.times[ti];
        for (std::int64_t cell = 0; cell < grp.cells; ++cell) {
          LpModel::Var v{VarKind::Match, static_cast<std::int32_t>(g),
                         static_cast<std::int32_t>(cell), static_cast<std::int32_t>(t), 0, 1};
          if (!cellAddressable(grp, cell)) v.hi = 0;
          model_.vars.push_back(v);
        }
      }
    }

    model_.bitNames.reserve(prog_.bits.size());
    for (const BitVar& bv : prog_.bits) model_.bitNames.push_back(bv.mangled());
    for (const Group& g : groups_) model_.groupIdxBits.push_back(g.idxBits);

    // Fixed-input bounds.
    if (opt_.inputMode == InputMode::Fixed) {
      for (std::size_t i = 0; i < prog_.inputBits.size(); ++i) {
        std::int64_t v = verIdReq(prog_.inputBits[i], 1, "fixed input");
        model_.vars[v].lo = model_.vars[v].hi = static_cast<std::int8_t>(opt_.inputValues[i] & 1);
      }
    }
  }

  // ---- row emission ----

  void family(const char* name) { model_.familyRows.push_back({name, model_.rows()}); }

  void emitStartRow() {
    model_.addTerm(static_cast<std::int32_t>(ctrlIdReq(1, 1)), 1);
    model_.finishRow(Rel::Eq, 1);
    family("start");
  }

  std::int64_t ctrlIdReq(LineNo l, std::int64_t t) const {
    std::int64_t id = ctrlId(l, t);
    if (id < 0) {
      internalError("missing controller S(" + std::to_string(l) + "," + std::to_string(t) + ")");
    }
    return id;
  }

  // Non-input bits start at zero: pin each first version.
  void emitBitInitRows() {
    std::vector<std::uint8_t> isInput(prog_.bits.size(), 0);
    for (BitId b : prog_.inputBits) isInput[b] = 1;
    for (std::size_t b = 0; b < prog_.bits.size(); ++b) {
      if (isInput[b] || verSpans_[b].empty()) continue;
      model_.addTerm(static_cast<std::int32_t>(verSpans_[b][0].base), 1);
      model_.finishRow(Rel::Eq, 0);
    }
    family("bit-init");
  }

  void emitSumRows() {
    for (std::int64_t t = 1; t <= tb_; ++t) {
      if (uo()) {
        for (std::int64_t l = 1; l <= lineCountI(); ++l) {
          model_.addTerm(static_cast<std::int32_t>(ctrlId(static_cast<LineNo>(l), t)), 1);
        }
      } else {
        for (const auto& [l, id] : perT_[t]) model_.addTerm(static_cast<std::int32_t>(id), 1);
      }
      model_.finishRow(Rel::Eq, 1);
    }
    family("state-sum");
  }

  template <typename Fn>
  void forEachControllerByTime(std::int64_t tLo, std::int64_t tHi, Fn fn) const {
    for (std::int64_t t = tLo; t <= tHi; ++t) {
      if (uo()) {
        for (std::int64_t l = 1; l <= lineCountI(); ++l) {
          fn(static_cast<LineNo>(l), t, ctrlId(static_cast<LineNo>(l), t));
        }
      } else {
        for (const auto& [l, id] : perT_[t]) fn(l, t, id);
      }
    }
  }

  // Trigger rows: the scheduled successor at t+1 receives at least S(l,t).
  void emitFlowLowerRows() {
    forEachControllerByTime(1, tb_ - 1, [&](LineNo l, std::int64_t t, std::int64_t id) {
      const AsmLine& line = prog_.line(l);
      switch (line.op) {
        case Op::GOTO:
          emitTrigger(line.target, t, id);
          return;
        case Op::HALT:
          emitTrigger(l, t, id);
          return;
        case Op::BRIF: {
          std::int64_t c = verIdReq(line.condBit, t, "branch condition");
          std::int64_t tTrue = ctrlId(line.target, t + 1);
          std::int64_t tFalse = ctrlId(line.targetFalse, t + 1);
          if (tTrue < 0 && tFalse < 0) {
            internalError("branch at line " + std::to_string(l) + " has no live target at t=" +
                          std::to_string(t + 1));
          }
          // S(true,t+1) >= S + c - 1; a missing target pins the branch shut.
          if (tTrue >= 0) model_.addTerm(static_cast<std::int32_t>(tTrue), 1);
          model_.addTerm(static_cast<std::int32_t>(id), -1);
          model_.addTerm(static_cast<std::int32_t>(c), -1);
          model_.finishRow(Rel::Ge, -1);
          // S(false,t+1) >= S - c.
          if (tFalse >= 0) model_.addTerm(static_cast<std::int32_t>(tFalse), 1);
          model_.addTerm(static_cast<std::int32_t>(id), -1);
          model_.addTerm(static_cast<std::int32_t>(c), 1);
          model_.finishRow(Rel::Ge, 0);
          return;
        }
        case Op::IDLE: {
          if (uo()) {
            emitTrigger(line.target, t, id);
            return;
          }
          std::int64_t end = idleEndAt(l, t);
          emitTrigger(t < end ? l : line.target, t, id);
          return;
        }
        default:
          emitTrigger(l + 1, t, id);
          return;
      }
    });
    family("flow-lower");
  }

  void emitTrigger(LineNo succ, std::int64_t t, std::int64_t fromId) {
    model_.addTerm(static_cast<std::int32_t>(ctrlIdReq(succ, t + 1)), 1);
    model_.addTerm(static_cast<std::int32_t>(fromId), -1);
    model_.finishRow(Rel::Ge, 0);
  }

  // Is the edge l -> succ scheduled at time t (for upper-bound rows)?
  bool edgeActiveAt(LineNo l, LineNo succ, std::int64_t t) const {
    const AsmLine& line = prog_.line(l);
    switch (line.op) {
      case Op::IDLE:
        if (uo()) return succ == line.target;
        else {
          std::int64_t end = idleEndAt(l, t);
          return t < end ? succ == l : succ == line.target;
        }
      case Op::GOTO:
        return succ == line.target;
      case Op::BRIF:
        return succ == line.target || succ == line.targetFalse;
      case Op::HALT:
        return succ == l;
      default:
        return succ == l + 1;
    }
  }

  // Controller mass cannot appear from nowhere: S(l',t) is bounded by the sum
  // of its scheduled predecessors at t-1.
  void emitFlowUpperRows() {
    // Static reverse candidates.
    std::vector<std::vector<LineNo>> rev(prog_.lines.size() + 1);
    for (std::size_t i = 0; i < prog_.lines.size(); ++i) {
      LineNo l = static_cast<LineNo>(i + 1);
      for (LineNo s : successors(prog_, l)) rev[s].push_back(l);
    }
    forEachControllerByTime(2, tb_, [&](LineNo l2, std::int64_t t, std::int64_t id) {
      model_.addTerm(static_cast<std::int32_t>(id), 1);
      int preds = 0;
      for (LineNo l : rev[l2]) {
        std::int64_t pid = ctrlId(l, t - 1);
        if (pid < 0 || !edgeActiveAt(l, l2, t - 1)) continue;
        model_.addTerm(static_cast<std::int32_t>(pid), -1);
        ++preds;
      }
      // An empty predecessor sum pins the controller to zero. Legitimate in
      // UO (a line unreachable at this step, e.g. the entry line after t=1);
      // in HSB every scheduled step must be reachable.
      if (preds == 0 && !uo()) {
        internalError("no scheduled predecessor for S(" + std::to_string(l2) + "," +
                      std::to_string(t) + ")");
      }
      model_.finishRow(Rel::Le, 0);
    });
    family("flow-upper");
  }

  void emitMatchRows() {
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const Group& grp = groups_[g];
      std::int64_t nt = uo() ? tb_ : static_cast<std::int64_t>(grp.times.size());
      int wc = static_cast<int>(grp.idxBits.size());
      for (std::int64_t ti = 0; ti < nt; ++ti) {
        std::int64_t t = uo() ? ti + 1 : grp.times[ti];
        for (std::int64_t cell = 0; cell < grp.cells; ++cell) {
          if (!cellAddressable(grp, cell)) continue;
          std::int64_t mu = matchId(static_cast<std::int32_t>(g), cell, t);
          int ones = 0;
          for (int j = 0; j < wc; ++j) {
            std::int64_t ij = verIdReq(grp.idxBits[j], t, "match index");
            if ((cell >> j) & 1) {
              ++ones;
              model_.addTerm(static_cast<std::int32_t>(mu), 1);
              model_.addTerm(static_cast<std::int32_t>(ij), -1);
              model_.finishRow(Rel::Le, 0);
            } else {
              model_.addTerm(static_cast<std::int32_t>(mu), 1);
              model_.addTerm(static_cast<std::int32_t>(ij), 1);
              model_.finishRow(Rel::Le, 1);
            }
          }
          // mu >= 1 - (mismatch count)
          model_.addTerm(static_cast<std::int32_t>(mu), 1);
          for (int j = 0; j < wc; ++j) {
            std::int64_t ij = verIdReq(grp.idxBits[j], t, "match index");
            model_.addTerm(static_cast<std::int32_t>(ij), (cell >> j) & 1 ? -1 : 1);
          }
          model_.finishRow(Rel::Ge, 1 - ones);
        }
      }
    }
    family("match");
  }

  // Gated instruction semantics on the next-step version of the destination.
  void emitUpdateRows() {
    forEachControllerByTime(1, tb_, [&](LineNo l, std::int64_t t, std::int64_t id) {
      const AsmLine& line = prog_.line(l);
      auto S = static_cast<std::int32_t>(id);
      switch (line.op) {
        case Op::BCONST: {
          auto y = v(line.dst, t + 1, "dst");
          // y >= c - g ; y <= c + g   with g = 1 - S
          model_.addTerm(S, 1);
          model_.addTerm(y, -1);
          model_.finishRow(Rel::Le, 1 - line.constVal);
          model_.addTerm(y, 1);
          model_.addTerm(S, 1);
          model_.finishRow(Rel::Le, 1 + line.constVal);
          return;
        }
        case Op::BCOPY: {
          auto y = v(line.dst, t + 1, "dst");
          auto a = v(line.a, t, "src");
          pairLe(a, y, S, 1);  // a - y + S <= 1
          pairLe(y, a, S, 1);  // y - a + S <= 1
          return;
        }
        case Op::BNOT: {
          auto y = v(line.dst, t + 1, "dst");
          auto a = v(line.a, t, "src");
          // y >= 1 - a - g  ->  S - a - y <= 0
          model_.addTerm(S, 1);
          model_.addTerm(a, -1);
          model_.addTerm(y, -1);
          model_.finishRow(Rel::Le, 0);
          // y <= 1 - a + g  ->  y + a + S <= 2
          model_.addTerm(y, 1);
          model_.addTerm(a, 1);
          model_.addTerm(S, 1);
          model_.finishRow(Rel::Le, 2);
          return;
        }
        case Op::BAND: {
          auto y = v(line.dst, t + 1, "dst");
          auto a = v(line.a, t, "src");
          auto b = v(line.b, t, "src");
          pairLe(y, a, S, 1);  // y <= a + g
          pairLe(y, b, S, 1);
          // y >= a + b - 1 - g  ->  a + b + S - y <= 2
          model_.addTerm(a, 1);
          model_.addTerm(b, 1);
          model_.addTerm(S, 1);
          model_.addTerm(y, -1);
          model_.finishRow(Rel::Le, 2);
          return;
        }
        case Op::BOR: {
          auto y = v(line.dst, t + 1, "dst");
          auto a = v(line.a, t, "src");
          auto b = v(line.b, t, "src");
          pairLe(a, y, S, 1);  // y >= a - g
          pairLe(b, y, S, 1);
          // y <= a + b + g  ->  y - a - b + S <= 1
          model_.addTerm(y, 1);
          model_.addTerm(a, -1);
          model_.addTerm(b, -1);
          model_.addTerm(S, 1);
          model_.finishRow(Rel::Le, 1);
          return;
        }
        case Op::BXOR: {
          auto y = v(line.dst, t + 1, "dst");
          auto a = v(line.a, t, "src");
          auto b = v(line.b, t, "src");
          // y >= a - b - g ; y >= b - a - g
          model_.addTerm(a, 1);
          model_.addTerm(b, -1);
          model_.addTerm(y, -1);
          model_.addTerm(S, 1);
          model_.finishRow(Rel::Le, 1);
          model_.addTerm(b, 1);
          model_.addTerm(a, -1);
          model_.addTerm(y, -1);
          model_.addTerm(S, 1);
          model_.finishRow(Rel::Le, 1);
          // y <= a + b + g
          model_.addTerm(y, 1);
          model_.addTerm(a, -1);
          model_.addTerm(b, -1);
          model_.addTerm(S, 1);
          model_.finishRow(Rel::Le, 1);
          // y <= 2 - a - b + g
          model_.addTerm(y, 1);
          model_.addTerm(a, 1);
          model_.addTerm(b, 1);
          model_.addTerm(S, 1);
          model_.finishRow(Rel::Le, 3);
          return;
        }
        case Op::ALOAD: {
          const ArrayInfo& arr = prog_.arrays[line.array];
          const Group& grp = groups_[lineGroup_[l - 1]];
          for (std::int64_t cell = 0; cell < arr.length; ++cell) {
            if (!cellAddressable(grp, cell)) continue;
            auto mu = static_cast<std::int32_t>(matchId(lineGroup_[l - 1], cell, t));
            for (std::int64_t k = 0; k < arr.elemWidth; ++k) {
              auto y = v(line.dstBits[k], t + 1, "dst");
              auto A = v(arr.cellBit(cell, k), t, "cell");
              // |y - A| <= (1-S) + (1-mu)
              quadLe(y, A, S, mu);
              quadLe(A, y, S, mu);
            }
          }
          return;
        }
        case Op::ASTORE: {
          const ArrayInfo& arr = prog_.arrays[line.array];
          const Group& grp = groups_[lineGroup_[l - 1]];
          for (std::int64_t cell = 0; cell < arr.length; ++cell) {
            auto mu = static_cast<std::int32_t>(matchId(lineGroup_[l - 1], cell, t));
            bool addr = cellAddressable(grp, cell);
            for (std::int64_t k = 0; k < arr.elemWidth; ++k) {
              auto An = v(arr.cellBit(cell, k), t, "cell");
              auto Ax = v(arr.cellBit(cell, k), t + 1, "cell");
              // Non-matching cells keep their value: |Ax - An| <= (1-S) + mu
              model_.addTerm(Ax, 1);
              model_.addTerm(An, -1);
              model_.addTerm(S, 1);
              model_.addTerm(mu, -1);
              model_.finishRow(Rel::Le, 1);
              model_.addTerm(An, 1);
              model_.addTerm(Ax, -1);
              model_.addTerm(S, 1);
              model_.addTerm(mu, -1);
              model_.finishRow(Rel::Le, 1);
              if (addr) {
                // The matching cell takes the source: |Ax - src| <= (1-S) + (1-mu)
                auto src = v(line.srcBits[k], t, "src");
                quadLe(Ax, src, S, mu);
                quadLe(src, Ax, S, mu);
              }
            }
          }
          return;
        }
        case Op::GOTO:
        case Op::BRIF:
        case Op::IDLE:
        case Op::HALT:
          return;
      }
    });
    family("update");
  }

  std::int32_t v(BitId b, std::int64_t t, const char* what) {
    return static_cast<std::int32_t>(verIdReq(b, t, what));
  }

  // x - y + S <= rhs
  void pairLe(std::int32_t x, std::int32_t y, std::int32_t S, std::int32_t rhs) {
    model_.addTerm(x, 1);
    model_.addTerm(y, -1);
    model_.addTerm(S, 1);
    model_.finishRow(Rel::Le, rhs);
  }

  // x - y + S + mu <= 2
  void quadLe(std::int32_t x, std::int32_t y, std::int32_t S, std::int32_t mu) {
    model_.addTerm(x, 1);
    model_.addTerm(y, -1);
    model_.addTerm(S, 1);
    model_.addTerm(mu, 1);
    model_.finishRow(Rel::Le, 2);
  }

  // Carry-forward: within a span, consecutive versions may differ only under
  // an active writer; across a gap, a bridging equality links the spans.
  void emitCarryRows() {
    for (std::size_t b = 0; b < prog_.bits.size(); ++b) {
      const auto& spans = verSpans_[b];
      for (std::size_t si = 0; si < spans.size(); ++si) {
        const VerSpan& s = spans[si];
        for (std::int64_t t = s.lo; t < s.hi; ++t) {
          auto vNow = static_cast<std::int32_t>(s.base + (t - s.lo));
          auto vNext = static_cast<std::int32_t>(s.base + (t - s.lo) + 1);
          int nw = 0;
          for (LineNo w : writers_[b]) {
            if (ctrlId(w, t) >= 0) ++nw;
          }
          if (nw == 0) {
            model_.addTerm(vNext, 1);
            model_.addTerm(vNow, -1);
            model_.finishRow(Rel::Eq, 0);
            continue;
          }
          model_.addTerm(vNext, 1);
          model_.addTerm(vNow, -1);
          for (LineNo w : writers_[b]) {
            std::int64_t cid = ctrlId(w, t);
            if (cid >= 0) model_.addTerm(static_cast<std::int32_t>(cid), -1);
          }
          model_.finishRow(Rel::Le, 0);
          model_.addTerm(vNow, 1);
          model_.addTerm(vNext, -1);
          for (LineNo w : writers_[b]) {
            std::int64_t cid = ctrlId(w, t);
            if (cid >= 0) model_.addTerm(static_cast<std::int32_t>(cid), -1);
          }
          model_.finishRow(Rel::Le, 0);
        }
        if (si + 1 < spans.size()) {
          auto vEnd = static_cast<std::int32_t>(s.base + (s.hi - s.lo));
          auto vPre = static_cast<std::int32_t>(spans[si + 1].base);
          model_.addTerm(vPre, 1);
          model_.addTerm(vEnd, -1);
          model_.finishRow(Rel::Eq, 0);
        }
      }
    }
    family("carry");
  }

  void emitObjective() {
    if (opt_.inputMode == InputMode::None) return;
    for (std::size_t i = 0; i < prog_.inputBits.size(); ++i) {
      std::int64_t x = verIdReq(prog_.inputBits[i], 1, "objective input");
      model_.objective.push_back(
          {static_cast<std::int32_t>(x), opt_.inputValues[i] ? 1 : -1});
    }
  }

  const AsmProgram& prog_;
  const SbTree& tree_;
  BuildOptions opt_;
  LpModel model_;
  std::int64_t tb_ = 0;

  std::int64_t ctrlCount_ = 0, verCount_ = 0, matchCount_ = 0;
  std::vector<std::vector<std::int64_t>> ctrlTimes_;  // HSB
  std::vector<std::vector<std::int64_t>> idleEnd_;    // HSB, aligned with ctrlTimes_
  std::vector<std::int64_t> ctrlBase_;                // HSB
  std::vector<std::vector<std::pair<LineNo, std::int64_t>>> perT_;  // HSB

  std::vector<std::vector<VerSpan>> verSpans_;
  std::vector<std::vector<LineNo>> writers_;

  std::vector<Group> groups_;
  std::vector<std::int32_t> lineGroup_;
};

}  // namespace

LpModel build(const AsmProgram& program, const SbTree& tree, const BuildOptions& opt) {
  return LpBuilder(program, tree, opt).run();
}

}  // namespace spk
