// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <map>
#include <set>

#include "spk/asm.hpp"

namespace spk {

const char* opName(Op op) {
  switch (op) {
    case Op::BCONST: return "BCONST";
    case Op::BCOPY: return "BCOPY";
    case Op::BAND: return "BAND";
    case Op::BOR: return "BOR";
    case Op::BXOR: return "BXOR";
    case Op::BNOT: return "BNOT";
    case Op::ALOAD: return "ALOAD";
    case Op::ASTORE: return "ASTORE";
    case Op::GOTO: return "GOTO";
    case Op::BRIF: return "BRIF";
    case Op::IDLE: return "IDLE";
    case Op::HALT: return "HALT";
  }
  return "?";
}

std::string BitVar::display() const {
  if (role == BitRole::Temp) return var;
  std::string s = var;
  if (elem >= 0) s += "[" + std::to_string(elem) + "]";
  s += ".b" + std::to_string(bit);
  return s;
}

std::string BitVar::mangled() const {
  std::string s = var;
  if (elem >= 0) s += "_" + std::to_string(elem);
  s += "_b" + std::to_string(bit);
  return s;
}

namespace {

class Lowerer {
 public:
  explicit Lowerer(const SourceProgram& src) : src_(src) {
    if (!src.resolved) internalError("lower() needs a resolved program");
    registerDecls();
    collectCounterWidths(src.stmts);
    Region root;
    root.kind = RegionKind::Root;
    out_.regions.push_back(root);
  }

  AsmProgram run() {
    lowerStmts(src_.stmts, 0);
    finish();
    return std::move(out_);
  }

 private:
  using Bits = std::vector<BitId>;

  // -- bit registry ---------------------------------------------------------

  void registerDecls() {
    for (const auto& d : src_.decls) {
      BitRole role = d.kind == DeclKind::Input    ? BitRole::Input
                     : d.kind == DeclKind::Output ? BitRole::Output
                                                  : BitRole::Local;
      if (d.type.isArray) {
        ArrayInfo info;
        info.name = d.name;
        info.length = d.type.lengthVal;
        info.elemWidth = d.type.elem.bits();
        for (std::int64_t e = 0; e < info.length; ++e) {
          for (std::int64_t k = 0; k < info.elemWidth; ++k) {
            info.cellBits.push_back(addBit(d.name, static_cast<std::int32_t>(e),
                                           static_cast<std::int32_t>(k), role));
          }
        }
        arrays_[d.name] = static_cast<std::int32_t>(out_.arrays.size());
        out_.arrays.push_back(std::move(info));
        appendIo(d.kind, out_.arrays.back().cellBits);
      } else {
        Bits bits;
        for (std::int64_t k = 0; k < d.type.elem.bits(); ++k) {
          bits.push_back(addBit(d.name, -1, static_cast<std::int32_t>(k), role));
        }
        scalars_[d.name] = bits;
        appendIo(d.kind, bits);
      }
    }
  }

  void appendIo(DeclKind kind, const Bits& bits) {
    if (kind == DeclKind::Input) {
      out_.inputBits.insert(out_.inputBits.end(), bits.begin(), bits.end());
    } else if (kind == DeclKind::Output) {
      out_.outputBits.insert(out_.outputBits.end(), bits.begin(), bits.end());
    }
  }

  BitId addBit(const std::string& var, std::int32_t elem, std::int32_t bit, BitRole role) {
    out_.bits.push_back(BitVar{var, elem, bit, role});
    return static_cast<BitId>(out_.bits.size() - 1);
  }

  BitId newTemp() {
    return addBit("_t" + std::to_string(tempCount_++), -1, 0, BitRole::Temp);
  }

  Bits newTemps(std::int64_t n) {
    Bits bits;
    for (std::int64_t i = 0; i < n; ++i) bits.push_back(newTemp());
    return bits;
  }

  void collectCounterWidths(const std::vector<StmtPtr>& stmts) {
    for (const auto& s : stmts) {
      if (s->k == StmtKind::For) {
        std::int64_t w = counterWidth(s->countVal);
        auto [it, fresh] = counterWidths_.emplace(s->counter, w);
        if (!fresh) it->second = std::max(it->second, w);
        collectCounterWidths(s->body);
      } else if (s->k == StmtKind::If) {
        collectCounterWidths(s->thenS);
        collectCounterWidths(s->elseS);
      }
    }
  }

  const Bits& counterBits(const std::string& name) {
    auto it = counters_.find(name);
    if (it != counters_.end()) return it->second;
    Bits bits;
    for (std::int64_t k = 0; k < counterWidths_.at(name); ++k) {
      bits.push_back(addBit(name, -1, static_cast<std::int32_t>(k), BitRole::LoopCounter));
    }
    return counters_.emplace(name, std::move(bits)).first->second;
  }

  // -- regions and emission -------------------------------------------------

  std::int32_t addRegion(RegionKind kind, std::int32_t parent, std::int64_t maxIter = 0) {
    Region r;
    r.kind = kind;
    r.parent = parent;
    r.maxIter = maxIter;
    out_.regions.push_back(r);
    std::int32_t id = static_cast<std::int32_t>(out_.regions.size() - 1);
    out_.regions[parent].children.push_back(id);
    return id;
  }

  LineNo nextLabel() const { return static_cast<LineNo>(out_.lines.size() + 1); }

  void beginLeaf(RegionKind kind, std::int32_t parent) {
    curLeaf_ = addRegion(kind, parent);
    out_.regions[curLeaf_].lineLo = nextLabel();
  }

  void endLeaf() {
    Region& r = out_.regions[curLeaf_];
    r.lineHi = nextLabel() - 1;
    if (r.lineHi < r.lineLo) internalError("empty leaf region");
    curLeaf_ = -1;
  }

  AsmLine& emit(Op op) {
    AsmLine line;
    line.op = op;
    line.label = nextLabel();
    line.region = curLeaf_;
    if (curLeaf_ < 0) internalError("emission outside a leaf region");
    out_.lines.push_back(std::move(line));
    return out_.lines.back();
  }

  BitId gate(Op op, BitId dst, BitId a, BitId b = -1) {
    AsmLine& l = emit(op);
    l.dst = dst;
    l.a = a;
    l.b = b;
    return dst;
  }

  BitId bconst(BitId dst, int v) {
    AsmLine& l = emit(Op::BCONST);
    l.dst = dst;
    l.constVal = v;
    return dst;
  }

  // -- expression lowering --------------------------------------------------

  // Lowers `e`, writing the top operation's result into `target` when given.
  // Returns the value bits (LSB-first).
  Bits lowerExpr(const Expr& e, const Bits* target) {
    switch (e.k) {
      case ExprKind::BoolLit: {
        Bits dst = target ? *target : Bits{newTemp()};
        bconst(dst[0], e.bval ? 1 : 0);
        return dst;
      }
      case ExprKind::IntLit: {
        Bits dst = target ? *target : newTemps(e.width);
        for (std::int64_t k = 0; k < e.width; ++k) {
          bconst(dst[k], (e.ival >> k) & 1 ? 1 : 0);
        }
        return dst;
      }
      case ExprKind::Var: {
        const Bits& bits = varBits(e.name);
        if (!target) return bits;
        for (std::size_t k = 0; k < target->size(); ++k) gate(Op::BCOPY, (*target)[k], bits[k]);
        return *target;
      }
      case ExprKind::Index: {
        const ArrayInfo& info = out_.arrays[arrays_.at(e.name)];
        if (e.a->k == ExprKind::IntLit) {
          Bits bits;
          for (std::int64_t k = 0; k < info.elemWidth; ++k) {
            bits.push_back(info.cellBit(static_cast<std::int64_t>(e.a->ival), k));
          }
          if (!target) return bits;
          for (std::size_t k = 0; k < target->size(); ++k) gate(Op::BCOPY, (*target)[k], bits[k]);
          return *target;
        }
        Bits idx = lowerExpr(*e.a, nullptr);
        Bits dst = target ? *target : newTemps(info.elemWidth);
        AsmLine& l = emit(Op::ALOAD);
        l.array = arrays_.at(e.name);
        l.idxBits = idx;
        l.dstBits = dst;
        return dst;
      }
      case ExprKind::Not: {
        Bits a = lowerExpr(*e.a, nullptr);
        Bits dst = target ? *target : Bits{newTemp()};
        gate(Op::BNOT, dst[0], a[0]);
        return dst;
      }
      case ExprKind::And:
      case ExprKind::Or:
      case ExprKind::Xor: {
        Bits a = lowerExpr(*e.a, nullptr);
        Bits b = lowerExpr(*e.b, nullptr);
        Bits dst = target ? *target : Bits{newTemp()};
        Op op = e.k == ExprKind::And ? Op::BAND : e.k == ExprKind::Or ? Op::BOR : Op::BXOR;
        gate(op, dst[0], a[0], b[0]);
        return dst;
      }
      case ExprKind::Add: {
        Bits a = lowerExpr(*e.a, nullptr);
        Bits b = lowerExpr(*e.b, nullptr);
        Bits dst = target ? *target : newTemps(e.width);
        emitAdder(a, b, dst);
        return dst;
      }
      case ExprKind::Lt: {
        Bits a = lowerExpr(*e.a, nullptr);
        Bits b = lowerExpr(*e.b, nullptr);
        Bits dst = target ? *target : Bits{newTemp()};
        emitLess(a, b, dst[0]);
        return dst;
      }
      case ExprKind::Le: {
        // a <= b  ==  !(b < a)
        Bits a = lowerExpr(*e.a, nullptr);
        Bits b = lowerExpr(*e.b, nullptr);
        BitId gt = newTemp();
        emitLess(b, a, gt);
        Bits dst = target ? *target : Bits{newTemp()};
        gate(Op::BNOT, dst[0], gt);
        return dst;
      }
      case ExprKind::Eq: {
        Bits a = lowerExpr(*e.a, nullptr);
        Bits b = lowerExpr(*e.b, nullptr);
        Bits dst = target ? *target : Bits{newTemp()};
        emitEqual(a, b, dst[0]);
        return dst;
      }
    }
    internalError("bad expression");
  }

  const Bits& varBits(const std::string& name) {
    auto it = scalars_.find(name);
    if (it != scalars_.end()) return it->second;
    return counterBits(name);
  }

  // Ripple-carry adder: one half adder, then full adders. The final carry is
  // computed into a temp and left unused, keeping the expansion uniform.
  // dst may alias an operand: every operand bit of position i is read before
  // dst[i] is written, and later positions never read earlier operand bits.
  void emitAdder(const Bits& a, const Bits& b, const Bits& dst) {
    std::size_t w = dst.size();
    BitId carry = gate(Op::BAND, newTemp(), a[0], b[0]);
    gate(Op::BXOR, dst[0], a[0], b[0]);
    for (std::size_t i = 1; i < w; ++i) {
      BitId t = gate(Op::BXOR, newTemp(), a[i], b[i]);
      BitId u = gate(Op::BAND, newTemp(), a[i], b[i]);
      BitId v = gate(Op::BAND, newTemp(), t, carry);
      BitId cNew = gate(Op::BOR, newTemp(), u, v);
      gate(Op::BXOR, dst[i], t, carry);
      carry = cNew;
    }
  }

  // Most-significant-bit-first less-than chain producing one result bit.
  void emitLess(const Bits& a, const Bits& b, BitId dst) {
    std::size_t w = a.size();
    std::size_t msb = w - 1;
    BitId na = gate(Op::BNOT, newTemp(), a[msb]);
    if (w == 1) {
      gate(Op::BAND, dst, na, b[msb]);
      return;
    }
    BitId res = gate(Op::BAND, newTemp(), na, b[msb]);
    BitId x = gate(Op::BXOR, newTemp(), a[msb], b[msb]);
    BitId eq = gate(Op::BNOT, newTemp(), x);
    for (std::size_t i = msb; i-- > 0;) {
      BitId nai = gate(Op::BNOT, newTemp(), a[i]);
      BitId t1 = gate(Op::BAND, newTemp(), nai, b[i]);
      BitId t2 = gate(Op::BAND, newTemp(), eq, t1);
      res = gate(Op::BOR, i == 0 ? dst : newTemp(), res, t2);
      if (i > 0) {
        BitId xi = gate(Op::BXOR, newTemp(), a[i], b[i]);
        BitId nxi = gate(Op::BNOT, newTemp(), xi);
        eq = gate(Op::BAND, newTemp(), eq, nxi);
      }
    }
  }

  void emitEqual(const Bits& a, const Bits& b, BitId dst) {
    std::size_t w = a.size();
    Bits nx;
    for (std::size_t i = 0; i < w; ++i) {
      BitId x = gate(Op::BXOR, newTemp(), a[i], b[i]);
      nx.push_back(gate(Op::BNOT, w == 1 ? dst : newTemp(), x));
    }
    if (w == 1) return;
    BitId acc = nx[0];
    for (std::size_t i = 1; i < w; ++i) {
      acc = gate(Op::BAND, i + 1 == w ? dst : newTemp(), acc, nx[i]);
    }
  }

  // -- statements -----------------------------------------------------------

  void lowerStmts(const std::vector<StmtPtr>& stmts, std::int32_t parent) {
    for (const auto& s : stmts) lowerStmt(*s, parent);
  }

  void lowerStmt(const Stmt& s, std::int32_t parent) {
    switch (s.k) {
      case StmtKind::Assign: return lowerAssign(s, parent);
      case StmtKind::If: return lowerIf(s, parent);
      case StmtKind::For: return lowerFor(s, parent);
      case StmtKind::Halt: {
        beginLeaf(RegionKind::Stmt, parent);
        AsmLine& l = emit(Op::HALT);
        l.target = l.label;
        endLeaf();
        return;
      }
    }
  }

  void lowerAssign(const Stmt& s, std::int32_t parent) {
    beginLeaf(RegionKind::Stmt, parent);
    const Decl* d = src_.findDecl(s.lvName);
    std::int64_t lvWidth = d->type.elem.bits();

    if (s.lvIndex && s.lvIndex->k != ExprKind::IntLit) {
      // Runtime-indexed store.
      Bits src = lowerExpr(*s.rhs, nullptr);
      while (static_cast<std::int64_t>(src.size()) < lvWidth) {
        src.push_back(bconst(newTemp(), 0));
      }
      Bits idx = lowerExpr(*s.lvIndex, nullptr);
      AsmLine& l = emit(Op::ASTORE);
      l.array = arrays_.at(s.lvName);
      l.idxBits = idx;
      l.srcBits = src;
      endLeaf();
      return;
    }

    Bits lv;
    if (s.lvIndex) {
      const ArrayInfo& info = out_.arrays[arrays_.at(s.lvName)];
      for (std::int64_t k = 0; k < lvWidth; ++k) {
        lv.push_back(info.cellBit(static_cast<std::int64_t>(s.lvIndex->ival), k));
      }
    } else {
      lv = scalars_.at(s.lvName);
    }

    std::int64_t wr = s.rhs->isBool ? 1 : s.rhs->width;
    Bits low(lv.begin(), lv.begin() + wr);
    if (s.rhs->k == ExprKind::Var ||
        (s.rhs->k == ExprKind::Index && s.rhs->a->k == ExprKind::IntLit)) {
      Bits bits = lowerExpr(*s.rhs, nullptr);
      for (std::int64_t k = 0; k < wr; ++k) gate(Op::BCOPY, lv[k], bits[k]);
    } else {
      lowerExpr(*s.rhs, &low);
    }
    for (std::int64_t k = wr; k < lvWidth; ++k) bconst(lv[k], 0);
    endLeaf();
  }

  void lowerIf(const Stmt& s, std::int32_t parent) {
    std::int32_t condR = addRegion(RegionKind::Cond, parent);

    beginLeaf(RegionKind::CondEval, condR);
    Bits cond = lowerExpr(*s.cond, nullptr);
    AsmLine& brif = emit(Op::BRIF);
    brif.condBit = cond[0];
    LineNo brifLabel = brif.label;
    endLeaf();

    std::int32_t thenR = addRegion(RegionKind::ThenBranch, condR);
    lowerStmts(s.thenS, thenR);
    beginLeaf(RegionKind::Flow, thenR);
    AsmLine& thenIdle = emit(Op::IDLE);
    LineNo thenIdleLabel = thenIdle.label;
    endLeaf();

    std::int32_t elseR = addRegion(RegionKind::ElseBranch, condR);
    lowerStmts(s.elseS, elseR);
    beginLeaf(RegionKind::Flow, elseR);
    AsmLine& elseIdle = emit(Op::IDLE);
    LineNo elseIdleLabel = elseIdle.label;
    endLeaf();

    LineNo after = elseIdleLabel + 1;
    out_.lines[brifLabel - 1].target = brifLabel + 1;       // then entry
    out_.lines[brifLabel - 1].targetFalse = thenIdleLabel + 1;  // else entry
    out_.lines[thenIdleLabel - 1].target = after;
    out_.lines[elseIdleLabel - 1].target = after;
  }

  void lowerFor(const Stmt& s, std::int32_t parent) {
    std::int32_t loopR = addRegion(RegionKind::Loop, parent, s.countVal);
    const Bits& ctr = counterBits(s.counter);

    beginLeaf(RegionKind::LoopInit, loopR);
    for (BitId bit : ctr) bconst(bit, 0);
    endLeaf();

    std::int32_t bodyR = addRegion(RegionKind::LoopBody, loopR);
    LineNo bodyEntry = nextLabel();
    lowerStmts(s.body, bodyR);
    if (out_.regions[bodyR].children.empty()) {
      beginLeaf(RegionKind::Flow, bodyR);
      AsmLine& idle = emit(Op::IDLE);
      idle.target = idle.label + 1;
      endLeaf();
    }

    beginLeaf(RegionKind::LoopStep, loopR);
    // Increment: carry-in of 1; per bit, old value feeds the next carry.
    BitId carry = gate(Op::BCOPY, newTemp(), ctr[0]);
    gate(Op::BNOT, ctr[0], ctr[0]);
    for (std::size_t k = 1; k < ctr.size(); ++k) {
      BitId cNew = gate(Op::BAND, newTemp(), ctr[k], carry);
      gate(Op::BXOR, ctr[k], ctr[k], carry);
      carry = cNew;
    }
    // Bound check: continue while counter < M.
    Bits bound = newTemps(static_cast<std::int64_t>(ctr.size()));
    for (std::size_t k = 0; k < ctr.size(); ++k) {
      bconst(bound[k], (s.countVal >> k) & 1 ? 1 : 0);
    }
    BitId lt = newTemp();
    emitLess(ctr, bound, lt);
    AsmLine& brif = emit(Op::BRIF);
    brif.condBit = lt;
    brif.target = bodyEntry;
    brif.targetFalse = brif.label + 1;
    endLeaf();
  }

  // -- finalization ---------------------------------------------------------

  void finish() {
    out_.readSets.resize(out_.lines.size());
    out_.writeSets.resize(out_.lines.size());
    for (std::size_t i = 0; i < out_.lines.size(); ++i) {
      const AsmLine& l = out_.lines[i];
      auto& rs = out_.readSets[i];
      auto& ws = out_.writeSets[i];
      switch (l.op) {
        case Op::BCONST:
          ws.push_back(l.dst);
          break;
        case Op::BCOPY:
        case Op::BNOT:
          rs.push_back(l.a);
          ws.push_back(l.dst);
          break;
        case Op::BAND:
        case Op::BOR:
        case Op::BXOR:
          rs.push_back(l.a);
          rs.push_back(l.b);
          ws.push_back(l.dst);
          break;
        case Op::ALOAD: {
          rs = l.idxBits;
          const auto& cells = out_.arrays[l.array].cellBits;
          rs.insert(rs.end(), cells.begin(), cells.end());
          ws = l.dstBits;
          break;
        }
        case Op::ASTORE: {
          rs = l.idxBits;
          rs.insert(rs.end(), l.srcBits.begin(), l.srcBits.end());
          const auto& cells = out_.arrays[l.array].cellBits;
          rs.insert(rs.end(), cells.begin(), cells.end());
          ws = cells;
          break;
        }
        case Op::BRIF:
          rs.push_back(l.condBit);
          break;
        case Op::GOTO:
        case Op::IDLE:
        case Op::HALT:
          break;
      }
    }
    validateAsm(out_);
  }

  const SourceProgram& src_;
  AsmProgram out_;
  std::map<std::string, Bits> scalars_;
  std::map<std::string, std::int32_t> arrays_;
  std::map<std::string, Bits> counters_;
  std::map<std::string, std::int64_t> counterWidths_;
  int tempCount_ = 0;
  std::int32_t curLeaf_ = -1;
};

}  // namespace

AsmProgram lower(const SourceProgram& program) { return Lowerer(program).run(); }

std::vector<LineNo> successors(const AsmProgram& program, LineNo l) {
  const AsmLine& line = program.line(l);
  switch (line.op) {
    case Op::GOTO: return {line.target};
    case Op::BRIF: return {line.target, line.targetFalse};
    case Op::HALT: return {l};
    case Op::IDLE: return {l, line.target};
    default: return {l + 1};
  }
}

void validateAsm(const AsmProgram& program) {
  const std::int64_t n = static_cast<std::int64_t>(program.lines.size());
  if (n == 0) internalError("empty program");
  std::set<BitId> inputs(program.inputBits.begin(), program.inputBits.end());
  for (std::int64_t i = 0; i < n; ++i) {
    const AsmLine& l = program.lines[i];
    if (l.label != i + 1) internalError("line labels are not dense");
    if (l.op == Op::HALT && l.label != n) internalError("HALT is not the final line");
    for (LineNo t : successors(program, l.label)) {
      if (t < 1 || t > n) {
        internalError("branch target " + std::to_string(t) + " out of range at line " +
                      std::to_string(l.label));
      }
    }
    for (BitId wbit : program.writeSets[i]) {
      if (inputs.count(wbit)) {
        internalError("input bit written at line " + std::to_string(l.label));
      }
    }
  }
  if (program.lines.back().op != Op::HALT) internalError("final line is not HALT");
  int halts = 0;
  for (const auto& l : program.lines) halts += l.op == Op::HALT;
  if (halts != 1) internalError("expected exactly one HALT");
}

std::string listing(const AsmProgram& program, const std::vector<std::string>& blockNames) {
  std::string out;
  auto bit = [&](BitId id) { return program.bits[id].display(); };
  auto bitList = [&](const std::vector<BitId>& ids) {
    std::string s = "[";
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) s += ",";
      s += bit(ids[i]);
    }
    return s + "]";
  };
  for (const AsmLine& l : program.lines) {
    out += "l" + std::to_string(l.label) + ": " + opName(l.op);
    switch (l.op) {
      case Op::BCONST:
        out += " " + bit(l.dst) + ", " + std::to_string(l.constVal);
        break;
      case Op::BCOPY:
      case Op::BNOT:
        out += " " + bit(l.dst) + ", " + bit(l.a);
        break;
      case Op::BAND:
      case Op::BOR:
      case Op::BXOR:
        out += " " + bit(l.dst) + ", " + bit(l.a) + ", " + bit(l.b);
        break;
      case Op::ALOAD:
        out += " " + bitList(l.dstBits) + ", " + program.arrays[l.array].name + "," +
               bitList(l.idxBits);
        break;
      case Op::ASTORE:
        out += " " + program.arrays[l.array].name + "," + bitList(l.idxBits) + ", " +
               bitList(l.srcBits);
        break;
      case Op::GOTO:
        out += " l" + std::to_string(l.target);
        break;
      case Op::BRIF:
        out += " " + bit(l.condBit) + ", l" + std::to_string(l.target) + ", l" +
               std::to_string(l.targetFalse);
        break;
      case Op::IDLE:
        out += " exit=l" + std::to_string(l.target);
        break;
      case Op::HALT:
        break;
    }
    std::size_t blk = static_cast<std::size_t>(l.block);
    out += " ; block=";
    out += (l.block >= 0 && blk < blockNames.size()) ? blockNames[blk]
                                                     : std::to_string(l.block);
    out += "\n";
  }
  return out;
}

}  // namespace spk
