// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "spk/source.hpp"

namespace spk {

CExprPtr CExpr::mkLit(std::int64_t v) {
  auto e = std::make_shared<CExpr>();
  e->k = K::Lit;
  e->lit = v;
  return e;
}

CExprPtr CExpr::mkParam(std::string name) {
  auto e = std::make_shared<CExpr>();
  e->k = K::Param;
  e->param = std::move(name);
  return e;
}

CExprPtr CExpr::mkBin(K k, CExprPtr a, CExprPtr b) {
  auto e = std::make_shared<CExpr>();
  e->k = k;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

std::int64_t evalCExpr(const CExpr& e, const ParamMap& params, SourceLoc loc) {
  switch (e.k) {
    case CExpr::K::Lit:
      return e.lit;
    case CExpr::K::Param: {
      auto it = params.find(e.param);
      if (it == params.end()) {
        throw CompileError(ErrKind::MissingParameter, "parameter '" + e.param + "' is not defined", loc);
      }
      return it->second;
    }
    case CExpr::K::Add:
      return evalCExpr(*e.a, params, loc) + evalCExpr(*e.b, params, loc);
    case CExpr::K::Sub:
      return evalCExpr(*e.a, params, loc) - evalCExpr(*e.b, params, loc);
    case CExpr::K::Mul:
      return evalCExpr(*e.a, params, loc) * evalCExpr(*e.b, params, loc);
  }
  internalError("bad count expression");
}

namespace {
int cexprPrec(CExpr::K k) {
  switch (k) {
    case CExpr::K::Add:
    case CExpr::K::Sub: return 1;
    case CExpr::K::Mul: return 2;
    default: return 3;
  }
}

void printCExprInto(const CExpr& e, std::string& out, int parentPrec) {
  int prec = cexprPrec(e.k);
  switch (e.k) {
    case CExpr::K::Lit:
      out += std::to_string(e.lit);
      return;
    case CExpr::K::Param:
      out += e.param;
      return;
    default: {
      bool par = prec < parentPrec;
      if (par) out += '(';
      printCExprInto(*e.a, out, prec);
      out += e.k == CExpr::K::Add ? " + " : e.k == CExpr::K::Sub ? " - " : " * ";
      printCExprInto(*e.b, out, prec + 1);  // left-assoc
      if (par) out += ')';
      return;
    }
  }
}
}  // namespace

std::string printCExpr(const CExpr& e) {
  std::string out;
  printCExprInto(e, out, 0);
  return out;
}

const Decl* SourceProgram::findDecl(const std::string& name) const {
  for (const auto& d : decls) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::int64_t counterWidth(std::int64_t maxIter) {
  std::int64_t w = 1;
  while ((std::int64_t(1) << w) <= maxIter) ++w;
  return w;
}

}  // namespace spk
