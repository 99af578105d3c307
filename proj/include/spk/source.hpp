// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "spk/diag.hpp"

namespace spk {

// ---------------------------------------------------------------------------
// Compile-time count expressions: integer literals, parameter names, + - *.
// ---------------------------------------------------------------------------

struct CExpr;
using CExprPtr = std::shared_ptr<const CExpr>;

struct CExpr {
  enum class K { Lit, Param, Add, Sub, Mul };
  K k;
  std::int64_t lit = 0;
  std::string param;
  CExprPtr a, b;

  static CExprPtr mkLit(std::int64_t v);
  static CExprPtr mkParam(std::string name);
  static CExprPtr mkBin(K k, CExprPtr a, CExprPtr b);
};

using ParamMap = std::map<std::string, std::int64_t>;

// Evaluates under `params`; throws MissingParameter for free names.
std::int64_t evalCExpr(const CExpr& e, const ParamMap& params, SourceLoc loc = {});
std::string printCExpr(const CExpr& e);

// ---------------------------------------------------------------------------
// Types: bool, uint(w), array(scalar, length). No nested arrays.
// ---------------------------------------------------------------------------

struct ScalarType {
  bool isBool = true;
  CExprPtr width;              // uint only
  std::int64_t widthVal = -1;  // folded by resolve(); bools report width 1
  std::int64_t bits() const { return isBool ? 1 : widthVal; }
};

struct Type {
  bool isArray = false;
  ScalarType elem;
  CExprPtr length;              // array only
  std::int64_t lengthVal = -1;  // folded by resolve()
};

enum class DeclKind { Input, Output, Local };

struct Decl {
  DeclKind kind;
  std::string name;
  Type type;
  SourceLoc loc;
};

// ---------------------------------------------------------------------------
// Expressions and statements.
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

enum class ExprKind {
  BoolLit,  // bval
  IntLit,   // ival
  Var,      // name
  Index,    // name[a]
  Not,      // !a
  And,      // a & b
  Or,       // a | b
  Xor,      // a ^ b
  Add,      // a + b        (uint)
  Lt,       // a < b        (uint -> bool)
  Le,       // a <= b       (uint -> bool)
  Eq,       // a == b       (uint -> bool)
};

struct Expr {
  ExprKind k;
  bool bval = false;
  std::uint64_t ival = 0;
  std::string name;
  ExprPtr a, b;
  SourceLoc loc;
  // Filled by the resolve-time type checker.
  bool isBool = false;
  std::int64_t width = 0;  // uint width; 1 for bool
};

struct Stmt;
using StmtPtr = std::shared_ptr<Stmt>;

enum class StmtKind { Assign, If, For, Halt };

struct Stmt {
  StmtKind k;
  SourceLoc loc;
  // Assign
  std::string lvName;
  ExprPtr lvIndex;  // null for scalar lvalues
  ExprPtr rhs;
  // If
  ExprPtr cond;
  std::vector<StmtPtr> thenS;
  std::vector<StmtPtr> elseS;
  // For
  std::string counter;
  CExprPtr count;
  std::int64_t countVal = -1;  // folded by resolve()
  std::vector<StmtPtr> body;
  // Halt
  std::vector<std::string> haltArgs;
};

struct SourceProgram {
  std::vector<Decl> decls;  // declaration order
  std::vector<StmtPtr> stmts;
  bool resolved = false;

  const Decl* findDecl(const std::string& name) const;
};

// Loop counter registers hold values 0..M, so they need ceil(log2(M+1)) bits.
std::int64_t counterWidth(std::int64_t maxIter);

}  // namespace spk
