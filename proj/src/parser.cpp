// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "spk/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>

namespace spk {
namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
  Ident, Int,
  KwInput, KwOutput, KwLocal, KwBool, KwUint, KwArray,
  KwFor, KwIn, KwIf, KwElse, KwHalt, KwTrue, KwFalse,
  Semi, Colon, Comma, LParen, RParen, LBracket, RBracket, LBrace, RBrace,
  Assign,  // :=
  Plus, Minus, Star,
  Lt, Le, EqEq,
  Amp, Pipe, Caret, Bang,
  End,
};

struct Token {
  Tok t;
  std::string text;
  std::uint64_t ival = 0;
  SourceLoc loc;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skipSpace();
      SourceLoc loc{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", 0, loc});
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::string id;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          id += advance();
        }
        out.push_back({keyword(id), id, 0, loc});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::uint64_t v = 0;
        std::string text;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          char d = advance();
          text += d;
          if (v > (UINT64_MAX - 9) / 10) {
            throw CompileError(ErrKind::Syntax, "integer literal too large", loc);
          }
          v = v * 10 + static_cast<std::uint64_t>(d - '0');
        }
        out.push_back({Tok::Int, text, v, loc});
        continue;
      }
      switch (c) {
        case ';': advance(); out.push_back({Tok::Semi, ";", 0, loc}); break;
        case ',': advance(); out.push_back({Tok::Comma, ",", 0, loc}); break;
        case '(': advance(); out.push_back({Tok::LParen, "(", 0, loc}); break;
        case ')': advance(); out.push_back({Tok::RParen, ")", 0, loc}); break;
        case '[': advance(); out.push_back({Tok::LBracket, "[", 0, loc}); break;
        case ']': advance(); out.push_back({Tok::RBracket, "]", 0, loc}); break;
        case '{': advance(); out.push_back({Tok::LBrace, "{", 0, loc}); break;
        case '}': advance(); out.push_back({Tok::RBrace, "}", 0, loc}); break;
        case '+': advance(); out.push_back({Tok::Plus, "+", 0, loc}); break;
        case '-': advance(); out.push_back({Tok::Minus, "-", 0, loc}); break;
        case '*': advance(); out.push_back({Tok::Star, "*", 0, loc}); break;
        case '&': advance(); out.push_back({Tok::Amp, "&", 0, loc}); break;
        case '|': advance(); out.push_back({Tok::Pipe, "|", 0, loc}); break;
        case '^': advance(); out.push_back({Tok::Caret, "^", 0, loc}); break;
        case '!': advance(); out.push_back({Tok::Bang, "!", 0, loc}); break;
        case ':':
          advance();
          if (pos_ < src_.size() && src_[pos_] == '=') {
            advance();
            out.push_back({Tok::Assign, ":=", 0, loc});
          } else {
            out.push_back({Tok::Colon, ":", 0, loc});
          }
          break;
        case '<':
          advance();
          if (pos_ < src_.size() && src_[pos_] == '=') {
            advance();
            out.push_back({Tok::Le, "<=", 0, loc});
          } else {
            out.push_back({Tok::Lt, "<", 0, loc});
          }
          break;
        case '=':
          advance();
          if (pos_ < src_.size() && src_[pos_] == '=') {
            advance();
            out.push_back({Tok::EqEq, "==", 0, loc});
          } else {
            throw CompileError(ErrKind::Syntax, "'=' is not an operator; use ':=' or '=='", loc);
          }
          break;
        default:
          throw CompileError(ErrKind::Syntax, std::string("unexpected character '") + c + "'", loc);
      }
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skipSpace() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  static Tok keyword(const std::string& id) {
    if (id == "input") return Tok::KwInput;
    if (id == "output") return Tok::KwOutput;
    if (id == "local") return Tok::KwLocal;
    if (id == "bool") return Tok::KwBool;
    if (id == "uint") return Tok::KwUint;
    if (id == "array") return Tok::KwArray;
    if (id == "for") return Tok::KwFor;
    if (id == "in") return Tok::KwIn;
    if (id == "if") return Tok::KwIf;
    if (id == "else") return Tok::KwElse;
    if (id == "halt") return Tok::KwHalt;
    if (id == "true") return Tok::KwTrue;
    if (id == "false") return Tok::KwFalse;
    return Tok::Ident;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  SourceProgram run() {
    SourceProgram p;
    while (peek().t == Tok::KwInput || peek().t == Tok::KwOutput || peek().t == Tok::KwLocal) {
      p.decls.push_back(parseDecl());
    }
    while (peek().t != Tok::End) {
      p.stmts.push_back(parseStmt());
    }
    return p;
  }

 private:
  const Token& peek(int ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  Token next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  Token expect(Tok t, const char* what) {
    if (peek().t != t) {
      throw CompileError(ErrKind::Syntax,
                         std::string("expected ") + what + ", found '" + describe(peek()) + "'",
                         peek().loc);
    }
    return next();
  }
  static std::string describe(const Token& tok) {
    return tok.t == Tok::End ? "end of input" : tok.text;
  }

  Decl parseDecl() {
    Token kw = next();
    DeclKind kind = kw.t == Tok::KwInput    ? DeclKind::Input
                    : kw.t == Tok::KwOutput ? DeclKind::Output
                                            : DeclKind::Local;
    Token name = expect(Tok::Ident, "identifier");
    expect(Tok::Colon, "':'");
    Type type = parseType();
    expect(Tok::Semi, "';'");
    return Decl{kind, name.text, type, kw.loc};
  }

  ScalarType parseScalarType() {
    if (peek().t == Tok::KwBool) {
      next();
      return ScalarType{true, nullptr, -1};
    }
    if (peek().t == Tok::KwUint) {
      next();
      expect(Tok::LParen, "'('");
      CExprPtr w = parseCExpr();
      expect(Tok::RParen, "')'");
      return ScalarType{false, w, -1};
    }
    throw CompileError(ErrKind::Syntax, "expected 'bool' or 'uint(w)'", peek().loc);
  }

  Type parseType() {
    if (peek().t == Tok::KwArray) {
      next();
      expect(Tok::LParen, "'('");
      ScalarType elem = parseScalarType();
      expect(Tok::Comma, "','");
      CExprPtr len = parseCExpr();
      expect(Tok::RParen, "')'");
      Type t;
      t.isArray = true;
      t.elem = elem;
      t.length = len;
      return t;
    }
    Type t;
    t.elem = parseScalarType();
    return t;
  }

  // Count expressions: + - * over literals and parameter names.
  CExprPtr parseCExpr() { return parseCAdd(); }
  CExprPtr parseCAdd() {
    CExprPtr e = parseCMul();
    while (peek().t == Tok::Plus || peek().t == Tok::Minus) {
      CExpr::K k = next().t == Tok::Plus ? CExpr::K::Add : CExpr::K::Sub;
      e = CExpr::mkBin(k, e, parseCMul());
    }
    return e;
  }
  CExprPtr parseCMul() {
    CExprPtr e = parseCPrimary();
    while (peek().t == Tok::Star) {
      next();
      e = CExpr::mkBin(CExpr::K::Mul, e, parseCPrimary());
    }
    return e;
  }
  CExprPtr parseCPrimary() {
    if (peek().t == Tok::Int) {
      Token t = next();
      return CExpr::mkLit(static_cast<std::int64_t>(t.ival));
    }
    if (peek().t == Tok::Ident) {
      Token t = next();
      return CExpr::mkParam(t.text);
    }
    if (peek().t == Tok::LParen) {
      next();
      CExprPtr e = parseCExpr();
      expect(Tok::RParen, "')'");
      return e;
    }
    throw CompileError(ErrKind::Syntax, "expected count expression", peek().loc);
  }

  StmtPtr parseStmt() {
    switch (peek().t) {
      case Tok::KwIf: return parseIf();
      case Tok::KwFor: return parseFor();
      case Tok::KwHalt: return parseHalt();
      case Tok::Ident: return parseAssign();
      default:
        throw CompileError(ErrKind::Syntax,
                           "expected statement, found '" + describe(peek()) + "'", peek().loc);
    }
  }

  StmtPtr parseAssign() {
    auto s = std::make_shared<Stmt>();
    s->k = StmtKind::Assign;
    Token name = expect(Tok::Ident, "identifier");
    s->loc = name.loc;
    s->lvName = name.text;
    if (peek().t == Tok::LBracket) {
      next();
      s->lvIndex = parseExpr();
      expect(Tok::RBracket, "']'");
    }
    expect(Tok::Assign, "':='");
    s->rhs = parseExpr();
    expect(Tok::Semi, "';'");
    return s;
  }

  StmtPtr parseIf() {
    auto s = std::make_shared<Stmt>();
    s->k = StmtKind::If;
    s->loc = next().loc;  // 'if'
    s->cond = parseExpr();
    expect(Tok::LBrace, "'{'");
    while (peek().t != Tok::RBrace) s->thenS.push_back(parseStmt());
    next();  // '}'
    if (peek().t == Tok::KwElse) {
      next();
      expect(Tok::LBrace, "'{'");
      while (peek().t != Tok::RBrace) s->elseS.push_back(parseStmt());
      next();
    }
    return s;
  }

  StmtPtr parseFor() {
    auto s = std::make_shared<Stmt>();
    s->k = StmtKind::For;
    s->loc = next().loc;  // 'for'
    Token counter = expect(Tok::Ident, "loop counter");
    s->counter = counter.text;
    if (peek().t != Tok::KwIn) {
      throw CompileError(ErrKind::Syntax,
                         "loop '" + s->counter + "' is missing its iteration-count expression",
                         peek().loc);
    }
    next();
    s->count = parseCExpr();
    expect(Tok::LBrace, "'{'");
    while (peek().t != Tok::RBrace) s->body.push_back(parseStmt());
    next();
    return s;
  }

  StmtPtr parseHalt() {
    auto s = std::make_shared<Stmt>();
    s->k = StmtKind::Halt;
    s->loc = next().loc;  // 'halt'
    expect(Tok::LParen, "'('");
    if (peek().t != Tok::RParen) {
      s->haltArgs.push_back(expect(Tok::Ident, "output name").text);
      while (peek().t == Tok::Comma) {
        next();
        s->haltArgs.push_back(expect(Tok::Ident, "output name").text);
      }
    }
    expect(Tok::RParen, "')'");
    expect(Tok::Semi, "';'");
    return s;
  }

  // Runtime expressions. Precedence: ! > + > (< <= ==) > & > ^ > |.
  ExprPtr parseExpr() { return parseOr(); }
  ExprPtr mkBin(ExprKind k, ExprPtr a, ExprPtr b, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->k = k;
    e->a = std::move(a);
    e->b = std::move(b);
    e->loc = loc;
    return e;
  }
  ExprPtr parseOr() {
    ExprPtr e = parseXor();
    while (peek().t == Tok::Pipe) {
      SourceLoc loc = next().loc;
      e = mkBin(ExprKind::Or, e, parseXor(), loc);
    }
    return e;
  }
  ExprPtr parseXor() {
    ExprPtr e = parseAnd();
    while (peek().t == Tok::Caret) {
      SourceLoc loc = next().loc;
      e = mkBin(ExprKind::Xor, e, parseAnd(), loc);
    }
    return e;
  }
  ExprPtr parseAnd() {
    ExprPtr e = parseCmp();
    while (peek().t == Tok::Amp) {
      SourceLoc loc = next().loc;
      e = mkBin(ExprKind::And, e, parseCmp(), loc);
    }
    return e;
  }
  ExprPtr parseCmp() {
    ExprPtr e = parseAdd();
    if (peek().t == Tok::Lt || peek().t == Tok::Le || peek().t == Tok::EqEq) {
      Token op = next();
      ExprKind k = op.t == Tok::Lt ? ExprKind::Lt : op.t == Tok::Le ? ExprKind::Le : ExprKind::Eq;
      e = mkBin(k, e, parseAdd(), op.loc);
    }
    return e;
  }
  ExprPtr parseAdd() {
    ExprPtr e = parseUnary();
    while (peek().t == Tok::Plus) {
      SourceLoc loc = next().loc;
      e = mkBin(ExprKind::Add, e, parseUnary(), loc);
    }
    return e;
  }
  ExprPtr parseUnary() {
    if (peek().t == Tok::Bang) {
      SourceLoc loc = next().loc;
      auto e = std::make_shared<Expr>();
      e->k = ExprKind::Not;
      e->a = parseUnary();
      e->loc = loc;
      return e;
    }
    return parsePrimary();
  }
  ExprPtr parsePrimary() {
    Token tok = peek();
    switch (tok.t) {
      case Tok::KwTrue:
      case Tok::KwFalse: {
        next();
        auto e = std::make_shared<Expr>();
        e->k = ExprKind::BoolLit;
        e->bval = tok.t == Tok::KwTrue;
        e->loc = tok.loc;
        return e;
      }
      case Tok::Int: {
        next();
        auto e = std::make_shared<Expr>();
        e->k = ExprKind::IntLit;
        e->ival = tok.ival;
        e->loc = tok.loc;
        return e;
      }
      case Tok::Ident: {
        next();
        if (peek().t == Tok::LBracket) {
          next();
          auto e = std::make_shared<Expr>();
          e->k = ExprKind::Index;
          e->name = tok.text;
          e->a = parseExpr();
          e->loc = tok.loc;
          expect(Tok::RBracket, "']'");
          return e;
        }
        auto e = std::make_shared<Expr>();
        e->k = ExprKind::Var;
        e->name = tok.text;
        e->loc = tok.loc;
        return e;
      }
      case Tok::LParen: {
        next();
        ExprPtr e = parseExpr();
        expect(Tok::RParen, "')'");
        return e;
      }
      default:
        throw CompileError(ErrKind::Syntax,
                           "expected expression, found '" + describe(tok) + "'", tok.loc);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Structural validation (no parameter values needed).
// ---------------------------------------------------------------------------

struct Scope {
  const SourceProgram& p;
  std::vector<std::string> counters;

  bool isCounter(const std::string& name) const {
    return std::find(counters.begin(), counters.end(), name) != counters.end();
  }
};

void checkExprStructure(const Expr& e, Scope& scope) {
  switch (e.k) {
    case ExprKind::BoolLit:
    case ExprKind::IntLit:
      return;
    case ExprKind::Var: {
      if (scope.isCounter(e.name)) return;
      const Decl* d = scope.p.findDecl(e.name);
      if (!d) {
        throw CompileError(ErrKind::UndeclaredIdentifier, "'" + e.name + "'", e.loc);
      }
      if (d->type.isArray) {
        throw CompileError(ErrKind::Type, "array '" + e.name + "' used without an index", e.loc);
      }
      return;
    }
    case ExprKind::Index: {
      const Decl* d = scope.p.findDecl(e.name);
      if (!d) {
        throw CompileError(ErrKind::UndeclaredIdentifier, "'" + e.name + "'", e.loc);
      }
      if (!d->type.isArray) {
        throw CompileError(ErrKind::Type, "'" + e.name + "' is not an array", e.loc);
      }
      checkExprStructure(*e.a, scope);
      return;
    }
    case ExprKind::Not:
      checkExprStructure(*e.a, scope);
      return;
    default:
      checkExprStructure(*e.a, scope);
      checkExprStructure(*e.b, scope);
      return;
  }
}

void checkStmtsStructure(const std::vector<StmtPtr>& stmts, Scope& scope, bool topLevel,
                         int* haltCount);

void checkStmtStructure(const Stmt& s, Scope& scope, int* haltCount) {
  switch (s.k) {
    case StmtKind::Assign: {
      if (scope.isCounter(s.lvName)) {
        throw CompileError(ErrKind::Type, "loop counter '" + s.lvName + "' is not assignable", s.loc);
      }
      const Decl* d = scope.p.findDecl(s.lvName);
      if (!d) throw CompileError(ErrKind::UndeclaredIdentifier, "'" + s.lvName + "'", s.loc);
      if (d->kind == DeclKind::Input) {
        throw CompileError(ErrKind::InputAssigned, "input '" + s.lvName + "' cannot be assigned", s.loc);
      }
      if (d->type.isArray && !s.lvIndex) {
        throw CompileError(ErrKind::Type, "array '" + s.lvName + "' assigned without an index", s.loc);
      }
      if (!d->type.isArray && s.lvIndex) {
        throw CompileError(ErrKind::Type, "'" + s.lvName + "' is not an array", s.loc);
      }
      if (s.lvIndex) checkExprStructure(*s.lvIndex, scope);
      checkExprStructure(*s.rhs, scope);
      return;
    }
    case StmtKind::If: {
      checkExprStructure(*s.cond, scope);
      checkStmtsStructure(s.thenS, scope, false, haltCount);
      checkStmtsStructure(s.elseS, scope, false, haltCount);
      return;
    }
    case StmtKind::For: {
      if (scope.p.findDecl(s.counter)) {
        throw CompileError(ErrKind::DuplicateDeclaration,
                           "loop counter '" + s.counter + "' shadows a declaration", s.loc);
      }
      if (scope.isCounter(s.counter)) {
        throw CompileError(ErrKind::DuplicateDeclaration,
                           "loop counter '" + s.counter + "' shadows an enclosing counter", s.loc);
      }
      scope.counters.push_back(s.counter);
      checkStmtsStructure(s.body, scope, false, haltCount);
      scope.counters.pop_back();
      return;
    }
    case StmtKind::Halt:
      ++*haltCount;
      return;
  }
}

void checkStmtsStructure(const std::vector<StmtPtr>& stmts, Scope& scope, bool topLevel,
                         int* haltCount) {
  for (const auto& s : stmts) {
    if (s->k == StmtKind::Halt && !topLevel) {
      throw CompileError(ErrKind::BadHalt, "halt must be a top-level statement", s->loc);
    }
    checkStmtStructure(*s, scope, haltCount);
  }
}

void validateStructure(const SourceProgram& p) {
  std::set<std::string> names;
  for (const auto& d : p.decls) {
    if (!names.insert(d.name).second) {
      throw CompileError(ErrKind::DuplicateDeclaration, "'" + d.name + "'", d.loc);
    }
  }
  Scope scope{p, {}};
  int haltCount = 0;
  checkStmtsStructure(p.stmts, scope, true, &haltCount);
  if (haltCount == 0 || p.stmts.empty() || p.stmts.back()->k != StmtKind::Halt) {
    throw CompileError(ErrKind::MissingHalt, "program has no final halt statement");
  }
  if (haltCount > 1) {
    throw CompileError(ErrKind::BadHalt, "program has more than one halt statement");
  }
}

// ---------------------------------------------------------------------------
// Resolution: fold count expressions and complete width-level type checking.
// ---------------------------------------------------------------------------

struct TypeChecker {
  const SourceProgram& p;
  std::map<std::string, std::int64_t> counterWidths;  // name -> width (in scope)

  // Returns (isBool, width) and annotates the expression.
  // `ctxWidth` gives integer literals their width; 0 means "no context".
  void check(Expr& e, std::int64_t ctxWidth) {
    switch (e.k) {
      case ExprKind::BoolLit:
        e.isBool = true;
        e.width = 1;
        return;
      case ExprKind::IntLit: {
        if (ctxWidth <= 0) {
          throw CompileError(ErrKind::Type,
                             "integer literal needs a uint context to take its width from", e.loc);
        }
        if (ctxWidth < 64 && e.ival >> ctxWidth) {
          throw CompileError(ErrKind::Type,
                             "literal " + std::to_string(e.ival) + " does not fit in uint(" +
                                 std::to_string(ctxWidth) + ")",
                             e.loc);
        }
        e.isBool = false;
        e.width = ctxWidth;
        return;
      }
      case ExprKind::Var: {
        auto it = counterWidths.find(e.name);
        if (it != counterWidths.end()) {
          e.isBool = false;
          e.width = it->second;
          return;
        }
        const Decl* d = p.findDecl(e.name);
        e.isBool = d->type.elem.isBool;
        e.width = d->type.elem.bits();
        return;
      }
      case ExprKind::Index: {
        const Decl* d = p.findDecl(e.name);
        checkIndexExpr(*e.a, *d, e.loc);
        e.isBool = d->type.elem.isBool;
        e.width = d->type.elem.bits();
        return;
      }
      case ExprKind::Not:
        check(*e.a, 0);
        if (!e.a->isBool) {
          throw CompileError(ErrKind::Type, "'!' needs a bool operand", e.loc);
        }
        e.isBool = true;
        e.width = 1;
        return;
      case ExprKind::And:
      case ExprKind::Or:
      case ExprKind::Xor: {
        check(*e.a, 0);
        check(*e.b, 0);
        if (!e.a->isBool || !e.b->isBool) {
          throw CompileError(ErrKind::Type, "boolean operator needs bool operands", e.loc);
        }
        e.isBool = true;
        e.width = 1;
        return;
      }
      case ExprKind::Add:
      case ExprKind::Lt:
      case ExprKind::Le:
      case ExprKind::Eq: {
        checkUintPair(e);
        e.isBool = e.k != ExprKind::Add;
        e.width = e.isBool ? 1 : e.a->width;
        return;
      }
    }
  }

  // Equal-width rule for uint operators; literals adapt to the other side.
  void checkUintPair(Expr& e) {
    Expr& a = *e.a;
    Expr& b = *e.b;
    if (a.k == ExprKind::IntLit && b.k == ExprKind::IntLit) {
      throw CompileError(ErrKind::Type, "at least one operand must be a typed uint", e.loc);
    }
    if (a.k == ExprKind::IntLit) {
      check(b, 0);
      if (b.isBool) throw CompileError(ErrKind::Type, "uint operator applied to bool", e.loc);
      check(a, b.width);
      return;
    }
    if (b.k == ExprKind::IntLit) {
      check(a, 0);
      if (a.isBool) throw CompileError(ErrKind::Type, "uint operator applied to bool", e.loc);
      check(b, a.width);
      return;
    }
    check(a, 0);
    check(b, 0);
    if (a.isBool || b.isBool) {
      throw CompileError(ErrKind::Type, "uint operator applied to bool", e.loc);
    }
    if (a.width != b.width) {
      throw CompileError(ErrKind::Type,
                         "width mismatch: uint(" + std::to_string(a.width) + ") vs uint(" +
                             std::to_string(b.width) + ")",
                         e.loc);
    }
  }

  void checkIndexExpr(Expr& idx, const Decl& arr, SourceLoc loc) {
    if (idx.k == ExprKind::IntLit) {
      // Constant index: bounds-checked here, no runtime width needed.
      if (static_cast<std::int64_t>(idx.ival) >= arr.type.lengthVal) {
        throw CompileError(ErrKind::Type,
                           "index " + std::to_string(idx.ival) + " out of bounds for '" +
                               arr.name + "' of length " + std::to_string(arr.type.lengthVal),
                           loc);
      }
      idx.isBool = false;
      idx.width = std::max<std::int64_t>(1, counterWidth(arr.type.lengthVal - 1));
      return;
    }
    check(idx, 0);
    if (idx.isBool) {
      throw CompileError(ErrKind::Type, "array index must be a uint", loc);
    }
  }

  void checkStmts(std::vector<StmtPtr>& stmts, const ParamMap& params) {
    for (auto& sp : stmts) checkStmt(*sp, params);
  }

  void checkStmt(Stmt& s, const ParamMap& params) {
    switch (s.k) {
      case StmtKind::Assign: {
        const Decl* d = p.findDecl(s.lvName);
        std::int64_t lvWidth = d->type.elem.bits();
        bool lvBool = d->type.elem.isBool;
        if (s.lvIndex) checkIndexExpr(*s.lvIndex, *d, s.loc);
        // Integer literal right-hand sides take the destination width.
        check(*s.rhs, lvBool ? 0 : lvWidth);
        if (lvBool != s.rhs->isBool) {
          throw CompileError(ErrKind::Type, "assignment mixes bool and uint", s.loc);
        }
        // Narrow-to-wide assignment zero-extends; wide-to-narrow is an error.
        if (!lvBool && s.rhs->width > lvWidth) {
          throw CompileError(ErrKind::Type,
                             "cannot assign uint(" + std::to_string(s.rhs->width) + ") to uint(" +
                                 std::to_string(lvWidth) + ")",
                             s.loc);
        }
        return;
      }
      case StmtKind::If: {
        check(*s.cond, 0);
        if (!s.cond->isBool) {
          throw CompileError(ErrKind::Type, "if condition must be bool", s.loc);
        }
        checkStmts(s.thenS, params);
        checkStmts(s.elseS, params);
        return;
      }
      case StmtKind::For: {
        s.countVal = evalCExpr(*s.count, params, s.loc);
        if (s.countVal <= 0) {
          throw CompileError(ErrKind::NonPositiveCount,
                             "loop count " + printCExpr(*s.count) + " = " +
                                 std::to_string(s.countVal),
                             s.loc);
        }
        std::int64_t w = counterWidth(s.countVal);
        counterWidths[s.counter] = w;
        checkStmts(s.body, params);
        counterWidths.erase(s.counter);
        return;
      }
      case StmtKind::Halt: {
        std::vector<std::string> outputs;
        for (const auto& d : p.decls) {
          if (d.kind == DeclKind::Output) outputs.push_back(d.name);
        }
        if (s.haltArgs != outputs) {
          throw CompileError(ErrKind::BadHalt,
                             "halt arguments must be the declared outputs in declaration order",
                             s.loc);
        }
        return;
      }
    }
  }
};

ScalarType resolveScalar(const ScalarType& st, const ParamMap& params, SourceLoc loc) {
  ScalarType out = st;
  if (!st.isBool) {
    out.widthVal = evalCExpr(*st.width, params, loc);
    if (out.widthVal < 1 || out.widthVal > 62) {
      throw CompileError(ErrKind::WidthOutOfRange,
                         "bit width " + std::to_string(out.widthVal) + " not in [1, 62]", loc);
    }
    out.width = CExpr::mkLit(out.widthVal);
  }
  return out;
}

StmtPtr cloneStmt(const Stmt& s) {
  auto out = std::make_shared<Stmt>(s);
  auto cloneAll = [](const std::vector<StmtPtr>& v) {
    std::vector<StmtPtr> r;
    r.reserve(v.size());
    for (const auto& x : v) r.push_back(cloneStmt(*x));
    return r;
  };
  out->thenS = cloneAll(s.thenS);
  out->elseS = cloneAll(s.elseS);
  out->body = cloneAll(s.body);
  // Expression subtrees are shared pointers inside Expr; deep-copy them so
  // resolve() never mutates its input.
  struct Deep {
    static ExprPtr copy(const ExprPtr& e) {
      if (!e) return nullptr;
      auto r = std::make_shared<Expr>(*e);
      r->a = copy(e->a);
      r->b = copy(e->b);
      return r;
    }
  };
  out->lvIndex = Deep::copy(out->lvIndex);
  out->rhs = Deep::copy(out->rhs);
  out->cond = Deep::copy(out->cond);
  return out;
}

void foldCounts(std::vector<StmtPtr>& stmts, const ParamMap& params) {
  for (auto& s : stmts) {
    if (s->k == StmtKind::For) {
      s->countVal = evalCExpr(*s->count, params, s->loc);
      s->count = CExpr::mkLit(s->countVal);
      foldCounts(s->body, params);
    } else if (s->k == StmtKind::If) {
      foldCounts(s->thenS, params);
      foldCounts(s->elseS, params);
    }
  }
}

}  // namespace

SourceProgram parseSource(std::string_view text) {
  Lexer lex(text);
  Parser parser(lex.run());
  SourceProgram p = parser.run();
  validateStructure(p);
  return p;
}

ParamMap parseParams(std::string_view text) {
  ParamMap out;
  int lineNo = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    ++lineNo;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    std::string clean;
    for (char c : line) {
      if (c == '#') break;
      clean += c;
    }
    auto notSpace = [](char c) { return !std::isspace(static_cast<unsigned char>(c)); };
    auto first = std::find_if(clean.begin(), clean.end(), notSpace);
    if (first == clean.end()) continue;  // blank
    auto eq = std::find(clean.begin(), clean.end(), '=');
    if (eq == clean.end()) {
      throw CompileError(ErrKind::MalformedParameter, "expected 'name = value'",
                         SourceLoc{lineNo, 1});
    }
    std::string name(first, eq);
    while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
    std::string value(eq + 1, clean.end());
    std::size_t vb = 0, ve = value.size();
    while (vb < ve && std::isspace(static_cast<unsigned char>(value[vb]))) ++vb;
    while (ve > vb && std::isspace(static_cast<unsigned char>(value[ve - 1]))) --ve;
    value = value.substr(vb, ve - vb);
    if (name.empty() || value.empty()) {
      throw CompileError(ErrKind::MalformedParameter, "expected 'name = value'",
                         SourceLoc{lineNo, 1});
    }
    for (char c : name) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') {
        throw CompileError(ErrKind::MalformedParameter, "bad parameter name '" + name + "'",
                           SourceLoc{lineNo, 1});
      }
    }
    std::int64_t v = 0;
    for (char c : value) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw CompileError(ErrKind::MalformedParameter,
                           "value of '" + name + "' is not a nonnegative integer",
                           SourceLoc{lineNo, 1});
      }
      v = v * 10 + (c - '0');
      if (v > (std::int64_t(1) << 62)) {
        throw CompileError(ErrKind::MalformedParameter, "value of '" + name + "' too large",
                           SourceLoc{lineNo, 1});
      }
    }
    if (!out.emplace(name, v).second) {
      throw CompileError(ErrKind::DuplicateParameter, "'" + name + "'", SourceLoc{lineNo, 1});
    }
  }
  return out;
}

SourceProgram resolve(const SourceProgram& program, const ParamMap& params) {
  SourceProgram out;
  out.resolved = true;
  for (const auto& d : program.decls) {
    Decl nd = d;
    nd.type.elem = resolveScalar(d.type.elem, params, d.loc);
    if (d.type.isArray) {
      nd.type.lengthVal = evalCExpr(*d.type.length, params, d.loc);
      if (nd.type.lengthVal < 1) {
        throw CompileError(ErrKind::ZeroLengthArray,
                           "array '" + d.name + "' has length " +
                               std::to_string(nd.type.lengthVal),
                           d.loc);
      }
      nd.type.length = CExpr::mkLit(nd.type.lengthVal);
    }
    out.decls.push_back(nd);
  }
  for (const auto& s : program.stmts) out.stmts.push_back(cloneStmt(*s));
  foldCounts(out.stmts, params);

  TypeChecker tc{out, {}};
  tc.checkStmts(out.stmts, params);
  return out;
}

// ---------------------------------------------------------------------------
// Pretty printer
// ---------------------------------------------------------------------------

namespace {

int exprPrec(ExprKind k) {
  switch (k) {
    case ExprKind::Or: return 1;
    case ExprKind::Xor: return 2;
    case ExprKind::And: return 3;
    case ExprKind::Lt:
    case ExprKind::Le:
    case ExprKind::Eq: return 4;
    case ExprKind::Add: return 5;
    case ExprKind::Not: return 6;
    default: return 7;
  }
}

void printExpr(const Expr& e, std::string& out, int parentPrec) {
  int prec = exprPrec(e.k);
  switch (e.k) {
    case ExprKind::BoolLit:
      out += e.bval ? "true" : "false";
      return;
    case ExprKind::IntLit:
      out += std::to_string(e.ival);
      return;
    case ExprKind::Var:
      out += e.name;
      return;
    case ExprKind::Index:
      out += e.name;
      out += '[';
      printExpr(*e.a, out, 0);
      out += ']';
      return;
    case ExprKind::Not:
      out += '!';
      printExpr(*e.a, out, prec);
      return;
    default: {
      const char* op = e.k == ExprKind::Or    ? " | "
                       : e.k == ExprKind::Xor ? " ^ "
                       : e.k == ExprKind::And ? " & "
                       : e.k == ExprKind::Lt  ? " < "
                       : e.k == ExprKind::Le  ? " <= "
                       : e.k == ExprKind::Eq  ? " == "
                                              : " + ";
      bool par = prec < parentPrec;
      if (par) out += '(';
      printExpr(*e.a, out, prec);
      out += op;
      printExpr(*e.b, out, prec + 1);
      if (par) out += ')';
      return;
    }
  }
}

void printType(const Type& t, std::string& out) {
  auto scalar = [&](const ScalarType& st) {
    if (st.isBool) {
      out += "bool";
    } else {
      out += "uint(";
      out += printCExpr(*st.width);
      out += ')';
    }
  };
  if (t.isArray) {
    out += "array(";
    scalar(t.elem);
    out += ", ";
    out += printCExpr(*t.length);
    out += ')';
  } else {
    scalar(t.elem);
  }
}

void printStmts(const std::vector<StmtPtr>& stmts, std::string& out, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  for (const auto& sp : stmts) {
    const Stmt& s = *sp;
    switch (s.k) {
      case StmtKind::Assign:
        out += pad;
        out += s.lvName;
        if (s.lvIndex) {
          out += '[';
          printExpr(*s.lvIndex, out, 0);
          out += ']';
        }
        out += " := ";
        printExpr(*s.rhs, out, 0);
        out += ";\n";
        break;
      case StmtKind::If:
        out += pad;
        out += "if ";
        printExpr(*s.cond, out, 0);
        out += " {\n";
        printStmts(s.thenS, out, indent + 1);
        out += pad;
        out += '}';
        if (!s.elseS.empty()) {
          out += " else {\n";
          printStmts(s.elseS, out, indent + 1);
          out += pad;
          out += '}';
        }
        out += '\n';
        break;
      case StmtKind::For:
        out += pad;
        out += "for ";
        out += s.counter;
        out += " in ";
        out += printCExpr(*s.count);
        out += " {\n";
        printStmts(s.body, out, indent + 1);
        out += pad;
        out += "}\n";
        break;
      case StmtKind::Halt:
        out += pad;
        out += "halt(";
        for (std::size_t i = 0; i < s.haltArgs.size(); ++i) {
          if (i) out += ", ";
          out += s.haltArgs[i];
        }
        out += ");\n";
        break;
    }
  }
}

}  // namespace

std::string prettyPrint(const SourceProgram& program) {
  std::string out;
  for (const auto& d : program.decls) {
    out += d.kind == DeclKind::Input    ? "input "
           : d.kind == DeclKind::Output ? "output "
                                        : "local ";
    out += d.name;
    out += " : ";
    printType(d.type, out);
    out += ";\n";
  }
  if (!program.decls.empty()) out += '\n';
  printStmts(program.stmts, out, 0);
  return out;
}

}  // namespace spk
