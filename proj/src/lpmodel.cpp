// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "spk/lpmodel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace spk {

std::string LpModel::varName(std::int32_t v) const {
  const Var& d = vars[v];
  switch (d.kind) {
    case VarKind::Controller:
      return "s_l" + std::to_string(d.a) + "_t" + std::to_string(d.b);
    case VarKind::BitVersion:
      return "v_" + bitNames[d.a] + "_t" + std::to_string(d.b);
    case VarKind::Match:
      return "u_g" + std::to_string(d.a) + "_c" + std::to_string(d.b) + "_t" +
             std::to_string(d.c);
  }
  return "x" + std::to_string(v);
}

std::int64_t LpModel::findController(std::int32_t line, std::int64_t t) const {
  std::int64_t lo = ctrlBegin, hi = ctrlEnd;
  while (lo < hi) {
    std::int64_t mid = lo + (hi - lo) / 2;
    const Var& d = vars[mid];
    if (d.a < line || (d.a == line && d.b < t)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < ctrlEnd && vars[lo].a == line && vars[lo].b == t) return lo;
  return -1;
}

LpStats stats(const LpModel& model) {
  LpStats s;
  s.rows = model.rows();
  s.cols = model.cols();
  s.nonzeros = model.nonzeros();
  s.tb = model.tb;
  s.mode = model.mode;
  return s;
}

std::string statsJson(const LpStats& s) {
  return "{\"rows\":" + std::to_string(s.rows) + ",\"cols\":" + std::to_string(s.cols) +
         ",\"nonzeros\":" + std::to_string(s.nonzeros) + ",\"tb\":" + std::to_string(s.tb) +
         ",\"mode\":\"" + s.mode + "\"}";
}

FileSink::FileSink(const std::string& path) {
  f_ = std::fopen(path.c_str(), "wb");
  if (!f_) throw CompileError(ErrKind::Usage, "cannot open '" + path + "' for writing");
}

FileSink::~FileSink() { close(); }

void FileSink::close() {
  if (f_) {
    std::fclose(f_);
    f_ = nullptr;
  }
}

void FileSink::write(const char* data, std::size_t n) {
  if (std::fwrite(data, 1, n, f_) != n) {
    throw CompileError(ErrKind::Usage, "write failure");
  }
  bytes += n;
}

namespace {

// Buffered emitter with integer formatting via to_chars.
class Out {
 public:
  explicit Out(ByteSink& sink) : sink_(sink) { buf_.reserve(kFlush + 256); }
  ~Out() { flush(); }

  void str(std::string_view s) {
    buf_.append(s);
    maybeFlush();
  }
  void ch(char c) {
    buf_.push_back(c);
    maybeFlush();
  }
  void num(std::int64_t v) {
    char tmp[24];
    auto [p, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
    buf_.append(tmp, p - tmp);
    maybeFlush();
  }
  void flush() {
    if (!buf_.empty()) {
      sink_.write(buf_.data(), buf_.size());
      buf_.clear();
    }
  }

 private:
  static constexpr std::size_t kFlush = 1 << 20;
  void maybeFlush() {
    if (buf_.size() >= kFlush) flush();
  }
  ByteSink& sink_;
  std::string buf_;
};

void writeTerm(Out& out, const LpModel& model, std::int32_t var, std::int64_t coef) {
  if (coef >= 0) {
    out.str(" + ");
  } else {
    out.str(" - ");
    coef = -coef;
  }
  if (coef != 1) {
    out.num(coef);
    out.ch(' ');
  }
  out.str(model.varName(var));
}

}  // namespace

void writeLp(const LpModel& model, ByteSink& sink) {
  Out out(sink);
  out.str("\\ spkc ");
  out.str(model.mode);
  out.str(" tb=");
  out.num(model.tb);
  out.ch('\n');
  out.str(model.maximize ? "Maximize\n" : "Minimize\n");
  out.str(" obj:");
  {
    int perLine = 0;
    for (const auto& [var, coef] : model.objective) {
      writeTerm(out, model, var, coef);
      if (++perLine == 8) {
        out.str("\n     ");
        perLine = 0;
      }
    }
  }
  out.ch('\n');
  out.str("Subject To\n");
  const std::int64_t rows = model.rows();
  for (std::int64_t r = 0; r < rows; ++r) {
    out.str(" R");
    out.num(r);
    out.ch(':');
    int perLine = 0;
    for (std::uint64_t k = model.rowBegin[r]; k < model.rowBegin[r + 1]; ++k) {
      writeTerm(out, model, model.termVar[k], model.termCoef[k]);
      if (++perLine == 8 && k + 1 < model.rowBegin[r + 1]) {
        out.str("\n    ");
        perLine = 0;
      }
    }
    Rel rel = static_cast<Rel>(model.rowRel[r]);
    out.str(rel == Rel::Le ? " <= " : rel == Rel::Eq ? " = " : " >= ");
    out.num(model.rowRhs[r]);
    out.ch('\n');
  }
  out.str("Bounds\n");
  for (std::int64_t v = 0; v < model.cols(); ++v) {
    const LpModel::Var& d = model.vars[v];
    out.ch(' ');
    if (d.lo == d.hi) {
      out.str(model.varName(static_cast<std::int32_t>(v)));
      out.str(" = ");
      out.num(d.lo);
    } else {
      out.str(model.varName(static_cast<std::int32_t>(v)));
      out.str(" <= 1");
    }
    out.ch('\n');
  }
  out.str("End\n");
  out.flush();
}

void writeMps(const LpModel& model, ByteSink& sink) {
  Out out(sink);
  out.str("NAME spkc_");
  out.str(model.mode);
  out.ch('\n');
  out.str("ROWS\n");
  out.str(model.maximize ? " N obj\n" : " N obj\n");
  const std::int64_t rows = model.rows();
  for (std::int64_t r = 0; r < rows; ++r) {
    Rel rel = static_cast<Rel>(model.rowRel[r]);
    out.str(rel == Rel::Le ? " L R" : rel == Rel::Eq ? " E R" : " G R");
    out.num(r);
    out.ch('\n');
  }
  // Column-major ordering of the row terms.
  std::vector<std::uint64_t> perm(model.termVar.size());
  for (std::uint64_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::vector<std::int32_t> termRow(model.termVar.size());
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::uint64_t k = model.rowBegin[r]; k < model.rowBegin[r + 1]; ++k) {
      termRow[k] = static_cast<std::int32_t>(r);
    }
  }
  std::sort(perm.begin(), perm.end(), [&](std::uint64_t x, std::uint64_t y) {
    if (model.termVar[x] != model.termVar[y]) return model.termVar[x] < model.termVar[y];
    return termRow[x] < termRow[y];
  });
  std::vector<std::pair<std::int32_t, std::int32_t>> obj = model.objective;
  std::sort(obj.begin(), obj.end());
  out.str("COLUMNS\n");
  std::size_t oi = 0;
  std::int32_t prev = -1;
  std::string name;
  for (std::uint64_t pi = 0; pi < perm.size(); ++pi) {
    std::uint64_t k = perm[pi];
    std::int32_t v = model.termVar[k];
    if (v != prev) {
      // Objective entries for variables between prev and v.
      while (oi < obj.size() && obj[oi].first < v) ++oi;
      prev = v;
      name = model.varName(v);
      if (oi < obj.size() && obj[oi].first == v) {
        out.str(" ");
        out.str(name);
        out.str(" obj ");
        out.num(model.maximize ? -obj[oi].second : obj[oi].second);
        out.ch('\n');
      }
    }
    out.str(" ");
    out.str(name);
    out.str(" R");
    out.num(termRow[k]);
    out.ch(' ');
    out.num(model.termCoef[k]);
    out.ch('\n');
  }
  out.str("RHS\n");
  for (std::int64_t r = 0; r < rows; ++r) {
    if (model.rowRhs[r] != 0) {
      out.str(" rhs R");
      out.num(r);
      out.ch(' ');
      out.num(model.rowRhs[r]);
      out.ch('\n');
    }
  }
  out.str("BOUNDS\n");
  for (std::int64_t v = 0; v < model.cols(); ++v) {
    const LpModel::Var& d = model.vars[v];
    if (d.lo == d.hi) {
      out.str(" FX bnd ");
      out.str(model.varName(static_cast<std::int32_t>(v)));
      out.ch(' ');
      out.num(d.lo);
      out.ch('\n');
    } else {
      out.str(" UP bnd ");
      out.str(model.varName(static_cast<std::int32_t>(v)));
      out.str(" 1\n");
    }
  }
  out.str("ENDATA\n");
  out.flush();
}

}  // namespace spk
