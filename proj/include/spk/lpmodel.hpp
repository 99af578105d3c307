// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spk/diag.hpp"

namespace spk {

enum class Rel : std::int8_t { Le, Eq, Ge };

enum class VarKind : std::uint8_t {
  Controller,  // s_l<l>_t<t>         a=line, b=t
  BitVersion,  // v_<bit>_t<t>        a=bit,  b=t
  Match,       // u_g<g>_c<cell>_t<t> a=group, b=cell, c=t
};

// Sparse LP over [0,1] variables. Row coefficients are small integers; the
// arena layout keeps multi-hundred-million-nonzero models within memory.
class LpModel {
 public:
  struct Var {
    VarKind kind;
    std::int32_t a = 0;
    std::int32_t b = 0;
    std::int32_t c = 0;
    std::int8_t lo = 0, hi = 1;
  };

  std::vector<Var> vars;
  std::vector<std::string> bitNames;  // mangled names for BitVersion vars

  std::vector<std::int32_t> termVar;
  std::vector<std::int8_t> termCoef;
  std::vector<std::uint64_t> rowBegin{0};
  std::vector<std::int8_t> rowRel;
  std::vector<std::int32_t> rowRhs;

  bool maximize = true;
  std::vector<std::pair<std::int32_t, std::int32_t>> objective;  // (var, coef)

  std::string mode;  // "uo" | "hsb"
  std::int64_t tb = 0;

  // Index-bit tuples per match group (Match vars reference groups by id).
  std::vector<std::vector<std::int32_t>> groupIdxBits;
  // Cumulative row count after each constraint family, in emission order.
  std::vector<std::pair<std::string, std::int64_t>> familyRows;

  // Row construction.
  void addTerm(std::int32_t var, std::int32_t coef) {
    termVar.push_back(var);
    termCoef.push_back(static_cast<std::int8_t>(coef));
  }
  void finishRow(Rel rel, std::int32_t rhs) {
    rowBegin.push_back(termVar.size());
    rowRel.push_back(static_cast<std::int8_t>(rel));
    rowRhs.push_back(rhs);
  }

  std::int64_t rows() const { return static_cast<std::int64_t>(rowRel.size()); }
  std::int64_t cols() const { return static_cast<std::int64_t>(vars.size()); }
  std::int64_t nonzeros() const { return static_cast<std::int64_t>(termVar.size()); }

  std::string varName(std::int32_t v) const;

  // Variable lookups; ids are dense and ordered (controllers line-major by
  // (line, t); versions by (bit, t); match vars by (group, t, cell)), so
  // binary search over the contiguous kind ranges applies. Returns -1 when
  // the variable does not exist in this model.
  std::int64_t findController(std::int32_t line, std::int64_t t) const;

  std::int64_t ctrlBegin = 0, ctrlEnd = 0;  // [begin, end) var-id range
};

struct LpStats {
  std::int64_t rows = 0, cols = 0, nonzeros = 0, tb = 0;
  std::string mode;
};

LpStats stats(const LpModel& model);
std::string statsJson(const LpStats& s);

// Byte sink for streamed emission (counting only, file, or in-memory).
class ByteSink {
 public:
  virtual ~ByteSink() = default;
  virtual void write(const char* data, std::size_t n) = 0;
  std::uint64_t bytes = 0;
};

class CountingSink : public ByteSink {
 public:
  void write(const char*, std::size_t n) override { bytes += n; }
};

class StringSink : public ByteSink {
 public:
  void write(const char* data, std::size_t n) override {
    out.append(data, n);
    bytes += n;
  }
  std::string out;
};

class FileSink : public ByteSink {
 public:
  explicit FileSink(const std::string& path);
  ~FileSink() override;
  void write(const char* data, std::size_t n) override;
  void close();

 private:
  std::FILE* f_ = nullptr;
};

// LP text format (normative): objective, `Subject To` with rows named R<k>,
// `Bounds` (every variable capped at 1; fixed variables as equalities),
// `End`. Byte-identical across runs on identical models.
void writeLp(const LpModel& model, ByteSink& sink);

// Optional MPS emission with identical naming.
void writeMps(const LpModel& model, ByteSink& sink);

}  // namespace spk
