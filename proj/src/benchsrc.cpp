// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "spk/benchsrc.hpp"

#include "spk/source.hpp"

namespace spk {

namespace {

std::int64_t accWidth(std::int64_t count, std::int64_t wbits) {
  // Accumulated loads stay below count * (2^W - 1); one extra bit keeps the
  // in-loop additions overflow-free.
  return wbits + counterWidth(count) + 1;
}

}  // namespace

std::string makespanSource(std::int64_t m, std::int64_t wbits) {
  std::int64_t cap = (std::int64_t(1) << wbits) - 1;
  std::string s;
  s += "# makespan: m jobs on 3 machines, greedy two-pass assignment\n";
  s += "input w : array(uint(W), m);\n";
  s += "local taken : array(bool, m);\n";
  s += "local tr : bool;\n";
  s += "local wl : uint(L);\n";
  s += "local cap : uint(L);\n";
  s += "local s1 : uint(L);\n";
  s += "local load1 : uint(L);\n";
  s += "local load2 : uint(L);\n";
  s += "local load3 : uint(L);\n";
  s += "output mk : uint(L);\n";
  s += "\n";
  s += "tr := true;\n";
  s += "cap := " + std::to_string(cap) + ";\n";
  s += "for i in m {\n";
  s += "  wl := w[i];\n";
  s += "  s1 := load1 + wl;\n";
  s += "  if s1 <= cap {\n";
  s += "    load1 := s1;\n";
  s += "    taken[i] := tr;\n";
  s += "  }\n";
  s += "}\n";
  s += "for i2 in m {\n";
  s += "  wl := w[i2];\n";
  s += "  if !taken[i2] {\n";
  s += "    if load2 <= load3 {\n";
  s += "      load2 := load2 + wl;\n";
  s += "    } else {\n";
  s += "      load3 := load3 + wl;\n";
  s += "    }\n";
  s += "  }\n";
  s += "}\n";
  s += "mk := load1;\n";
  s += "if mk < load2 { mk := load2; }\n";
  s += "if mk < load3 { mk := load3; }\n";
  s += "halt(mk);\n";
  (void)m;
  return s;
}

std::string makespanParams(std::int64_t m, std::int64_t wbits) {
  std::string s;
  s += "# makespan size parameters\n";
  s += "m = " + std::to_string(m) + "\n";
  s += "W = " + std::to_string(wbits) + "\n";
  s += "L = " + std::to_string(accWidth(m, wbits)) + "\n";
  return s;
}

std::int64_t edgeIndex(std::int64_t n, std::int64_t i, std::int64_t j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

std::string mstSource(std::int64_t n, std::int64_t wbits) {
  std::int64_t kw = wbits + 1;
  std::int64_t inf = (std::int64_t(1) << kw) - 1;
  std::string s;
  s += "# minimum spanning tree: Prim over a complete graph, adjacency rows\n";
  s += "input ew : array(uint(W), E);\n";
  for (std::int64_t r = 0; r < n; ++r) {
    s += "local row" + std::to_string(r) + " : array(uint(K), n);\n";
  }
  s += "local key : array(uint(K), n);\n";
  s += "local intree : array(bool, n);\n";
  s += "local tr : bool;\n";
  s += "local tv : bool;\n";
  s += "local kv : uint(K);\n";
  s += "local wt : uint(K);\n";
  s += "local best : uint(K);\n";
  s += "local bl : uint(L);\n";
  s += "local bestv : uint(V);\n";
  s += "local u : uint(V);\n";
  s += "output total : uint(L);\n";
  s += "\n";
  s += "tr := true;\n";
  const std::string infLit = std::to_string(inf);
  for (std::int64_t r = 0; r < n; ++r) {
    std::string row = "row" + std::to_string(r);
    for (std::int64_t c = 0; c < n; ++c) {
      if (c == r) {
        s += row + "[" + std::to_string(c) + "] := " + infLit + ";\n";
      } else {
        s += row + "[" + std::to_string(c) + "] := ew[" +
             std::to_string(edgeIndex(n, r, c)) + "];\n";
      }
    }
  }
  s += "key[0] := " + infLit + ";\n";
  for (std::int64_t c = 1; c < n; ++c) {
    s += "key[" + std::to_string(c) + "] := ew[" + std::to_string(edgeIndex(n, 0, c)) + "];\n";
  }
  s += "intree[0] := tr;\n";
  s += "total := 0;\n";
  s += "for it in n - 1 {\n";
  s += "  best := " + infLit + ";\n";
  s += "  bestv := 0;\n";
  s += "  for v in n {\n";
  s += "    tv := intree[v];\n";
  s += "    kv := key[v];\n";
  s += "    if (!tv) & (kv < best) {\n";
  s += "      best := kv;\n";
  s += "      bestv := v;\n";
  s += "    }\n";
  s += "  }\n";
  s += "  bl := best;\n";
  s += "  total := total + bl;\n";
  s += "  u := bestv;\n";
  s += "  intree[u] := tr;\n";
  s += "  for v2 in n {\n";
  for (std::int64_t r = 0; r < n; ++r) {
    s += "    if u == " + std::to_string(r) + " { wt := row" + std::to_string(r) + "[v2]; }\n";
  }
  s += "    tv := intree[v2];\n";
  s += "    kv := key[v2];\n";
  s += "    if (!tv) & (wt < kv) {\n";
  s += "      key[v2] := wt;\n";
  s += "    }\n";
  s += "  }\n";
  s += "}\n";
  s += "halt(total);\n";
  return s;
}

std::string mstParams(std::int64_t n, std::int64_t wbits) {
  std::string s;
  s += "# mst size parameters\n";
  s += "n = " + std::to_string(n) + "\n";
  s += "W = " + std::to_string(wbits) + "\n";
  s += "K = " + std::to_string(wbits + 1) + "\n";
  s += "L = " + std::to_string(accWidth(n, wbits)) + "\n";
  s += "V = " + std::to_string(counterWidth(n)) + "\n";
  s += "E = " + std::to_string(n * (n - 1) / 2) + "\n";
  return s;
}

std::vector<std::uint8_t> packUints(const std::vector<std::int64_t>& values, std::int64_t width) {
  std::vector<std::uint8_t> bits;
  bits.reserve(values.size() * width);
  for (std::int64_t v : values) {
    for (std::int64_t k = 0; k < width; ++k) bits.push_back((v >> k) & 1);
  }
  return bits;
}

std::int64_t unpackUint(const std::vector<std::uint8_t>& bits, std::size_t offset,
                        std::int64_t width) {
  std::int64_t v = 0;
  for (std::int64_t k = 0; k < width; ++k) {
    v |= static_cast<std::int64_t>(bits[offset + k] & 1) << k;
  }
  return v;
}

}  // namespace spk
