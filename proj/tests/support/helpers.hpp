// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "spk/interp.hpp"
#include "spk/parser.hpp"

namespace spktest {

struct Compiled {
  spk::SourceProgram source;
  spk::AsmProgram prog;
  spk::SbTree tree;
};

inline Compiled compile(const std::string& src, const std::string& params = "") {
  Compiled c;
  c.source = spk::resolve(spk::parseSource(src), spk::parseParams(params));
  c.prog = spk::lower(c.source);
  c.tree = spk::buildSbTree(c.prog);
  return c;
}

inline std::vector<std::uint8_t> bits(const std::string& s) {
  std::vector<std::uint8_t> out;
  for (char ch : s) out.push_back(ch == '1');
  return out;
}

inline std::vector<std::uint8_t> bitsOf(std::int64_t v, int width) {
  std::vector<std::uint8_t> out;
  for (int k = 0; k < width; ++k) out.push_back((v >> k) & 1);
  return out;
}

inline std::int64_t uintOf(const std::vector<std::uint8_t>& bits) {
  std::int64_t v = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) v |= std::int64_t(bits[k] & 1) << k;
  return v;
}

// Two-pass greedy reference for the makespan benchmark: pass 1 first-fits
// onto machine 1 under cap = 2^W - 1, pass 2 least-loaded between machines
// 2 and 3; result is the maximum load.
inline std::int64_t refMakespan(const std::vector<std::int64_t>& weights, std::int64_t wbits) {
  std::int64_t cap = (std::int64_t(1) << wbits) - 1;
  std::int64_t l1 = 0, l2 = 0, l3 = 0;
  std::vector<bool> taken(weights.size(), false);
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (l1 + weights[j] <= cap) {
      l1 += weights[j];
      taken[j] = true;
    }
  }
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (!taken[j]) {
      if (l2 <= l3) l2 += weights[j];
      else l3 += weights[j];
    }
  }
  return std::max(l1, std::max(l2, l3));
}

// Textbook Prim for reference (complete graph, full matrix).
inline std::int64_t refPrim(const std::vector<std::vector<std::int64_t>>& w) {
  std::size_t n = w.size();
  std::vector<bool> inTree(n, false);
  std::vector<std::int64_t> key(n, INT64_MAX);
  inTree[0] = true;
  for (std::size_t v = 1; v < n; ++v) key[v] = w[0][v];
  std::int64_t total = 0;
  for (std::size_t it = 0; it + 1 < n; ++it) {
    std::size_t best = 0;
    std::int64_t bestKey = INT64_MAX;
    for (std::size_t v = 0; v < n; ++v) {
      if (!inTree[v] && key[v] < bestKey) {
        bestKey = key[v];
        best = v;
      }
    }
    inTree[best] = true;
    total += bestKey;
    for (std::size_t v = 0; v < n; ++v) {
      if (!inTree[v] && w[best][v] < key[v]) key[v] = w[best][v];
    }
  }
  return total;
}

}  // namespace spktest
