// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "spk/brute.hpp"

#include <algorithm>
#include <numeric>

namespace spk {

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

}  // namespace

std::int64_t bruteMst(const std::vector<std::vector<std::int64_t>>& weights) {
  const int n = static_cast<int>(weights.size());
  if (n < 2) return 0;
  if (n > 6) throw CompileError(ErrKind::Usage, "bruteMst supports n <= 6");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  }
  const int m = static_cast<int>(edges.size());
  std::int64_t best = -1;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (__builtin_popcount(mask) != n - 1) continue;
    Dsu dsu(n);
    std::int64_t total = 0;
    int joined = 0;
    for (int e = 0; e < m; ++e) {
      if (!(mask & (1u << e))) continue;
      auto [i, j] = edges[e];
      if (dsu.unite(i, j)) ++joined;
      total += weights[i][j];
    }
    if (joined == n - 1 && (best < 0 || total < best)) best = total;
  }
  if (best < 0) internalError("no spanning tree found");
  return best;
}

std::vector<TimeInterval> enumerateEtis(const SbTree& tree, std::int32_t block) {
  std::vector<std::int64_t> bounds = tree.iterBounds(block);
  std::vector<TimeInterval> out;
  IterTuple J(bounds.size(), 1);
  while (true) {
    out.push_back(eti(tree, block, J));
    // Odometer increment, innermost digit fastest.
    std::size_t i = bounds.size();
    while (i > 0) {
      --i;
      if (J[i] < bounds[i]) {
        ++J[i];
        for (std::size_t k = i + 1; k < J.size(); ++k) J[k] = 1;
        break;
      }
      if (i == 0) return out;
    }
    if (bounds.empty()) return out;
  }
}

std::vector<TimeInterval> bruteUnion(const SbTree& tree, const std::vector<std::int32_t>& blocks,
                                     std::int64_t horizon) {
  std::vector<TimeInterval> all;
  {
    std::vector<std::int32_t> uniq = blocks;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (std::int32_t b : uniq) {
      auto ivs = enumerateEtis(tree, b);
      all.insert(all.end(), ivs.begin(), ivs.end());
    }
  }
  std::vector<TimeInterval> out;
  const TimeInterval* open = nullptr;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    // Among the intervals covering t (mutually exclusive branch blocks may
    // share steps), the longest one carries the union; block index breaks
    // ties. Mirrors the generator's choice rule.
    const TimeInterval* cover = nullptr;
    for (const TimeInterval& iv : all) {
      if (!iv.contains(t)) continue;
      if (cover) {
        if (cover->block != iv.block && !mutuallyExclusive(tree, cover->block, iv.block)) {
          internalError("overlapping ETIs at step " + std::to_string(t) + ": " +
                        tree.node(cover->block).name + " and " + tree.node(iv.block).name);
        }
        if (iv.end > cover->end || (iv.end == cover->end && iv.block < cover->block)) {
          cover = &iv;
        }
      } else {
        cover = &iv;
      }
    }
    if (cover != open) {
      if (cover) out.push_back(*cover);
      open = cover;
    }
  }
  return out;
}

}  // namespace spk
