// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "spk/intervals.hpp"

#include <algorithm>
#include <set>

namespace spk {

TimeInterval eti(const SbTree& tree, std::int32_t block, const IterTuple& J) {
  const SbNode& n = tree.node(block);
  if (J.size() != n.loopAncestors.size()) {
    throw CompileError(ErrKind::Usage,
                       "iteration tuple arity " + std::to_string(J.size()) + " does not match " +
                           std::to_string(n.loopAncestors.size()) + " loop ancestors of " + n.name);
  }
  std::int64_t start = n.distCumul;
  for (std::size_t i = 0; i < J.size(); ++i) {
    const SbNode& la = tree.node(n.loopAncestors[i]);
    if (J[i] < 1 || J[i] > la.maxIter) {
      throw CompileError(ErrKind::Usage, "iteration index " + std::to_string(J[i]) +
                                             " out of bounds [1, " + std::to_string(la.maxIter) +
                                             "] for " + la.name);
    }
    start += la.penulBase + (J[i] - 1) * la.penulPeriod;
  }
  TimeInterval out;
  out.start = start;
  out.end = start + n.tb;
  out.block = block;
  out.iter = J;
  return out;
}

Etig::Etig(const SbTree& tree, std::int32_t block) : tree_(&tree), block_(block) {
  bounds_ = tree.iterBounds(block);
  sufProd_.assign(bounds_.size() + 1, 1);
  for (std::size_t i = bounds_.size(); i-- > 0;) {
    sufProd_[i] = sufProd_[i + 1] * bounds_[i];
  }
  total_ = sufProd_[0];
}

IterTuple Etig::tupleAt(std::int64_t rank) const {
  IterTuple J(bounds_.size());
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    J[i] = (rank / sufProd_[i + 1]) % bounds_[i] + 1;
  }
  return J;
}

TimeInterval Etig::at(std::int64_t rank) const { return eti(*tree_, block_, tupleAt(rank)); }

std::int64_t Etig::endAt(std::int64_t rank) const {
  const SbNode& n = tree_->node(block_);
  std::int64_t start = n.distCumul;
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    const SbNode& la = tree_->node(n.loopAncestors[i]);
    std::int64_t j = (rank / sufProd_[i + 1]) % bounds_[i] + 1;
    start += la.penulBase + (j - 1) * la.penulPeriod;
  }
  return start + n.tb;
}

std::optional<TimeInterval> Etig::next() {
  if (cursor_ >= total_) return std::nullopt;
  return at(cursor_++);
}

std::optional<TimeInterval> Etig::firstEndingAtOrAfter(std::int64_t t) {
  if (cursor_ >= total_) return std::nullopt;
  std::int64_t lo = cursor_, hi = total_ - 1;
  if (endAt(hi) < t) {
    cursor_ = total_;
    return std::nullopt;
  }
  while (lo < hi) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (endAt(mid) >= t) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  cursor_ = lo;
  return at(lo);
}

std::optional<TimeInterval> etiContaining(const SbTree& tree, std::int32_t block, std::int64_t t) {
  Etig gen(tree, block);
  auto iv = gen.firstEndingAtOrAfter(t);
  if (iv && iv->contains(t)) return iv;
  return std::nullopt;
}

Uetig::Uetig(const SbTree& tree, std::vector<std::int32_t> blocks, std::int64_t horizon)
    : tree_(&tree), horizon_(horizon) {
  std::sort(blocks.begin(), blocks.end());
  blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
  for (std::int32_t b : blocks) {
    if (!tree.node(b).flat()) internalError("uetig over a non-flat block " + tree.node(b).name);
    gens_.emplace_back(tree, b);
    cur_.emplace_back(std::nullopt);
  }
}

std::optional<TimeInterval> Uetig::next() {
  while (t_ <= horizon_) {
    bool anyLive = false;
    int found = -1;
    std::int64_t minStart = -1;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
      if (!cur_[i] || cur_[i]->end < t_) {
        cur_[i] = gens_[i].firstEndingAtOrAfter(t_);
      }
      if (!cur_[i]) continue;
      anyLive = true;
      if (cur_[i]->contains(t_)) {
        if (found >= 0) {
          // Opposite branches of one conditional legitimately share time
          // steps; the longer interval carries the union. Anything else
          // means the schedule is broken.
          if (!mutuallyExclusive(*tree_, cur_[found]->block, cur_[i]->block)) {
            internalError("overlapping ETIs at step " + std::to_string(t_) + ": " +
                          tree_->node(cur_[found]->block).name + " and " +
                          tree_->node(cur_[i]->block).name);
          }
          if (cur_[i]->end > cur_[found]->end) found = static_cast<int>(i);
        } else {
          found = static_cast<int>(i);
        }
      } else if (minStart < 0 || cur_[i]->start < minStart) {
        minStart = cur_[i]->start;
      }
    }
    if (!anyLive) return std::nullopt;
    if (found >= 0) {
      TimeInterval out = *cur_[found];
      t_ = out.end + 1;
      return out;
    }
    t_ = minStart + 1;
  }
  return std::nullopt;
}

std::vector<TimeInterval> collectUnion(const SbTree& tree, std::vector<std::int32_t> blocks,
                                       std::int64_t horizon) {
  Uetig gen(tree, std::move(blocks), horizon);
  std::vector<TimeInterval> out;
  while (auto iv = gen.next()) out.push_back(*iv);
  return out;
}

}  // namespace spk
