// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "spk/sbtree.hpp"

namespace spk {

// Loop iteration tuple, outermost ancestor first, 1-based components.
using IterTuple = std::vector<std::int64_t>;

// Half-open execution-time interval (start, end]: the owner's lines may be
// active exactly at steps start+1 .. end.
struct TimeInterval {
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::int32_t block = -1;
  IterTuple iter;

  bool contains(std::int64_t t) const { return start < t && t <= end; }
  std::int64_t length() const { return end - start; }
};

// ETI of `block` for iteration J of its loop ancestors.
TimeInterval eti(const SbTree& tree, std::int32_t block, const IterTuple& J);

// Streams a block's ETIs in mixed-base counting order (outermost digit most
// significant), one at a time, in constant memory.
class Etig {
 public:
  Etig(const SbTree& tree, std::int32_t block);

  std::optional<TimeInterval> next();

  // Skips the cursor forward to the first remaining interval whose end is at
  // least `t` and returns it without consuming it. Interval ends are strictly
  // increasing in rank, so a rank binary search applies; the rank is decoded
  // into loop indices by mixed-base division/remainder.
  std::optional<TimeInterval> firstEndingAtOrAfter(std::int64_t t);

  std::int64_t total() const { return total_; }
  IterTuple tupleAt(std::int64_t rank) const;
  TimeInterval at(std::int64_t rank) const;

 private:
  std::int64_t endAt(std::int64_t rank) const;

  const SbTree* tree_;
  std::int32_t block_;
  std::vector<std::int64_t> bounds_;
  std::vector<std::int64_t> sufProd_;  // sufProd_[i] = product of bounds_[i..]
  std::int64_t total_ = 1;
  std::int64_t cursor_ = 0;
};

// The unique ETI of `block` containing step t, if any.
std::optional<TimeInterval> etiContaining(const SbTree& tree, std::int32_t block, std::int64_t t);

// Union generator over a set of flat blocks: time-based incremental search
// from t=1, yielding the member interval containing the current time and
// advancing past it. Yields disjoint, sorted intervals covering exactly the
// steps covered by some member ETI.
class Uetig {
 public:
  Uetig(const SbTree& tree, std::vector<std::int32_t> blocks, std::int64_t horizon);

  std::optional<TimeInterval> next();

 private:
  const SbTree* tree_;
  std::vector<Etig> gens_;
  std::vector<std::optional<TimeInterval>> cur_;
  std::int64_t horizon_;
  std::int64_t t_ = 1;
};

// Convenience: fully materialized union (for moderate block sets).
std::vector<TimeInterval> collectUnion(const SbTree& tree, std::vector<std::int32_t> blocks,
                                       std::int64_t horizon);

}  // namespace spk
