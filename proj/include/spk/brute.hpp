// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spk/intervals.hpp"

namespace spk {

// Exact minimum spanning tree weight of a complete graph given its full
// symmetric weight matrix, by enumerating all (n-1)-edge spanning subsets.
// Intended for n <= 6.
std::int64_t bruteMst(const std::vector<std::vector<std::int64_t>>& weights);

// Independent union-of-ETIs oracle: a step-by-step membership scan over
// t = 1..horizon that touches eti() only (no generator machinery).
std::vector<TimeInterval> bruteUnion(const SbTree& tree, const std::vector<std::int32_t>& blocks,
                                     std::int64_t horizon);

// All ETIs of one block by plain odometer enumeration (test oracle for etig).
std::vector<TimeInterval> enumerateEtis(const SbTree& tree, std::int32_t block);

}  // namespace spk
