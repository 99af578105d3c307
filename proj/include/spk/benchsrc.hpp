// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spk {

// Built-in benchmark programs.
//
// makespan: m jobs on 3 machines with W-bit weights. Two top-level loops,
// each iterating m times and containing a conditional: the first pass
// first-fits jobs onto machine 1 under cap = 2^W - 1 and marks them taken,
// the second assigns the remaining jobs least-loaded between machines 2 and
// 3. Output is the maximum machine load.
std::string makespanSource(std::int64_t m, std::int64_t wbits);
std::string makespanParams(std::int64_t m, std::int64_t wbits);

// mst: Prim's algorithm over a complete graph on n vertices with W-bit edge
// weights supplied as the upper-triangle edge list (w01, w02, ..., w12, ...).
// Output is the total tree weight.
std::string mstSource(std::int64_t n, std::int64_t wbits);
std::string mstParams(std::int64_t n, std::int64_t wbits);

// Upper-triangle edge index for i < j over n vertices.
std::int64_t edgeIndex(std::int64_t n, std::int64_t i, std::int64_t j);

// Packs fixed-width values into io-layout bit order (LSB first per value).
std::vector<std::uint8_t> packUints(const std::vector<std::int64_t>& values, std::int64_t width);
std::int64_t unpackUint(const std::vector<std::uint8_t>& bits, std::size_t offset,
                        std::int64_t width);

}  // namespace spk
