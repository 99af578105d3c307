// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spk/lpgen.hpp"

namespace spk {

struct BenchRecord {
  std::string bench;
  std::int64_t size = 0;
  std::string mode;
  std::int64_t tb = 0, rows = 0, cols = 0, nonzeros = 0;
  std::uint64_t bytes = 0;
  std::int64_t ms = 0;
  std::string solver;  // optional "<status> <objective>" from --solve-with
};

struct BenchConfig {
  std::string suite;  // "makespan" | "mst"
  std::vector<std::int64_t> sizes;
  std::vector<Mode> modes{Mode::UO, Mode::HSB};
  std::int64_t wbits = 2;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string solveWith;  // external solver command; empty = skip
  bool zeroTime = false;  // report ms as 0 (byte-reproducible output)
};

struct QuadFit {
  double a = 0, b = 0, c = 0;  // a*x^2 + b*x + c
};

struct BenchResult {
  std::vector<BenchRecord> records;
  QuadFit fitUo, fitHsb;
  double leadingRatio = 1.0;  // UO leading coefficient / HSB leading coefficient
  std::uint64_t seed = 0;
  bool solved = false;
  std::string solverNote;
};

// Least-squares quadratic fit (Cramer's rule on the normal equations).
QuadFit quadFit(const std::vector<std::pair<double, double>>& points);

BenchResult runBench(const BenchConfig& config);

std::string benchCsv(const BenchResult& result);
std::string benchMarkdown(const BenchResult& result);

// Generates the seeded random weight inputs used for a bench configuration.
std::vector<std::uint8_t> benchInputs(const std::string& suite, std::int64_t size,
                                      std::int64_t wbits, std::uint64_t seed);

}  // namespace spk
