// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spk/interp.hpp"
#include "spk/lpmodel.hpp"

namespace spk {

// Explicit 0/1 assignment of every model variable induced by one trace.
struct Witness {
  std::vector<std::int8_t> values;
};

// Builds the witness: controllers are 1 exactly on the trace, bit versions
// take the snapshot value at their step (a pre-version therefore carries the
// value at its interval start), match variables take the index==cell
// indicator. Fails if the trace visits a (line, step) with no controller in
// the model — the coverage soundness failure this oracle exists to catch.
Witness makeWitness(const Trace& trace, const LpModel& model);

struct Violation {
  std::string row;
  std::int64_t lhs = 0;
  std::string rel;
  std::int64_t rhs = 0;
};

struct CheckReport {
  bool feasible = false;
  std::int64_t totalViolations = 0;
  std::vector<Violation> violations;  // first few, with row names
  std::int64_t objective = 0;
  std::string json() const;
  std::string text() const;
};

// Evaluates every row in exact integer arithmetic (coefficients and witness
// values are integers), zero tolerance.
CheckReport checkFeasible(const LpModel& model, const Witness& witness, int maxReport = 10);

// Negative-testing hook: flips one on-trace controller.
void mutateWitness(Witness& witness, const LpModel& model);

}  // namespace spk
