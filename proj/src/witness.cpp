// Part of the spkc project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "spk/witness.hpp"

#include <json.hpp>

namespace spk {

Witness makeWitness(const Trace& trace, const LpModel& model) {
  if (trace.tb != model.tb) {
    throw CompileError(ErrKind::Usage, "trace bound " + std::to_string(trace.tb) +
                                           " does not match model bound " +
                                           std::to_string(model.tb));
  }
  // Coverage soundness: every visited (line, step) must have a controller.
  for (std::int64_t t = 1; t <= trace.tb; ++t) {
    if (model.findController(trace.lineAt(t), t) < 0) {
      internalError("trace visits line " + std::to_string(trace.lineAt(t)) + " at step " +
                    std::to_string(t) + " but the model has no controller there");
    }
  }

  Witness w;
  w.values.resize(model.vars.size());
  std::int32_t curGroup = -1;
  std::int32_t curT = -1;
  std::int64_t curIdxVal = -1;
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    const LpModel::Var& d = model.vars[v];
    std::int8_t val = 0;
    switch (d.kind) {
      case VarKind::Controller:
        val = trace.lineAt(d.b) == d.a ? 1 : 0;
        break;
      case VarKind::BitVersion:
        val = static_cast<std::int8_t>(trace.value(d.a, d.b));
        break;
      case VarKind::Match: {
        if (d.a != curGroup || d.c != curT) {
          curGroup = d.a;
          curT = d.c;
          curIdxVal = 0;
          const auto& bits = model.groupIdxBits[d.a];
          for (std::size_t k = 0; k < bits.size(); ++k) {
            curIdxVal |= static_cast<std::int64_t>(trace.value(bits[k], d.c) & 1) << k;
          }
        }
        val = curIdxVal == d.b ? 1 : 0;
        break;
      }
    }
    if (val < d.lo || val > d.hi) {
      throw CompileError(ErrKind::Usage, "witness value " + std::to_string(val) + " for " +
                                             model.varName(static_cast<std::int32_t>(v)) +
                                             " violates its bounds");
    }
    w.values[v] = val;
  }
  return w;
}

CheckReport checkFeasible(const LpModel& model, const Witness& witness, int maxReport) {
  CheckReport report;
  const std::int64_t rows = model.rows();
  for (std::int64_t r = 0; r < rows; ++r) {
    std::int64_t lhs = 0;
    for (std::uint64_t k = model.rowBegin[r]; k < model.rowBegin[r + 1]; ++k) {
      lhs += static_cast<std::int64_t>(model.termCoef[k]) * witness.values[model.termVar[k]];
    }
    std::int64_t rhs = model.rowRhs[r];
    Rel rel = static_cast<Rel>(model.rowRel[r]);
    bool ok = rel == Rel::Le ? lhs <= rhs : rel == Rel::Eq ? lhs == rhs : lhs >= rhs;
    if (!ok) {
      ++report.totalViolations;
      if (static_cast<int>(report.violations.size()) < maxReport) {
        report.violations.push_back({"R" + std::to_string(r), lhs,
                                     rel == Rel::Le ? "<=" : rel == Rel::Eq ? "=" : ">=", rhs});
      }
    }
  }
  for (const auto& [var, coef] : model.objective) {
    report.objective += static_cast<std::int64_t>(coef) * witness.values[var];
  }
  report.feasible = report.totalViolations == 0;
  return report;
}

void mutateWitness(Witness& witness, const LpModel& model) {
  for (std::int64_t v = model.ctrlBegin; v < model.ctrlEnd; ++v) {
    if (witness.values[v]) {
      witness.values[v] = 0;
      return;
    }
  }
  internalError("no controller set in witness");
}

std::string CheckReport::json() const {
  nlohmann::json j;
  j["feasible"] = feasible;
  j["objective"] = objective;
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : violations) {
    vs.push_back({{"row", v.row}, {"lhs", v.lhs}, {"rel", v.rel}, {"rhs", v.rhs}});
  }
  j["violations"] = std::move(vs);
  j["totalViolations"] = totalViolations;
  return j.dump();
}

std::string CheckReport::text() const {
  std::string out;
  if (feasible) {
    out = "feasible: all rows satisfied; objective = " + std::to_string(objective) + "\n";
    return out;
  }
  out = "INFEASIBLE: " + std::to_string(totalViolations) + " violated rows\n";
  for (const auto& v : violations) {
    out += "  " + v.row + ": lhs " + std::to_string(v.lhs) + " " + v.rel + " rhs " +
           std::to_string(v.rhs) + "\n";
  }
  return out;
}

}  // namespace spk
