#pragma once

#include "sjs/milp/model.hpp"

namespace sjs::milp {

// Exact depth-first branch-and-bound over SOS1 groups.
//
// Every binary must belong to an SOS1 group; all other variables are
// "residual" and are resolved in closed form (single variable or single row
// components) or by a small dense LP once the binaries are fixed. Start-time
// windows are tightened by bound propagation on every row. The node bound is
// the sum of per-group minimum objective coefficients plus the residual
// components' relaxed minima given the current row activity ranges.
//
// Branching picks the undecided group with the smallest live reference
// weight (earliest start), ties by group index. Values are tried in order of
// the group's hint distance if one is set, else (objective, weight, index).
// Runs are deterministic for a given model and budget.
MilpSolution solve_builtin(const MilpModel& model, const Budget& budget = {});

}  // namespace sjs::milp
