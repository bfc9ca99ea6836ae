#pragma once

#include <span>
#include <vector>

#include "sjs/instance.hpp"
#include "sjs/layout.hpp"

namespace sjs::slblr {

struct JobSolution {
  std::vector<int> choices;  // candidate per placement group of the job, in layout order
  double cost = 0.0;         // sum of candidate costs plus expected weighted tardiness
};

// Exact minimum over one job's placements of
//   sum of cost[candidate] over chosen candidates + w * sum_s P(s) * max(c_s - d, 0)
// subject to the job's precedence, restart and shift rules. `cost` is
// indexed by flat layout candidate (PlacementGroup::first_candidate + k).
// Scenario chains are solved backwards over their earliest start; the first
// pass folds in the two scenarios triggered by each of its operations. Ties
// go to the earlier start, then the smaller machine group.
JobSolution solve_job_dp(const Instance& inst, const VariableLayout& layout, int job,
                         std::span<const double> cost);

}  // namespace sjs::slblr
