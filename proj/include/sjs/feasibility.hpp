#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sjs/instance.hpp"
#include "sjs/layout.hpp"
#include "sjs/milp/backend.hpp"
#include "sjs/schedule.hpp"

namespace sjs {

struct ScheduleViolation {
  std::string rule;  // assignment, horizon, precedence, restart, shift, capacity
  std::string message;
};

// Exact re-check of a schedule against every constraint of the model, using
// integer ceilings for the shift rule and a 1e-9 tolerance for expected
// capacity. Empty iff feasible.
std::vector<ScheduleViolation> check_feasible(const Instance& inst, const Schedule& schedule);

struct RepairOptions {
  int delta = 2;       // initial window, time blocks
  int delta_max = -1;  // largest window tried; shift length when negative
  milp::Budget budget; // shared by all attempts
};

struct RepairResult {
  bool improved = false;  // false means NO_IMPROVEMENT
  Schedule schedule;
  double cost = 0.0;
  int delta = 0;          // window that succeeded
  std::vector<std::string> diagnostics;
};

// Searches for a feasible schedule whose starts stay within delta of the
// anchor, doubling delta up to delta_max while the window is infeasible.
// A returned schedule always passes check_feasible.
RepairResult repair_schedule(const Instance& inst, const VariableLayout& layout,
                             const Schedule& anchor, const milp::SolverBackend& backend,
                             const RepairOptions& options = {});

struct GapReport {
  double feasible = 0.0;
  double bound = 0.0;
  double gap = 0.0;       // (feasible - bound) / feasible when defined
  bool relative = true;   // false: feasible <= 0, gap holds feasible - bound
  std::string bound_source;
};

GapReport compute_gap(double feasible_cost, double bound, std::string bound_source = {});

}  // namespace sjs
