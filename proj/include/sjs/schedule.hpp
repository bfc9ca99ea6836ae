#pragma once

#include <vector>

#include "sjs/instance.hpp"

namespace sjs {

// One operation placed on a machine group at a 1-based start block.
struct Placement {
  int group = -1;
  int start = 0;  // 0 means unassigned

  bool assigned() const { return group >= 0 && start > 0; }
  friend bool operator==(const Placement&, const Placement&) = default;
};

// Beginning times of every operation in attempt 1 and in every second-attempt
// scenario. plans[i][s][k] is operation first_op(s) + k of scenario s of job i.
struct Schedule {
  std::vector<std::vector<std::vector<Placement>>> plans;

  // Unassigned schedule with one slot per (job, scenario, op).
  static Schedule blank(const Instance& inst);

  Placement& at(const ScenarioKey& key, int op) {
    return plans[key.job][scenario_index(key)][op - key.first_op()];
  }
  const Placement& at(const ScenarioKey& key, int op) const {
    return plans[key.job][scenario_index(key)][op - key.first_op()];
  }

  static int scenario_index(const ScenarioKey& key) {
    switch (key.kind) {
      case ScenarioKind::kFirstPass:
        return 0;
      case ScenarioKind::kDiscard:
        return 1 + 2 * key.failed_op;
      case ScenarioKind::kRework:
        return 2 + 2 * key.failed_op;
    }
    return 0;
  }

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

// Processing time of (job, op) on `group`, or -1 if the group is not eligible.
int proc_time(const Instance& inst, int job, int op, int group);

// Completion block of a placement: start + p - 1.
int completion_of(const Instance& inst, int job, int op, const Placement& p);

// Completion of the last operation of scenario `scenario` of `job`.
// Throws std::invalid_argument if any placement is missing or ineligible.
int final_completion(const Instance& inst, const Schedule& schedule, int job, int scenario);

}  // namespace sjs
