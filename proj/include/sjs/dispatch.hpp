#pragma once

#include <optional>
#include <vector>

#include "sjs/instance.hpp"
#include "sjs/schedule.hpp"

namespace sjs {

// Expected machine-group load per (group, time block), 1-based time.
class LoadProfile {
 public:
  LoadProfile(const Instance& inst, int horizon);

  double at(int group, int t) const { return load_[group][t - 1]; }
  void add(int group, int start, int proc, double weight);
  // True if `weight` more fits on [start, start+proc-1] within capacity.
  bool fits(int group, int start, int proc, double weight) const;
  int horizon() const { return horizon_; }

 private:
  const Instance* inst_;
  int horizon_;
  std::vector<std::vector<double>> load_;
};

// List scheduler over expected capacity: jobs by due date (ties by index),
// first-pass operations at their earliest feasible start on the eligible
// group that completes first, then every second-attempt scenario from the
// first shift boundary after the triggering completion. Returns nullopt if
// some operation cannot finish within `horizon` (inst.horizon when 0).
std::optional<Schedule> greedy_schedule(const Instance& inst, int horizon = 0);

// List scheduler driven by a reference plan (typically a relaxed solution
// that ignores capacity): placements are released in order of their
// reference start once their predecessor is placed and each goes to its
// earliest capacity-feasible start on the eligible group that completes
// first. Ties by (job, scenario, op). Returns nullopt if a placement does not
// fit within the horizon or the reference plan has a missing placement.
std::optional<Schedule> list_schedule(const Instance& inst, const Schedule& reference,
                                      int horizon = 0);

// Latest completion in the greedy schedule when the horizon is unbounded.
int greedy_makespan(const Instance& inst);

// Horizon used for generated instances: the larger of default_horizon and
// the greedy makespan, rounded up to a whole shift.
int sized_horizon(const Instance& inst);

// First block of the shift after completion c: S * ceil(c / S) + 1.
inline int shift_restart(int completion, int shift) {
  return ((completion + shift - 1) / shift) * shift + 1;
}

}  // namespace sjs
