#pragma once

#include <span>
#include <vector>

#include "sjs/instance.hpp"
#include "sjs/schedule.hpp"

namespace sjs {

// A start-time choice for one operation: x = 1 means the operation begins at
// `start` on `group` and occupies blocks start..start+proc-1.
struct Candidate {
  int group = 0;
  int start = 1;
  int proc = 1;

  int completion() const { return start + proc - 1; }
};

// The SOS1 choice of one (job, scenario, op): exactly one candidate is used.
struct PlacementGroup {
  int job = 0;
  int scenario = 0;
  int op = 0;                     // absolute operation index
  double capacity_weight = 0.0;   // expected-occupancy coefficient
  int first_candidate = 0;        // offset into the flat candidate arrays
  std::vector<Candidate> candidates;  // ordered by (group, start)
};

// Enumerates every placement group and its candidates for an instance.
// Candidates are limited to starts whose completion fits the horizon.
class VariableLayout {
 public:
  explicit VariableLayout(const Instance& inst);

  const Instance& instance() const { return *inst_; }
  int horizon() const { return inst_->horizon; }
  int num_cells() const { return inst_->num_groups() * inst_->horizon; }
  int cell(int group, int t) const { return group * inst_->horizon + (t - 1); }

  int num_groups() const { return static_cast<int>(groups_.size()); }
  int num_candidates() const { return num_candidates_; }
  const PlacementGroup& group(int g) const { return groups_[g]; }
  const std::vector<PlacementGroup>& groups() const { return groups_; }

  // Index of the placement group for (job, scenario, op).
  int group_index(int job, int scenario, int op) const;
  // Contiguous range [begin, end) of placement groups that belong to a job.
  int job_begin(int job) const { return job_begin_[job]; }
  int job_end(int job) const { return job_begin_[job + 1]; }

  double scenario_weight(int job, int scenario) const { return weights_[job][scenario]; }

  // Schedule from one candidate index per placement group (local indices).
  Schedule to_schedule(std::span<const int> choice) const;
  // Candidate index per placement group; -1 where the schedule's placement is
  // missing or not a candidate of that group.
  std::vector<int> to_choices(const Schedule& schedule) const;

 private:
  const Instance* inst_;
  std::vector<PlacementGroup> groups_;
  std::vector<int> job_begin_;
  std::vector<std::vector<int>> scenario_begin_;  // per job, per scenario
  std::vector<std::vector<double>> weights_;
  int num_candidates_ = 0;
};

}  // namespace sjs
