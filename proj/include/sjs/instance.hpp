#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sjs {

// Problem data for stochastic job-shop scheduling with scrap and rework.
//
// Indexing: jobs, operations and machine groups are 0-based inside the
// library (ids in files and reports are 1-based). Time blocks are 1-based,
// t = 1..horizon, as in the time-indexed formulation.

struct MachineGroup {
  int id = 0;        // 1-based
  int capacity = 1;  // number of interchangeable machines

  friend bool operator==(const MachineGroup&, const MachineGroup&) = default;
};

struct Eligibility {
  int group = 0;  // 0-based machine group index
  int proc_time = 1;

  friend bool operator==(const Eligibility&, const Eligibility&) = default;
};

struct OperationSpec {
  std::vector<Eligibility> eligible;
  double scrap_prob = 0.0;   // in [0, 1)
  double rework_prob = 0.0;  // in [0, 1], conditional on scrap

  friend bool operator==(const OperationSpec&, const OperationSpec&) = default;
};

struct Job {
  int id = 0;  // 1-based
  double weight = 1.0;
  int due_date = 1;
  std::vector<OperationSpec> operations;

  int num_ops() const { return static_cast<int>(operations.size()); }
  friend bool operator==(const Job&, const Job&) = default;
};

struct Instance {
  std::vector<Job> jobs;
  std::vector<MachineGroup> machine_groups;
  int horizon = 1;
  int shift_length = 8;
  double ceiling_epsilon = 1e-3;

  int num_jobs() const { return static_cast<int>(jobs.size()); }
  int num_groups() const { return static_cast<int>(machine_groups.size()); }

  // (job, op) pairs that group m can process, in job-major order.
  std::vector<std::pair<int, int>> operations_on(int group) const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Scenarios of one job. FIRST_PASS means no defect; DISCARD(j') and
// REWORK(j') mean the part was scrapped after operation j' in attempt 1 and
// restarts from operation 0 or from j' respectively.
enum class ScenarioKind : std::uint8_t { kFirstPass, kDiscard, kRework };

struct ScenarioKey {
  int job = 0;
  ScenarioKind kind = ScenarioKind::kFirstPass;
  int failed_op = -1;  // j' (0-based), -1 for FIRST_PASS

  // First operation scheduled in this scenario.
  int first_op() const { return kind == ScenarioKind::kRework ? failed_op : 0; }
  bool is_second_attempt() const { return kind != ScenarioKind::kFirstPass; }

  friend bool operator==(const ScenarioKey&, const ScenarioKey&) = default;
};

// Number of scenarios of a job with J operations: 1 + 2J. Scenario index 0
// is FIRST_PASS, 1 + 2j' is DISCARD(j'), 2 + 2j' is REWORK(j').
inline int num_scenarios(const Job& job) { return 1 + 2 * job.num_ops(); }
ScenarioKey scenario_key(int job_index, int scenario_index);
std::string to_string(const ScenarioKey& key);

struct ScenarioWeight {
  ScenarioKey key;
  double weight = 0.0;
};

// Probability of each scenario of `job` in scenario-index order. Sums to 1.
std::vector<ScenarioWeight> scenario_weights(const Job& job, int job_index = 0);

// Probability that the part reaches operation j in attempt 1, i.e. survives
// operations 0..j-1. This is the expected-occupancy weight of first-pass op j.
double survival_before(const Job& job, int op);

struct Violation {
  std::string field;  // e.g. "MachineGroup.capacity"
  std::string message;
};

// Reports every broken invariant; empty iff the instance is well formed.
std::vector<Violation> validate_instance(const Instance& inst);

// Earliest completion of the job's worst second-attempt scenario when it is
// alone in the shop, using the fastest eligible group for every operation.
int isolated_makespan(const Instance& inst, int job_index);

// Horizon rule: 2*max(d) + longest two-attempt serial processing, rounded up
// to a multiple of the shift length.
int default_horizon(const Instance& inst);

}  // namespace sjs
