#include "sjs/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace sjs {

std::vector<std::pair<int, int>> Instance::operations_on(int group) const {
  std::vector<std::pair<int, int>> ops;
  for (int i = 0; i < num_jobs(); ++i) {
    for (int j = 0; j < jobs[i].num_ops(); ++j) {
      for (const Eligibility& e : jobs[i].operations[j].eligible) {
        if (e.group == group) {
          ops.emplace_back(i, j);
          break;
        }
      }
    }
  }
  return ops;
}

ScenarioKey scenario_key(int job_index, int scenario_index) {
  if (scenario_index == 0) return {job_index, ScenarioKind::kFirstPass, -1};
  const int failed = (scenario_index - 1) / 2;
  const ScenarioKind kind =
      (scenario_index % 2 == 1) ? ScenarioKind::kDiscard : ScenarioKind::kRework;
  return {job_index, kind, failed};
}

std::string to_string(const ScenarioKey& key) {
  std::ostringstream out;
  switch (key.kind) {
    case ScenarioKind::kFirstPass:
      out << "FIRST_PASS";
      break;
    case ScenarioKind::kDiscard:
      out << "DISCARD(" << key.failed_op + 1 << ")";
      break;
    case ScenarioKind::kRework:
      out << "REWORK(" << key.failed_op + 1 << ")";
      break;
  }
  return out.str();
}

double survival_before(const Job& job, int op) {
  double survive = 1.0;
  for (int l = 0; l < op; ++l) survive *= 1.0 - job.operations[l].scrap_prob;
  return survive;
}

std::vector<ScenarioWeight> scenario_weights(const Job& job, int job_index) {
  const int num_ops = job.num_ops();
  std::vector<ScenarioWeight> weights(num_scenarios(job));
  double survive = 1.0;  // prod_{l < j'} (1 - p^s_l)
  for (int jp = 0; jp < num_ops; ++jp) {
    const OperationSpec& op = job.operations[jp];
    const double next = survive * (1.0 - op.scrap_prob);
    const double scrapped_here = survive - next;
    weights[1 + 2 * jp] = {scenario_key(job_index, 1 + 2 * jp),
                           scrapped_here * (1.0 - op.rework_prob)};
    weights[2 + 2 * jp] = {scenario_key(job_index, 2 + 2 * jp),
                           scrapped_here * op.rework_prob};
    survive = next;
  }
  weights[0] = {scenario_key(job_index, 0), survive};
  return weights;
}

namespace {

int min_proc(const OperationSpec& op) {
  int best = 0;
  for (const Eligibility& e : op.eligible) {
    if (best == 0 || e.proc_time < best) best = e.proc_time;
  }
  return std::max(best, 1);
}

int max_proc(const OperationSpec& op) {
  int best = 1;
  for (const Eligibility& e : op.eligible) best = std::max(best, e.proc_time);
  return best;
}

int round_up(int value, int multiple) {
  return ((value + multiple - 1) / multiple) * multiple;
}

}  // namespace

int isolated_makespan(const Instance& inst, int job_index) {
  const Job& job = inst.jobs[job_index];
  const int shift = std::max(inst.shift_length, 1);
  std::vector<int> suffix(job.num_ops() + 1, 0);
  for (int j = job.num_ops() - 1; j >= 0; --j) {
    suffix[j] = suffix[j + 1] + min_proc(job.operations[j]);
  }
  int completion = 0;
  int worst = suffix[0];
  for (int jp = 0; jp < job.num_ops(); ++jp) {
    completion += min_proc(job.operations[jp]);
    const int restart = round_up(completion, shift);
    worst = std::max(worst, restart + suffix[0]);   // DISCARD(j')
    worst = std::max(worst, restart + suffix[jp]);  // REWORK(j')
  }
  return worst;
}

int default_horizon(const Instance& inst) {
  int max_due = 0;
  int longest = 0;
  for (const Job& job : inst.jobs) {
    max_due = std::max(max_due, job.due_date);
    int serial = 0;
    for (const OperationSpec& op : job.operations) serial += max_proc(op);
    longest = std::max(longest, 2 * serial);
  }
  return round_up(std::max(2 * max_due + longest, 1), std::max(inst.shift_length, 1));
}

std::vector<Violation> validate_instance(const Instance& inst) {
  std::vector<Violation> out;
  auto report = [&out](std::string field, std::string message) {
    out.push_back({std::move(field), std::move(message)});
  };

  if (inst.machine_groups.empty()) report("Instance.machine_groups", "no machine groups");
  for (int m = 0; m < inst.num_groups(); ++m) {
    const MachineGroup& g = inst.machine_groups[m];
    if (g.id != m + 1) {
      report("MachineGroup.id", "group at position " + std::to_string(m + 1) +
                                    " has id " + std::to_string(g.id));
    }
    if (g.capacity < 1) {
      report("MachineGroup.capacity", "group " + std::to_string(g.id) +
                                          " has capacity " + std::to_string(g.capacity));
    }
  }
  if (inst.jobs.empty()) report("Instance.jobs", "no jobs");
  if (inst.horizon < 1) report("Instance.horizon", "horizon must be positive");
  if (inst.shift_length < 1) report("Instance.shift_length", "shift length must be positive");
  if (!(inst.ceiling_epsilon > 0.0 && inst.ceiling_epsilon < 1.0)) {
    report("Instance.ceiling_epsilon", "must lie in (0, 1)");
  } else if (inst.shift_length >= 1 && inst.ceiling_epsilon > 1.0 / inst.shift_length) {
    report("Instance.ceiling_epsilon",
           "must not exceed 1/shift_length or the ceiling linearization cuts off "
           "valid completion times");
  }

  for (int i = 0; i < inst.num_jobs(); ++i) {
    const Job& job = inst.jobs[i];
    const std::string who = "job " + std::to_string(job.id);
    if (job.id != i + 1) {
      report("Job.id", "job at position " + std::to_string(i + 1) + " has id " +
                           std::to_string(job.id));
    }
    if (!(job.weight > 0.0)) report("Job.weight", who + " weight must be positive");
    if (job.due_date < 1) report("Job.due_date", who + " due date must be >= 1");
    if (job.operations.empty()) report("Job.operations", who + " has no operations");
    for (int j = 0; j < job.num_ops(); ++j) {
      const OperationSpec& op = job.operations[j];
      const std::string where = who + " op " + std::to_string(j + 1);
      if (op.eligible.empty()) report("OperationSpec.eligible", where + " has no eligible group");
      std::set<int> seen;
      for (const Eligibility& e : op.eligible) {
        if (e.group < 0 || e.group >= inst.num_groups()) {
          report("OperationSpec.eligible", where + " references unknown group " +
                                               std::to_string(e.group + 1));
        } else if (!seen.insert(e.group).second) {
          report("OperationSpec.eligible", where + " lists group " +
                                               std::to_string(e.group + 1) + " twice");
        }
        if (e.proc_time < 1) {
          report("OperationSpec.eligible", where + " has processing time " +
                                               std::to_string(e.proc_time));
        }
      }
      if (!(op.scrap_prob >= 0.0 && op.scrap_prob < 1.0)) {
        report("OperationSpec.scrap_prob", where + " scrap probability outside [0, 1)");
      }
      if (!(op.rework_prob >= 0.0 && op.rework_prob <= 1.0)) {
        report("OperationSpec.rework_prob", where + " rework probability outside [0, 1]");
      }
    }
  }
  if (!out.empty()) return out;

  for (int i = 0; i < inst.num_jobs(); ++i) {
    const int need = isolated_makespan(inst, i);
    if (need > inst.horizon) {
      report("Instance.horizon", "job " + std::to_string(i + 1) + " needs " +
                                     std::to_string(need) + " blocks alone but horizon is " +
                                     std::to_string(inst.horizon));
    }
  }
  return out;
}

}  // namespace sjs
