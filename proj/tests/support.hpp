#pragma once

// Hand-rolled generators and independent oracles shared by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "sjs/dispatch.hpp"
#include "sjs/instance.hpp"
#include "sjs/schedule.hpp"

namespace sjs::test {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}
inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct TinyShape {
  int max_jobs = 3;
  int max_ops = 3;
  int max_groups = 2;
  int max_proc = 3;
  int max_capacity = 2;
  int shift = 4;
  int horizon = 0;  // 0: sized from the greedy schedule
  bool flexible = true;  // operations may be eligible on several groups
};

// Random instance with per-operation probabilities. The horizon is the
// smallest multiple of the shift that fits the greedy schedule unless fixed.
inline Instance random_instance(Rng& rng, const TinyShape& shape = {}) {
  Instance inst;
  int groups = uniform_int(rng, 1, shape.max_groups);
  for (int m = 0; m < groups; ++m)
    inst.machine_groups.push_back({m + 1, uniform_int(rng, 1, shape.max_capacity)});
  int jobs = uniform_int(rng, 1, shape.max_jobs);
  for (int i = 0; i < jobs; ++i) {
    Job job;
    job.id = i + 1;
    job.weight = uniform_int(rng, 1, 4) * 0.5;
    job.due_date = uniform_int(rng, 1, 10);
    int ops = uniform_int(rng, 1, shape.max_ops);
    for (int j = 0; j < ops; ++j) {
      OperationSpec op;
      std::vector<int> order(groups);
      for (int m = 0; m < groups; ++m) order[m] = m;
      std::shuffle(order.begin(), order.end(), rng);
      int k = shape.flexible ? uniform_int(rng, 1, groups) : 1;
      for (int e = 0; e < k; ++e) op.eligible.push_back({order[e], uniform_int(rng, 1, shape.max_proc)});
      std::sort(op.eligible.begin(), op.eligible.end(),
                [](const Eligibility& a, const Eligibility& b) { return a.group < b.group; });
      op.scrap_prob = uniform_int(rng, 0, 3) * 0.1;
      op.rework_prob = uniform_int(rng, 0, 4) * 0.25;
      job.operations.push_back(op);
    }
    inst.jobs.push_back(job);
  }
  inst.shift_length = shape.shift;
  if (shape.horizon > 0) {
    inst.horizon = shape.horizon;
  } else {
    int mk = greedy_makespan(inst);
    inst.horizon = ((mk + shape.shift - 1) / shape.shift) * shape.shift;
  }
  return inst;
}

// Complete schedule with eligible groups and starts that fit the horizon.
// Nothing else is enforced, so it is usually infeasible.
inline Schedule random_schedule(Rng& rng, const Instance& inst) {
  Schedule s = Schedule::blank(inst);
  for (int i = 0; i < inst.num_jobs(); ++i) {
    const Job& job = inst.jobs[i];
    for (int sc = 0; sc < num_scenarios(job); ++sc) {
      ScenarioKey key = scenario_key(i, sc);
      for (int j = key.first_op(); j < job.num_ops(); ++j) {
        const auto& el = job.operations[j].eligible;
        const Eligibility& e = el[uniform_int(rng, 0, static_cast<int>(el.size()) - 1)];
        s.at(key, j) = {e.group, uniform_int(rng, 1, inst.horizon - e.proc_time + 1)};
      }
    }
  }
  return s;
}

// Scenario probability as a path product: survive ops 0..j'-1, fail at j',
// then branch on rework.
inline double oracle_scenario_prob(const Job& job, int scenario) {
  int J = job.num_ops();
  if (scenario == 0) {
    double p = 1.0;
    for (int j = 0; j < J; ++j) p *= 1.0 - job.operations[j].scrap_prob;
    return p;
  }
  int jf = (scenario - 1) / 2;
  bool rework = (scenario - 1) % 2 == 1;
  double p = 1.0;
  for (int j = 0; j < jf; ++j) p *= 1.0 - job.operations[j].scrap_prob;
  p *= job.operations[jf].scrap_prob;
  return p * (rework ? job.operations[jf].rework_prob : 1.0 - job.operations[jf].rework_prob);
}

inline int oracle_proc(const Instance& inst, int job, int op, int group) {
  for (const Eligibility& e : inst.jobs[job].operations[op].eligible)
    if (e.group == group) return e.proc_time;
  return -1;
}

// Expected weighted tardiness scenario by scenario from the raw placements.
inline double oracle_objective(const Instance& inst, const Schedule& s) {
  double total = 0.0;
  for (int i = 0; i < inst.num_jobs(); ++i) {
    const Job& job = inst.jobs[i];
    double e = 0.0;
    for (int sc = 0; sc < num_scenarios(job); ++sc) {
      const Placement& last = s.plans[i][sc].back();
      int c = last.start + oracle_proc(inst, i, job.num_ops() - 1, last.group) - 1;
      e += oracle_scenario_prob(job, sc) * std::max(c - job.due_date, 0);
    }
    total += job.weight * e;
  }
  return total;
}

}  // namespace sjs::test
