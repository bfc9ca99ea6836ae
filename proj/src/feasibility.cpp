#include "sjs/feasibility.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "sjs/model.hpp"

namespace sjs {

namespace {

constexpr double kCapacityTol = 1e-9;

std::string where(int job, const ScenarioKey& key, int op) {
  return "job " + std::to_string(job + 1) + " " + to_string(key) + " op " + std::to_string(op + 1);
}

}  // namespace

std::vector<ScheduleViolation> check_feasible(const Instance& inst, const Schedule& schedule) {
  std::vector<ScheduleViolation> out;
  if (static_cast<int>(schedule.plans.size()) != inst.num_jobs()) {
    out.push_back({"assignment", "schedule has " + std::to_string(schedule.plans.size()) +
                                     " jobs, instance has " + std::to_string(inst.num_jobs())});
    return out;
  }
  const int T = inst.horizon;
  const int S = inst.shift_length;
  std::vector<std::vector<double>> load(inst.num_groups(), std::vector<double>(T, 0.0));

  for (int i = 0; i < inst.num_jobs(); ++i) {
    const Job& job = inst.jobs[i];
    if (static_cast<int>(schedule.plans[i].size()) != num_scenarios(job)) {
      out.push_back({"assignment", "job " + std::to_string(i + 1) + " has the wrong number of scenarios"});
      continue;
    }
    const std::vector<ScenarioWeight> weights = scenario_weights(job, i);
    // completion[s][j], 0 when unknown.
    std::vector<std::vector<int>> completion(num_scenarios(job), std::vector<int>(job.num_ops(), 0));
    bool complete = true;
    for (int s = 0; s < num_scenarios(job); ++s) {
      const ScenarioKey key = scenario_key(i, s);
      if (static_cast<int>(schedule.plans[i][s].size()) != job.num_ops() - key.first_op()) {
        out.push_back({"assignment", "job " + std::to_string(i + 1) + " " + to_string(key) +
                                         " has the wrong number of operations"});
        complete = false;
        continue;
      }
      for (int j = key.first_op(); j < job.num_ops(); ++j) {
        const Placement& p = schedule.at(key, j);
        if (!p.assigned()) {
          out.push_back({"assignment", where(i, key, j) + " is not placed"});
          complete = false;
          continue;
        }
        const int proc = p.group < inst.num_groups() ? proc_time(inst, i, j, p.group) : -1;
        if (proc < 0) {
          out.push_back({"assignment", where(i, key, j) + " is not eligible on group " +
                                           std::to_string(p.group + 1)});
          complete = false;
          continue;
        }
        const int c = p.start + proc - 1;
        if (c > T) {
          out.push_back({"horizon", where(i, key, j) + " completes at " + std::to_string(c) +
                                        " after the horizon " + std::to_string(T)});
          complete = false;
          continue;
        }
        completion[s][j] = c;
        const double w = key.is_second_attempt() ? weights[s].weight : survival_before(job, j);
        for (int t = p.start; t <= c; ++t) load[p.group][t - 1] += w;
      }
    }
    if (!complete) continue;
    for (int s = 0; s < num_scenarios(job); ++s) {
      const ScenarioKey key = scenario_key(i, s);
      for (int j = key.first_op(); j + 1 < job.num_ops(); ++j) {
        const int b = schedule.at(key, j + 1).start;
        if (b < completion[s][j] + 1) {
          out.push_back({"precedence", where(i, key, j + 1) + " begins at " + std::to_string(b) +
                                           " before the previous operation completes at " +
                                           std::to_string(completion[s][j])});
        }
      }
      if (!key.is_second_attempt()) continue;
      const int c1 = completion[0][key.failed_op];
      const int b = schedule.at(key, key.first_op()).start;
      if (b < c1 + 1) {
        out.push_back({"restart", where(i, key, key.first_op()) + " begins at " + std::to_string(b) +
                                      " before the failed operation completes at " + std::to_string(c1)});
      }
      const int boundary = ((c1 + S - 1) / S) * S + 1;
      if (b < boundary) {
        out.push_back({"shift", where(i, key, key.first_op()) + " begins at " + std::to_string(b) +
                                    " before the next shift at " + std::to_string(boundary)});
      }
    }
  }
  for (int m = 0; m < inst.num_groups(); ++m) {
    const double cap = inst.machine_groups[m].capacity;
    for (int t = 1; t <= T; ++t) {
      if (load[m][t - 1] > cap + kCapacityTol) {
        out.push_back({"capacity", "group " + std::to_string(m + 1) + " at time " + std::to_string(t) +
                                       " carries " + std::to_string(load[m][t - 1]) +
                                       " expected operations, capacity " + std::to_string(inst.machine_groups[m].capacity)});
      }
    }
  }
  return out;
}

RepairResult repair_schedule(const Instance& inst, const VariableLayout& layout,
                             const Schedule& anchor, const milp::SolverBackend& backend,
                             const RepairOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  RepairResult out;
  const std::vector<int> choices = layout.to_choices(anchor);
  if (std::find(choices.begin(), choices.end(), -1) != choices.end()) {
    out.diagnostics.push_back("anchor has a missing or out-of-horizon placement");
    return out;
  }
  const int delta_max = options.delta_max < 0 ? inst.shift_length : options.delta_max;
  int delta = std::max(options.delta, 0);
  while (true) {
    milp::Budget budget = options.budget;
    const double used = std::chrono::duration<double>(Clock::now() - start).count();
    budget.time_limit_s = options.budget.time_limit_s - used;
    if (budget.time_limit_s <= 0.0) {
      out.diagnostics.push_back("time budget exhausted before delta " + std::to_string(delta));
      return out;
    }
    BuiltModel built = build_repair_model(inst, layout, choices, std::vector<int>{delta});
    const milp::MilpSolution sol = backend.solve(built.model, budget);
    if (sol.has_solution()) {
      Schedule s = layout.to_schedule(decode_choices(built, layout, sol.values));
      const std::vector<ScheduleViolation> bad = check_feasible(inst, s);
      if (bad.empty()) {
        out.improved = true;
        out.schedule = std::move(s);
        out.cost = evaluate_objective(inst, out.schedule);
        out.delta = delta;
        return out;
      }
      out.diagnostics.push_back("delta " + std::to_string(delta) +
                                ": solver schedule rejected: " + bad.front().message);
      return out;
    }
    out.diagnostics.push_back("delta " + std::to_string(delta) + ": " + milp::to_string(sol.status));
    if (sol.status != milp::Status::kInfeasible) return out;
    if (delta >= delta_max) return out;
    delta = std::min(std::max(2 * delta, 1), delta_max);
  }
}

GapReport compute_gap(double feasible_cost, double bound, std::string bound_source) {
  GapReport r;
  r.feasible = feasible_cost;
  r.bound = bound;
  r.bound_source = std::move(bound_source);
  if (feasible_cost > 0.0) {
    r.gap = (feasible_cost - bound) / feasible_cost;
  } else {
    r.relative = false;
    r.gap = feasible_cost - bound;
  }
  return r;
}

}  // namespace sjs
