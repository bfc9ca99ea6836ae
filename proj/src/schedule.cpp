#include "sjs/schedule.hpp"

#include <stdexcept>
#include <string>

namespace sjs {

Schedule Schedule::blank(const Instance& inst) {
  Schedule s;
  s.plans.resize(inst.num_jobs());
  for (int i = 0; i < inst.num_jobs(); ++i) {
    const Job& job = inst.jobs[i];
    s.plans[i].resize(num_scenarios(job));
    for (int sc = 0; sc < num_scenarios(job); ++sc) {
      const ScenarioKey key = scenario_key(i, sc);
      s.plans[i][sc].resize(job.num_ops() - key.first_op());
    }
  }
  return s;
}

int proc_time(const Instance& inst, int job, int op, int group) {
  for (const Eligibility& e : inst.jobs[job].operations[op].eligible) {
    if (e.group == group) return e.proc_time;
  }
  return -1;
}

int completion_of(const Instance& inst, int job, int op, const Placement& p) {
  const int proc = proc_time(inst, job, op, p.group);
  if (proc < 0) {
    throw std::invalid_argument("job " + std::to_string(job + 1) + " op " +
                                std::to_string(op + 1) + " is not eligible on group " +
                                std::to_string(p.group + 1));
  }
  return p.start + proc - 1;
}

int final_completion(const Instance& inst, const Schedule& schedule, int job, int scenario) {
  if (job >= static_cast<int>(schedule.plans.size()) ||
      scenario >= static_cast<int>(schedule.plans[job].size())) {
    throw std::invalid_argument("schedule has no plan for job " + std::to_string(job + 1));
  }
  const auto& plan = schedule.plans[job][scenario];
  const ScenarioKey key = scenario_key(job, scenario);
  const int last = inst.jobs[job].num_ops() - 1;
  if (static_cast<int>(plan.size()) != last + 1 - key.first_op() || !plan.back().assigned()) {
    throw std::invalid_argument("missing placement for job " + std::to_string(job + 1) + " " +
                                to_string(key) + " op " + std::to_string(last + 1));
  }
  return completion_of(inst, job, last, plan.back());
}

}  // namespace sjs
