#include "sjs/layout.hpp"

#include <algorithm>
#include <stdexcept>

namespace sjs {

VariableLayout::VariableLayout(const Instance& inst) : inst_(&inst) {
  const int horizon = inst.horizon;
  job_begin_.push_back(0);
  for (int i = 0; i < inst.num_jobs(); ++i) {
    const Job& job = inst.jobs[i];
    std::vector<double> w;
    for (const ScenarioWeight& sw : scenario_weights(job, i)) w.push_back(sw.weight);
    weights_.push_back(w);

    scenario_begin_.emplace_back();
    for (int s = 0; s < num_scenarios(job); ++s) {
      const ScenarioKey key = scenario_key(i, s);
      scenario_begin_.back().push_back(static_cast<int>(groups_.size()));
      for (int j = key.first_op(); j < job.num_ops(); ++j) {
        PlacementGroup pg;
        pg.job = i;
        pg.scenario = s;
        pg.op = j;
        // First-pass op j runs only if the part survived ops 0..j-1; every
        // second-attempt op carries its scenario probability.
        pg.capacity_weight = key.is_second_attempt() ? w[s] : survival_before(job, j);
        pg.first_candidate = num_candidates_;
        std::vector<Eligibility> elig = job.operations[j].eligible;
        std::sort(elig.begin(), elig.end(),
                  [](const Eligibility& a, const Eligibility& b) { return a.group < b.group; });
        for (const Eligibility& e : elig) {
          for (int t = 1; t + e.proc_time - 1 <= horizon; ++t) {
            pg.candidates.push_back({e.group, t, e.proc_time});
          }
        }
        num_candidates_ += static_cast<int>(pg.candidates.size());
        groups_.push_back(std::move(pg));
      }
    }
    job_begin_.push_back(static_cast<int>(groups_.size()));
  }
}

int VariableLayout::group_index(int job, int scenario, int op) const {
  const ScenarioKey key = scenario_key(job, scenario);
  const int offset = op - key.first_op();
  if (offset < 0 || op >= inst_->jobs[job].num_ops()) {
    throw std::out_of_range("operation not scheduled in scenario " + to_string(key));
  }
  return scenario_begin_[job][scenario] + offset;
}

Schedule VariableLayout::to_schedule(std::span<const int> choice) const {
  Schedule s = Schedule::blank(*inst_);
  for (int g = 0; g < num_groups(); ++g) {
    const PlacementGroup& pg = groups_[g];
    if (choice[g] < 0) continue;
    const Candidate& c = pg.candidates[choice[g]];
    s.at(scenario_key(pg.job, pg.scenario), pg.op) = {c.group, c.start};
  }
  return s;
}

std::vector<int> VariableLayout::to_choices(const Schedule& schedule) const {
  std::vector<int> choice(num_groups(), -1);
  for (int g = 0; g < num_groups(); ++g) {
    const PlacementGroup& pg = groups_[g];
    if (pg.job >= static_cast<int>(schedule.plans.size())) continue;
    const Placement& p = schedule.at(scenario_key(pg.job, pg.scenario), pg.op);
    if (!p.assigned()) continue;
    // Candidates are sorted by (group, start) with contiguous starts per group.
    for (int k = 0; k < static_cast<int>(pg.candidates.size()); ++k) {
      const Candidate& c = pg.candidates[k];
      if (c.group == p.group) {
        const int idx = k + (p.start - c.start);
        if (p.start >= 1 && idx < static_cast<int>(pg.candidates.size()) &&
            pg.candidates[idx].group == p.group && pg.candidates[idx].start == p.start) {
          choice[g] = idx;
        }
        break;
      }
    }
  }
  return choice;
}

}  // namespace sjs
