#include "sjs/dispatch.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <tuple>

namespace sjs {

namespace {

constexpr double kCapacityTol = 1e-9;

struct Slot {
  int group = -1;
  int start = 0;
  int completion = 0;
};

// Earliest placement of (job, op) starting no earlier than `ready`.
Slot place(const Instance& inst, const LoadProfile& load, int job, int op, int ready,
           double weight) {
  Slot best;
  for (const Eligibility& e : inst.jobs[job].operations[op].eligible) {
    for (int t = std::max(ready, 1); t + e.proc_time - 1 <= load.horizon(); ++t) {
      if (best.group >= 0 && t + e.proc_time - 1 >= best.completion) break;
      if (load.fits(e.group, t, e.proc_time, weight)) {
        const int c = t + e.proc_time - 1;
        if (best.group < 0 || c < best.completion || (c == best.completion && e.group < best.group)) {
          best = {e.group, t, c};
        }
        break;
      }
    }
  }
  return best;
}

}  // namespace

LoadProfile::LoadProfile(const Instance& inst, int horizon)
    : inst_(&inst), horizon_(horizon),
      load_(inst.num_groups(), std::vector<double>(static_cast<std::size_t>(horizon), 0.0)) {}

void LoadProfile::add(int group, int start, int proc, double weight) {
  for (int t = start; t < start + proc; ++t) load_[group][t - 1] += weight;
}

bool LoadProfile::fits(int group, int start, int proc, double weight) const {
  if (start < 1 || start + proc - 1 > horizon_) return false;
  const double cap = inst_->machine_groups[group].capacity;
  for (int t = start; t < start + proc; ++t) {
    if (load_[group][t - 1] + weight > cap + kCapacityTol) return false;
  }
  return true;
}

std::optional<Schedule> greedy_schedule(const Instance& inst, int horizon) {
  if (horizon <= 0) horizon = inst.horizon;
  LoadProfile load(inst, horizon);
  Schedule out = Schedule::blank(inst);
  std::vector<int> order(inst.num_jobs());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return inst.jobs[a].due_date < inst.jobs[b].due_date;
  });
  for (int i : order) {
    const Job& job = inst.jobs[i];
    const std::vector<ScenarioWeight> weights = scenario_weights(job, i);
    std::vector<int> first_completion(job.num_ops());
    int ready = 1;
    for (int j = 0; j < job.num_ops(); ++j) {
      const double w = survival_before(job, j);
      const Slot s = place(inst, load, i, j, ready, w);
      if (s.group < 0) return std::nullopt;
      load.add(s.group, s.start, s.completion - s.start + 1, w);
      out.plans[i][0][j] = {s.group, s.start};
      first_completion[j] = s.completion;
      ready = s.completion + 1;
    }
    for (int sc = 1; sc < num_scenarios(job); ++sc) {
      const ScenarioKey key = scenario_key(i, sc);
      const double w = weights[sc].weight;
      ready = shift_restart(first_completion[key.failed_op], inst.shift_length);
      for (int j = key.first_op(); j < job.num_ops(); ++j) {
        const Slot s = place(inst, load, i, j, ready, w);
        if (s.group < 0) return std::nullopt;
        load.add(s.group, s.start, s.completion - s.start + 1, w);
        out.at(key, j) = {s.group, s.start};
        ready = s.completion + 1;
      }
    }
  }
  return out;
}

std::optional<Schedule> list_schedule(const Instance& inst, const Schedule& reference,
                                      int horizon) {
  if (horizon <= 0) horizon = inst.horizon;
  LoadProfile load(inst, horizon);
  Schedule out = Schedule::blank(inst);
  // (reference start, job, scenario, op, ready)
  using Item = std::tuple<int, int, int, int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  auto release = [&](int job, int sc, int op, int ready) -> bool {
    const ScenarioKey key = scenario_key(job, sc);
    const Placement& p = reference.at(key, op);
    if (!p.assigned()) return false;
    queue.emplace(p.start, job, sc, op, ready);
    return true;
  };
  std::vector<std::vector<double>> weights(inst.num_jobs());
  for (int i = 0; i < inst.num_jobs(); ++i) {
    for (const ScenarioWeight& w : scenario_weights(inst.jobs[i], i)) weights[i].push_back(w.weight);
    if (!release(i, 0, 0, 1)) return std::nullopt;
  }
  while (!queue.empty()) {
    const auto [ref, i, sc, j, ready] = queue.top();
    queue.pop();
    const Job& job = inst.jobs[i];
    const ScenarioKey key = scenario_key(i, sc);
    const double w = sc == 0 ? survival_before(job, j) : weights[i][sc];
    const Slot s = place(inst, load, i, j, ready, w);
    if (s.group < 0) return std::nullopt;
    load.add(s.group, s.start, s.completion - s.start + 1, w);
    out.at(key, j) = {s.group, s.start};
    if (j + 1 < job.num_ops() && !release(i, sc, j + 1, s.completion + 1)) return std::nullopt;
    if (sc == 0) {
      // Both defect scenarios of op j become ready at the next shift.
      const int restart = shift_restart(s.completion, inst.shift_length);
      for (int d : {1 + 2 * j, 2 + 2 * j}) {
        if (!release(i, d, scenario_key(i, d).first_op(), restart)) return std::nullopt;
      }
    }
  }
  return out;
}

int greedy_makespan(const Instance& inst) {
  // Every placement starts no later than the end of all earlier load plus a
  // shift wait, so this bound always admits the greedy schedule.
  int bound = 1;
  for (const Job& job : inst.jobs) {
    int serial = 0;
    for (const OperationSpec& op : job.operations) {
      int worst = 0;
      for (const Eligibility& e : op.eligible) worst = std::max(worst, e.proc_time);
      serial += worst;
    }
    bound += num_scenarios(job) * (serial + inst.shift_length);
  }
  bound = std::max(bound, default_horizon(inst));
  const std::optional<Schedule> s = greedy_schedule(inst, bound);
  if (!s) return bound;
  int makespan = 0;
  for (int i = 0; i < inst.num_jobs(); ++i) {
    for (int sc = 0; sc < num_scenarios(inst.jobs[i]); ++sc) {
      makespan = std::max(makespan, final_completion(inst, *s, i, sc));
    }
  }
  return makespan;
}

int sized_horizon(const Instance& inst) {
  const int shift = std::max(inst.shift_length, 1);
  const int greedy = ((greedy_makespan(inst) + shift - 1) / shift) * shift;
  return std::max(default_horizon(inst), greedy);
}

}  // namespace sjs
