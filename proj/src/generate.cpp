#include "sjs/generate.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#include "sjs/dispatch.hpp"

namespace sjs {

namespace {

// std::uniform_int_distribution is implementation-defined; this mapping is
// not, which keeps generated files identical across standard libraries.
int uniform(std::mt19937_64& rng, int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return lo + static_cast<int>(draw % span);
}

Instance finish(Instance inst) {
  inst.horizon = 1;
  inst.horizon = sized_horizon(inst);
  return inst;
}

}  // namespace

Instance generate_instance(const GeneratorConfig& c) {
  if (c.jobs < 1 || c.ops_per_job < 1 || c.groups < 1) {
    throw std::invalid_argument("jobs, ops_per_job and groups must be positive");
  }
  if (c.proc_lo < 1 || c.proc_hi < c.proc_lo) throw std::invalid_argument("bad processing-time range");
  if (c.due_lo < 1 || c.due_hi < c.due_lo) throw std::invalid_argument("bad due-date range");
  if (static_cast<int>(c.capacities.size()) != c.groups) {
    throw std::invalid_argument("capacities has " + std::to_string(c.capacities.size()) +
                                " entries for " + std::to_string(c.groups) + " groups");
  }
  if (c.eligible_per_op < 1 || c.eligible_per_op > c.groups) {
    throw std::invalid_argument("eligible_per_op must be in 1..groups");
  }
  std::mt19937_64 rng(c.seed);
  Instance inst;
  inst.shift_length = c.shift_length;
  for (int m = 0; m < c.groups; ++m) inst.machine_groups.push_back({m + 1, c.capacities[m]});
  for (int i = 0; i < c.jobs; ++i) {
    Job job;
    job.id = i + 1;
    job.weight = c.weight;
    for (int j = 0; j < c.ops_per_job; ++j) {
      OperationSpec op;
      op.scrap_prob = c.scrap;
      op.rework_prob = c.rework;
      std::vector<int> pool;
      for (int m = 0; m < c.groups; ++m) {
        if (m != j % c.groups) pool.push_back(m);
      }
      std::vector<int> groups = {j % c.groups};
      for (int e = 1; e < c.eligible_per_op; ++e) {
        const int pick = uniform(rng, 0, static_cast<int>(pool.size()) - 1);
        groups.push_back(pool[pick]);
        pool.erase(pool.begin() + pick);
      }
      std::sort(groups.begin(), groups.end());
      for (int m : groups) op.eligible.push_back({m, uniform(rng, c.proc_lo, c.proc_hi)});
      job.operations.push_back(std::move(op));
    }
    inst.jobs.push_back(std::move(job));
  }
  for (Job& job : inst.jobs) job.due_date = uniform(rng, c.due_lo, c.due_hi);
  return finish(std::move(inst));
}

Instance example1_instance() {
  static const int proc[20][5] = {
      {1, 2, 2, 1, 1}, {2, 1, 2, 2, 4}, {3, 2, 3, 2, 2}, {1, 3, 2, 2, 1}, {3, 2, 5, 1, 4},
      {1, 3, 2, 3, 2}, {2, 5, 4, 1, 1}, {1, 5, 1, 5, 1}, {1, 2, 2, 5, 3}, {1, 3, 2, 3, 1},
      {5, 2, 3, 4, 5}, {3, 1, 3, 1, 1}, {5, 1, 3, 1, 5}, {2, 4, 2, 1, 1}, {3, 1, 1, 3, 5},
      {3, 3, 2, 5, 3}, {3, 1, 2, 3, 1}, {1, 2, 5, 2, 3}, {1, 4, 4, 2, 5}, {2, 4, 4, 2, 1},
  };
  static const int due[20] = {15, 25, 32, 36, 21, 27, 26, 13, 29, 12,
                               35, 31, 19, 24, 33, 23, 18, 21, 17, 22};
  static const int capacity[5] = {2, 3, 2, 2, 3};
  Instance inst;
  inst.shift_length = 8;
  for (int m = 0; m < 5; ++m) inst.machine_groups.push_back({m + 1, capacity[m]});
  for (int i = 0; i < 20; ++i) {
    Job job;
    job.id = i + 1;
    job.weight = 1.0;
    job.due_date = due[i];
    for (int j = 0; j < 5; ++j) {
      OperationSpec op;
      op.eligible = {{j, proc[i][j]}};
      op.scrap_prob = 0.05;
      op.rework_prob = 0.2;
      job.operations.push_back(std::move(op));
    }
    inst.jobs.push_back(std::move(job));
  }
  return finish(std::move(inst));
}

Instance example2_instance(std::uint64_t seed) {
  Instance inst = example1_instance();
  std::mt19937_64 rng(seed);
  for (Job& job : inst.jobs) {
    job.due_date *= 10;
    for (OperationSpec& op : job.operations) {
      for (Eligibility& e : op.eligible) e.proc_time = uniform(rng, 1, 50);
    }
  }
  return finish(std::move(inst));
}

}  // namespace sjs
