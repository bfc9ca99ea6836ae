#include "sjs/slblr/job_dp.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "sjs/dispatch.hpp"

namespace sjs::slblr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// best[e] = cheapest completion of the chain from this op on, with the op
// starting at or after e; arg[e] is the candidate achieving it.
struct Suffix {
  std::vector<double> best;
  std::vector<int> arg;
};

class ChainSolver {
 public:
  ChainSolver(const VariableLayout& layout, std::span<const double> cost)
      : layout_(layout), cost_(cost), T_(layout.horizon()) {}

  // value(k) is the cost of candidate k of group g beyond its own cost.
  template <typename Extra>
  Suffix solve(int g, Extra&& extra) const {
    const PlacementGroup& pg = layout_.group(g);
    std::vector<double> at(T_ + 2, kInf);
    std::vector<int> arg_at(T_ + 2, -1);
    for (int k = 0; k < static_cast<int>(pg.candidates.size()); ++k) {
      const Candidate& c = pg.candidates[k];
      const double v = cost_[pg.first_candidate + k] + extra(c);
      if (v < at[c.start]) {  // strict: candidates come in ascending group order
        at[c.start] = v;
        arg_at[c.start] = k;
      }
    }
    Suffix s{std::vector<double>(T_ + 2, kInf), std::vector<int>(T_ + 2, -1)};
    for (int e = T_; e >= 1; --e) {
      if (at[e] <= s.best[e + 1]) {
        s.best[e] = at[e];
        s.arg[e] = arg_at[e];
      } else {
        s.best[e] = s.best[e + 1];
        s.arg[e] = s.arg[e + 1];
      }
    }
    return s;
  }

  double lookup(const Suffix& s, int e) const { return e <= T_ ? s.best[e] : kInf; }

 private:
  const VariableLayout& layout_;
  std::span<const double> cost_;
  int T_;
};

}  // namespace

JobSolution solve_job_dp(const Instance& inst, const VariableLayout& layout, int job,
                         std::span<const double> cost) {
  const Job& spec = inst.jobs[job];
  const int J = spec.num_ops();
  const int S = inst.shift_length;
  const int T = inst.horizon;
  const ChainSolver solver(layout, cost);
  const int ns = num_scenarios(spec);

  auto tardiness = [&](int s, int c) {
    return spec.weight * layout.scenario_weight(job, s) * std::max(c - spec.due_date, 0);
  };

  // suffix[s][j - first_op(s)] for every scenario.
  std::vector<std::vector<Suffix>> suffix(ns);
  for (int s = 1; s < ns; ++s) {
    const ScenarioKey key = scenario_key(job, s);
    suffix[s].resize(J - key.first_op());
    for (int j = J - 1; j >= key.first_op(); --j) {
      const int g = layout.group_index(job, s, j);
      if (j == J - 1) {
        suffix[s][j - key.first_op()] = solver.solve(g, [&](const Candidate& c) { return tardiness(s, c.completion()); });
      } else {
        const Suffix& next = suffix[s][j + 1 - key.first_op()];
        suffix[s][j - key.first_op()] =
            solver.solve(g, [&](const Candidate& c) { return solver.lookup(next, c.completion() + 1); });
      }
    }
  }
  auto restart_cost = [&](int j, int c) {
    const int e = shift_restart(c, S);
    if (e > T) return kInf;
    return solver.lookup(suffix[1 + 2 * j][0], e) + solver.lookup(suffix[2 + 2 * j][0], e);
  };
  suffix[0].resize(J);
  for (int j = J - 1; j >= 0; --j) {
    const int g = layout.group_index(job, 0, j);
    if (j == J - 1) {
      suffix[0][j] = solver.solve(g, [&](const Candidate& c) {
        return restart_cost(j, c.completion()) + tardiness(0, c.completion());
      });
    } else {
      const Suffix& next = suffix[0][j + 1];
      suffix[0][j] = solver.solve(g, [&](const Candidate& c) {
        return restart_cost(j, c.completion()) + solver.lookup(next, c.completion() + 1);
      });
    }
  }

  JobSolution out;
  out.cost = suffix[0][0].best[1];
  if (!(out.cost < kInf)) throw std::runtime_error("job " + std::to_string(job + 1) + " has no schedule within the horizon");
  out.choices.assign(layout.job_end(job) - layout.job_begin(job), -1);
  auto trace = [&](int s, int e) {
    const ScenarioKey key = scenario_key(job, s);
    std::vector<int> completions(J, 0);
    for (int j = key.first_op(); j < J; ++j) {
      const int g = layout.group_index(job, s, j);
      const int k = suffix[s][j - key.first_op()].arg[e];
      out.choices[g - layout.job_begin(job)] = k;
      completions[j] = layout.group(g).candidates[k].completion();
      e = completions[j] + 1;
    }
    return completions;
  };
  const std::vector<int> first = trace(0, 1);
  for (int j = 0; j < J; ++j) {
    const int e = shift_restart(first[j], S);
    trace(1 + 2 * j, e);
    trace(2 + 2 * j, e);
  }
  return out;
}

}  // namespace sjs::slblr
