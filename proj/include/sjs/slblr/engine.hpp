#pragma once

#include <chrono>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sjs/feasibility.hpp"
#include "sjs/instance.hpp"
#include "sjs/layout.hpp"
#include "sjs/milp/backend.hpp"
#include "sjs/schedule.hpp"
#include "sjs/slblr/dual.hpp"

namespace sjs::slblr {

struct SurrogateEvaluation {
  std::vector<double> g;     // per cell: load + z - C
  double lagrangian = 0.0;   // sum of job costs + sum(lambda g + rho |g|)
  double gnorm2 = 0.0;
  double job_cost = 0.0;     // sum of expected weighted tardiness
};

// Expected-occupancy load per cell of the given choices (one per layout group).
std::vector<double> cell_load(const VariableLayout& layout, std::span<const int> choices);

// Capacity per cell.
std::vector<double> cell_capacity(const Instance& inst);

// Expected weighted tardiness of job i under the given choices.
double job_cost(const VariableLayout& layout, int job, std::span<const int> choices);

SurrogateEvaluation surrogate_subgradient(const Instance& inst, const VariableLayout& layout,
                                          std::span<const int> choices,
                                          std::span<const double> lambda, double rho);

// Certified lower bound q(lambda) = sum_i min_x (o_i + lambda . g_i) - lambda . C,
// each job minimized exactly by dynamic programming.
// When `choices` is given it receives the minimizing placements.
double evaluate_dual_bound(const Instance& inst, const VariableLayout& layout,
                           std::span<const double> lambda, std::vector<int>* choices = nullptr);

// Same bound with each job minimized by the MILP backend on its relaxed
// model; nullopt when some job does not reach OPTIMAL within the budget.
std::optional<double> evaluate_dual_bound(const Instance& inst, const VariableLayout& layout,
                                          std::span<const double> lambda,
                                          const milp::SolverBackend& backend,
                                          const milp::Budget& budget);

struct ConvergenceRow {
  long long k = 0;
  double lagrangian = 0.0;
  double gnorm = 0.0;
  double step = 0.0;
  double level = 0.0;
  double rho = 0.0;
  double best_bound = -std::numeric_limits<double>::infinity();
  double best_feasible = std::numeric_limits<double>::infinity();
  double wall_ms = 0.0;
};

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows);

struct SolveReport {
  HyperParams params;  // resolved
  double best_feasible = std::numeric_limits<double>::infinity();
  Schedule best_schedule;
  std::string feasible_source;
  double best_bound = -std::numeric_limits<double>::infinity();
  long long bound_iteration = -1;
  GapReport gap;
  long long iterations = 0;
  double wall_seconds = 0.0;
  std::string stop_reason;
  long long accepted = 0, rejected = 0;
  long long level_updates = 0, level_breaches = 0, stationary = 0;
  long long level_cuts = 0;   // stall rule
  long long detections = 0;  // feasibility systems actually solved
  long long repairs = 0, repairs_ok = 0;
  long long list_trials = 0;
  long long weak_duality_violations = 0;
  long long infeasible_schedules = 0;  // candidates that failed check_feasible (never accepted)
  std::vector<double> bounds;          // every certified bound computed
  std::vector<double> feasible_costs;  // every feasible schedule found
  std::vector<ConvergenceRow> trace;
  std::string simd;
};

// Surrogate level-based Lagrangian relaxation over the capacity rows.
class Engine {
 public:
  Engine(const Instance& inst, HyperParams params, const milp::SolverBackend& backend);

  // One pass of subproblem solve, surrogate evaluation, step, multiplier and
  // penalty update, divergence detection and (when due) bound evaluation and
  // repair.
  void iterate();
  SolveReport run();

  const DualState& state() const { return state_; }
  const SurrogateEvaluation& evaluation() const { return eval_; }
  const std::vector<int>& choices() const { return choices_; }
  const SolveReport& report() const { return report_; }
  const VariableLayout& layout() const { return layout_; }

  // Starts from these multipliers instead of zero.
  void warm_start(std::span<const double> lambda);
  // Evaluates q(lambda) now and folds it into the report.
  double update_bound();
  // Repairs the current subproblem solutions; true if a feasible schedule came back.
  bool repair_now();
  bool done() const;

 private:
  void accept_feasible(const Schedule& s, double cost, const std::string& source);
  // List-schedules from a relaxed plan, then tries perturbed priorities of
  // the best reference plan seen so far.
  void list_heuristic(const Schedule& relaxed, const std::string& source);
  void solve_subproblem(int job);
  void push_trace();
  bool window_feasible();
  double elapsed() const;

  const Instance& inst_;
  VariableLayout layout_;
  HyperParams params_;
  const milp::SolverBackend& backend_;
  std::vector<double> cap_;
  std::vector<int> choices_;
  std::vector<double> load_;
  DualState state_;
  SurrogateEvaluation eval_;
  SolveReport report_;
  std::vector<double> witness_;
  int next_job_ = 0;
  int stall_ = 0;
  Schedule best_reference_;
  double best_reference_cost_ = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace sjs::slblr
