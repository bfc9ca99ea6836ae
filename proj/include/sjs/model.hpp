#pragma once

#include <span>
#include <vector>

#include "sjs/instance.hpp"
#include "sjs/layout.hpp"
#include "sjs/milp/model.hpp"
#include "sjs/schedule.hpp"

namespace sjs {

// A MILP built from the time-indexed formulation plus the maps back to the
// layout. Variable indices are -1 where a symbol was not materialized.
struct BuiltModel {
  milp::MilpModel model;
  std::vector<int> jobs;              // jobs whose placements are variables
  std::vector<int> x_begin;           // per layout group: first x variable, -1 if absent
  std::vector<std::vector<int>> tardiness;  // [job][scenario]
  std::vector<std::vector<int>> shift;      // [job][scenario], second attempts only
  std::vector<int> slack;             // per cell: z
  std::vector<int> over, under;       // per cell: v+ and v- (subproblems with rho > 0)
  std::vector<int> capacity_row;      // per cell
  std::vector<int> sos;               // per layout group: SOS1 index, -1 if absent
  std::vector<double> cell_rhs;       // per cell: C, or C minus fixed load
  std::vector<double> cell_lambda;    // per cell (subproblems)
  double rho = 0.0;

  int x(int group, int candidate) const { return x_begin[group] + candidate; }
};

// Full stochastic model: SOS1 start choices, precedence, restart and shift
// rules, expected-capacity rows in slack form, tardiness objective.
// Throws std::invalid_argument when the instance is invalid or the greedy
// probe finds no schedule within the horizon.
BuiltModel build_full_model(const Instance& inst, const VariableLayout& layout);

// Relaxed model for the jobs in `subset` with the others held at
// `fixed_choices` (one candidate per layout group; entries of subset jobs are
// ignored). Each cell contributes lambda * (own load + z) plus rho times the
// absolute residual own + others + z - C. Cells the subset cannot reach add
// their closed-form minimum to the objective offset. With rho = 0 the cells
// are priced into the x coefficients and no capacity rows are created.
BuiltModel build_subproblem_model(const Instance& inst, const VariableLayout& layout,
                                  std::span<const int> subset, std::span<const int> fixed_choices,
                                  std::span<const double> lambda, double rho);

// Full model plus -delta_j <= b - b_anchor <= delta_j for every placement;
// delta is indexed by operation (the last entry repeats). Anchor starts are
// set as branching hints.
BuiltModel build_repair_model(const Instance& inst, const VariableLayout& layout,
                              std::span<const int> anchor_choices, std::span<const int> delta);

// Expected weighted tardiness computed from the closed-form scenario weights.
// Throws std::invalid_argument on a missing placement.
double evaluate_objective(const Instance& inst, const Schedule& schedule);

// Complete variable vector for the model given one candidate per group of
// the model's jobs: continuous and integer variables take their cheapest
// values. Returns an empty vector if a choice is missing.
std::vector<double> encode_choices(const BuiltModel& built, const VariableLayout& layout,
                                   std::span<const int> choices);

// Candidate per layout group read from a solution; groups of jobs outside the
// model keep their entry in `base` (or -1).
std::vector<int> decode_choices(const BuiltModel& built, const VariableLayout& layout,
                                std::span<const double> values,
                                std::span<const int> base = {});

}  // namespace sjs
