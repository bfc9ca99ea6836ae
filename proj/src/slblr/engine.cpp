#include "sjs/slblr/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "sjs/dispatch.hpp"
#include "sjs/kernels.hpp"
#include "sjs/milp/builtin.hpp"
#include "sjs/model.hpp"
#include "sjs/slblr/job_dp.hpp"

namespace sjs::slblr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void add_job_load(const VariableLayout& layout, int job, std::span<const int> choices,
                  double sign, std::vector<double>& load) {
  for (int g = layout.job_begin(job); g < layout.job_end(job); ++g) {
    const PlacementGroup& pg = layout.group(g);
    const Candidate& c = pg.candidates[choices[g]];
    const double w = sign * pg.capacity_weight;
    for (int t = c.start; t <= c.completion(); ++t) load[layout.cell(c.group, t)] += w;
  }
}

// lambda * a plus the cheapest slack penalty of a cell whose total load is a.
double cell_price(double a, double cap, double lambda, double rho) {
  const double r = a - cap;
  if (r >= 0.0) return lambda * a + rho * r;
  return lambda * a + std::min(lambda, rho) * (-r);
}

}  // namespace

std::vector<double> cell_load(const VariableLayout& layout, std::span<const int> choices) {
  std::vector<double> load(layout.num_cells(), 0.0);
  const Instance& inst = layout.instance();
  for (int j = 0; j < inst.num_jobs(); ++j) add_job_load(layout, j, choices, 1.0, load);
  return load;
}

std::vector<double> cell_capacity(const Instance& inst) {
  std::vector<double> cap(static_cast<size_t>(inst.num_groups()) * inst.horizon);
  for (int m = 0; m < inst.num_groups(); ++m)
    std::fill_n(cap.begin() + static_cast<long>(m) * inst.horizon, inst.horizon,
                static_cast<double>(inst.machine_groups[m].capacity));
  return cap;
}

double job_cost(const VariableLayout& layout, int job, std::span<const int> choices) {
  const Job& jb = layout.instance().jobs[job];
  const int last = jb.num_ops() - 1;
  double sum = 0.0;
  for (int s = 0; s < num_scenarios(jb); ++s) {
    const int g = layout.group_index(job, s, last);
    const int c = layout.group(g).candidates[choices[g]].completion();
    sum += layout.scenario_weight(job, s) * std::max(0, c - jb.due_date);
  }
  return jb.weight * sum;
}

SurrogateEvaluation surrogate_subgradient(const Instance& inst, const VariableLayout& layout,
                                          std::span<const int> choices,
                                          std::span<const double> lambda, double rho) {
  SurrogateEvaluation ev;
  const std::vector<double> load = cell_load(layout, choices);
  const std::vector<double> cap = cell_capacity(inst);
  ev.g.assign(load.size(), 0.0);
  const double cells = kernels::surrogate_cells(load, cap, lambda, rho, ev.g);
  for (int j = 0; j < inst.num_jobs(); ++j) ev.job_cost += job_cost(layout, j, choices);
  ev.lagrangian = ev.job_cost + cells;
  ev.gnorm2 = kernels::squared_norm(ev.g);
  return ev;
}

double evaluate_dual_bound(const Instance& inst, const VariableLayout& layout,
                           std::span<const double> lambda, std::vector<int>* choices) {
  std::vector<double> cost(layout.num_candidates(), 0.0);
  for (const PlacementGroup& pg : layout.groups()) {
    for (size_t k = 0; k < pg.candidates.size(); ++k) {
      const Candidate& c = pg.candidates[k];
      double sum = 0.0;
      for (int t = c.start; t <= c.completion(); ++t) sum += lambda[layout.cell(c.group, t)];
      cost[pg.first_candidate + k] = pg.capacity_weight * sum;
    }
  }
  if (choices) choices->assign(layout.num_groups(), 0);
  double q = 0.0;
  for (int j = 0; j < inst.num_jobs(); ++j) {
    const JobSolution s = solve_job_dp(inst, layout, j, cost);
    q += s.cost;
    if (choices) std::copy(s.choices.begin(), s.choices.end(), choices->begin() + layout.job_begin(j));
  }
  const std::vector<double> cap = cell_capacity(inst);
  return q - kernels::dot(lambda, cap);
}

std::optional<double> evaluate_dual_bound(const Instance& inst, const VariableLayout& layout,
                                          std::span<const double> lambda,
                                          const milp::SolverBackend& backend,
                                          const milp::Budget& budget) {
  // Any complete choice vector: with rho = 0 the other jobs' loads do not
  // enter the job model.
  std::vector<int> base(layout.num_groups(), 0);
  double q = 0.0;
  for (int j = 0; j < inst.num_jobs(); ++j) {
    const int subset[] = {j};
    const BuiltModel built = build_subproblem_model(inst, layout, subset, base, lambda, 0.0);
    const milp::MilpSolution sol = backend.solve(built.model, budget);
    if (sol.status != milp::Status::kOptimal) return std::nullopt;
    q += sol.objective;
  }
  const std::vector<double> cap = cell_capacity(inst);
  return q - kernels::dot(lambda, cap);
}

void write_convergence_csv(std::ostream& out, std::span<const ConvergenceRow> rows) {
  out << "k,L,gnorm,step,level,rho,best_bound,best_feasible,wall_ms\n";
  auto num = [&](double v) {
    if (std::isinf(v)) out << (v > 0 ? "inf" : "-inf");
    else out << v;
  };
  const auto old = out.precision(12);
  for (const ConvergenceRow& r : rows) {
    out << r.k << ',';
    num(r.lagrangian); out << ',';
    num(r.gnorm); out << ',';
    num(r.step); out << ',';
    num(r.level); out << ',';
    num(r.rho); out << ',';
    num(r.best_bound); out << ',';
    num(r.best_feasible); out << ',';
    num(r.wall_ms); out << '\n';
  }
  out.precision(old);
}

Engine::Engine(const Instance& inst, HyperParams params, const milp::SolverBackend& backend)
    : inst_(inst), layout_(inst), backend_(backend), rng_(params.seed),
      start_(std::chrono::steady_clock::now()) {
  if (inst.num_jobs() == 0) throw std::invalid_argument("instance has no jobs");
  double mean_w = 0.0;
  for (const Job& j : inst.jobs) mean_w += j.weight;
  mean_w /= inst.num_jobs();
  cap_ = cell_capacity(inst);
  params_ = resolve(params, mean_w, std::sqrt(kernels::squared_norm(cap_)), inst.shift_length);
  report_.params = params_;
  report_.simd = kernels::to_string(kernels::active_isa());

  state_.lambda.assign(layout_.num_cells(), 0.0);
  state_.rho = params_.rho0;
  state_.window.push_back(state_.lambda);

  // Initial subproblem solutions at zero multipliers.
  std::vector<double> zero(layout_.num_candidates(), 0.0);
  choices_.assign(layout_.num_groups(), 0);
  for (int j = 0; j < inst.num_jobs(); ++j) {
    const JobSolution s = solve_job_dp(inst, layout_, j, zero);
    std::copy(s.choices.begin(), s.choices.end(), choices_.begin() + layout_.job_begin(j));
  }
  load_ = cell_load(layout_, choices_);

  double upper = 0.0;
  for (const Job& j : inst.jobs) upper += j.weight * inst.horizon;
  if (std::optional<Schedule> greedy = greedy_schedule(inst)) {
    if (check_feasible(inst, *greedy).empty())
      accept_feasible(*greedy, evaluate_objective(inst, *greedy), "greedy");
  }
  state_.level = params_.level0 >= 0.0 ? params_.level0
                 : std::isfinite(report_.best_feasible) ? report_.best_feasible
                                                        : upper;
  eval_ = surrogate_subgradient(inst, layout_, choices_, state_.lambda, state_.rho);
}

double Engine::elapsed() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

void Engine::warm_start(std::span<const double> lambda) {
  if (static_cast<int>(lambda.size()) != layout_.num_cells())
    throw std::invalid_argument("warm-start multipliers have the wrong length");
  state_.lambda.assign(lambda.begin(), lambda.end());
  for (double& v : state_.lambda) v = std::max(0.0, v);
  state_.window.assign(1, state_.lambda);
  state_.records.clear();
  witness_.clear();
  eval_ = surrogate_subgradient(inst_, layout_, choices_, state_.lambda, state_.rho);
}

bool Engine::window_feasible() {
  // A witness of the previous window stays valid when the oldest row is
  // dropped; only a newly appended row it violates needs a fresh solve.
  const auto& w = state_.window;
  if (!witness_.empty()) {
    const std::vector<double>& a = w[w.size() - 2];
    const std::vector<double>& b = w.back();
    double lhs = 0.0, rhs = 0.0;
    for (size_t c = 0; c < a.size(); ++c) {
      lhs += 2.0 * (a[c] - b[c]) * witness_[c];
      rhs += a[c] * a[c] - b[c] * b[c];
    }
    if (lhs <= rhs) return true;
  }
  DivergenceVerdict v = detect_divergence(w);
  ++report_.detections;
  if (v.feasible) witness_ = std::move(v.witness);
  else witness_.clear();
  return v.feasible;
}

void Engine::accept_feasible(const Schedule& s, double cost, const std::string& source) {
  if (!check_feasible(inst_, s).empty()) {
    ++report_.infeasible_schedules;
    return;
  }
  report_.feasible_costs.push_back(cost);
  const double tol = 1e-9 * std::max(1.0, std::abs(cost));
  if (cost < report_.best_bound - tol) ++report_.weak_duality_violations;
  if (cost < report_.best_feasible) {
    state_.level = std::min(state_.level, cost);
    report_.best_feasible = cost;
    report_.best_schedule = s;
    report_.feasible_source = source;
  }
}

void Engine::list_heuristic(const Schedule& relaxed, const std::string& source) {
  auto consider = [&](const Schedule& reference) {
    ++report_.list_trials;
    const std::optional<Schedule> s = list_schedule(inst_, reference);
    if (!s || !check_feasible(inst_, *s).empty()) return false;
    const double cost = evaluate_objective(inst_, *s);
    const bool better = cost <= best_reference_cost_;
    if (better) {
      best_reference_ = reference;
      best_reference_cost_ = cost;
    }
    if (cost < report_.best_feasible) accept_feasible(*s, cost, source);
    return better;
  };
  consider(relaxed);
  if (!std::isfinite(best_reference_cost_)) return;
  std::uniform_int_distribution<int> shift(-inst_.shift_length, inst_.shift_length);
  for (int n = 0; n < params_.list_trials; ++n) {
    // Move one or two scenario chains of random jobs earlier or later.
    Schedule trial = best_reference_;
    const int moves = 1 + static_cast<int>(rng_() % 2);
    for (int m = 0; m < moves; ++m) {
      const int i = static_cast<int>(rng_() % inst_.num_jobs());
      const int sc = static_cast<int>(rng_() % num_scenarios(inst_.jobs[i]));
      const ScenarioKey key = scenario_key(i, sc);
      const int d = shift(rng_);
      for (int j = key.first_op(); j < inst_.jobs[i].num_ops(); ++j) {
        Placement& p = trial.at(key, j);
        p.start = std::max(1, p.start + d);
      }
    }
    consider(trial);
  }
}

double Engine::update_bound() {
  std::vector<int> relaxed;
  const double q = evaluate_dual_bound(inst_, layout_, state_.lambda, &relaxed);
  list_heuristic(layout_.to_schedule(relaxed), "list@" + std::to_string(state_.k));
  report_.bounds.push_back(q);
  const double tol = 1e-9 * std::max(1.0, std::abs(q));
  if (q > report_.best_feasible + tol) ++report_.weak_duality_violations;
  if (q > report_.best_bound + 1e-9 * std::max(1.0, std::abs(q))) {
    stall_ = 0;
  } else if (params_.stall_bounds > 0 && ++stall_ >= params_.stall_bounds) {
    // The level still overestimates by more than the steps can absorb; move
    // it halfway to the certified bound, which it never crosses.
    state_.level = report_.best_bound + 0.5 * (state_.level - report_.best_bound);
    ++report_.level_cuts;
    stall_ = 0;
    state_.window.assign(1, state_.lambda);
    state_.records.clear();
    witness_.clear();
  }
  if (q > report_.best_bound) {
    report_.best_bound = q;
    report_.bound_iteration = state_.k;
  }
  return q;
}

bool Engine::repair_now() {
  ++report_.repairs;
  RepairOptions opt;
  opt.delta = params_.delta;
  opt.delta_max = params_.delta_max;
  const double remaining = params_.time_limit - elapsed();
  opt.budget.time_limit_s = std::max(0.0, std::min(params_.repair_time_limit, remaining));
  const RepairResult r =
      repair_schedule(inst_, layout_, layout_.to_schedule(choices_), backend_, opt);
  if (!r.improved) return false;
  ++report_.repairs_ok;
  accept_feasible(r.schedule, r.cost, "repair@" + std::to_string(state_.k));
  return true;
}

void Engine::solve_subproblem(int job) {
  const std::span<const int> all(choices_);
  add_job_load(layout_, job, all, -1.0, load_);

  std::vector<double> cost(layout_.num_candidates(), 0.0);
  for (int g = layout_.job_begin(job); g < layout_.job_end(job); ++g) {
    const PlacementGroup& pg = layout_.group(g);
    for (size_t k = 0; k < pg.candidates.size(); ++k) {
      const Candidate& c = pg.candidates[k];
      double sum = 0.0;
      for (int t = c.start; t <= c.completion(); ++t) {
        const int cell = layout_.cell(c.group, t);
        const double o = load_[cell], l = state_.lambda[cell];
        sum += cell_price(o + pg.capacity_weight, cap_[cell], l, state_.rho) -
               cell_price(o, cap_[cell], l, state_.rho);
      }
      cost[pg.first_candidate + k] = sum;
    }
  }
  const JobSolution dp = solve_job_dp(inst_, layout_, job, cost);

  std::vector<int> candidate(choices_);
  std::copy(dp.choices.begin(), dp.choices.end(), candidate.begin() + layout_.job_begin(job));

  if (params_.subproblem_nodes > 0 && state_.rho > 0.0) {
    // The per-cell prices treat the job's own placements one at a time; the
    // exact model charges their combined load in shared cells.
    const int subset[] = {job};
    BuiltModel built =
        build_subproblem_model(inst_, layout_, subset, choices_, state_.lambda, state_.rho);
    built.model.set_start(encode_choices(built, layout_, candidate));
    for (int g = layout_.job_begin(job); g < layout_.job_end(job); ++g)
      if (built.sos[g] >= 0)
        built.model.set_hint(built.sos[g], layout_.group(g).candidates[candidate[g]].start);
    milp::Budget budget;
    budget.node_limit = params_.subproblem_nodes;
    const milp::MilpSolution sol = milp::solve_builtin(built.model, budget);
    if (sol.has_solution()) candidate = decode_choices(built, layout_, sol.values, choices_);
  }

  add_job_load(layout_, job, all, 1.0, load_);
  const SurrogateEvaluation trial =
      surrogate_subgradient(inst_, layout_, candidate, state_.lambda, state_.rho);
  const double tol = 1e-12 * std::max(1.0, std::abs(eval_.lagrangian));
  if (trial.lagrangian < eval_.lagrangian - tol) {
    choices_ = std::move(candidate);
    load_ = cell_load(layout_, choices_);
    eval_ = trial;
    ++report_.accepted;
  } else {
    ++report_.rejected;
  }
}

void Engine::push_trace() {
  ConvergenceRow row;
  row.k = state_.k;
  row.lagrangian = eval_.lagrangian;
  row.gnorm = std::sqrt(eval_.gnorm2);
  row.step = state_.step;
  row.level = state_.level;
  row.rho = state_.rho;
  row.best_bound = report_.best_bound;
  row.best_feasible = report_.best_feasible;
  row.wall_ms = elapsed() * 1e3;
  report_.trace.push_back(row);
}

bool Engine::done() const {
  if (std::isfinite(report_.best_bound) && std::isfinite(report_.best_feasible)) {
    const GapReport gap = compute_gap(report_.best_feasible, report_.best_bound);
    if (gap.gap <= params_.target_gap) return true;
  }
  if (elapsed() >= params_.time_limit) return true;
  if (params_.max_iterations >= 0 && state_.k >= params_.max_iterations) return true;
  return false;
}

void Engine::iterate() {
  // Multipliers moved since the last evaluation; re-price the current solutions.
  eval_ = surrogate_subgradient(inst_, layout_, choices_, state_.lambda, state_.rho);
  for (int n = 0; n < params_.group_size; ++n) {
    solve_subproblem(next_job_);
    next_job_ = (next_job_ + 1) % inst_.num_jobs();
  }
  ++state_.k;

  bool repaired = false;
  const bool small = std::sqrt(eval_.gnorm2) <= params_.eps_violation;
  const bool due = params_.repair_every > 0 && state_.k % params_.repair_every == 0;
  if (small || due) {
    repair_now();
    repaired = true;
  }

  // Cells pinned at zero with negative residual cannot move; they are left
  // out of the direction so they do not shrink the step.
  std::vector<double> dir(eval_.g);
  for (size_t c = 0; c < dir.size(); ++c)
    if (dir[c] < 0.0 && state_.lambda[c] <= 0.0) dir[c] = 0.0;
  const double dnorm2 = kernels::squared_norm(dir);

  StepOutcome step =
      compute_stepsize(state_.level, eval_.lagrangian, dnorm2, params_.gamma, params_.zeta);
  if (step.kind == StepKind::kLevelBreach) {
    ++report_.level_breaches;
    const double floor = 0.01 * std::max(1.0, std::abs(eval_.lagrangian));
    state_.level = eval_.lagrangian + std::max(state_.step * dnorm2 / params_.gamma, floor);
    state_.window.assign(1, state_.lambda);
    state_.records.clear();
    witness_.clear();
    step = compute_stepsize(state_.level, eval_.lagrangian, dnorm2, params_.gamma,
                            params_.zeta);
  }
  if (step.kind == StepKind::kStationary) {
    ++report_.stationary;
    if (!repaired) repair_now();
    state_.step = 0.0;
  } else {
    state_.step = step.step;
    state_.records.push_back({step.step, dnorm2, eval_.lagrangian});
    update_multipliers(state_, dir, step.step);
    if (static_cast<int>(state_.window.size()) > params_.window_cap + 1) {
      state_.window.erase(state_.window.begin());
      state_.records.erase(state_.records.begin());
    }
    if (state_.window.size() >= 2 && !window_feasible()) {
      state_.level = update_level(state_.records, params_.gamma);
      ++report_.level_updates;
      state_.window.assign(1, state_.lambda);
      state_.records.clear();
      witness_.clear();
    }
  }
  state_.rho = std::min(state_.rho + params_.beta, params_.rho_max);

  if (params_.bound_every > 0 && state_.k % params_.bound_every == 0) update_bound();
  push_trace();
}

SolveReport Engine::run() {
  update_bound();
  push_trace();
  while (!done()) iterate();
  if (state_.k % std::max(1, params_.bound_every) != 0) update_bound();
  if (!std::isfinite(report_.best_feasible) && elapsed() < params_.time_limit) repair_now();

  if (report_.trace.empty() || report_.trace.back().best_bound != report_.best_bound ||
      report_.trace.back().best_feasible != report_.best_feasible)
    push_trace();
  report_.iterations = state_.k;
  report_.wall_seconds = elapsed();
  if (std::isfinite(report_.best_bound) && std::isfinite(report_.best_feasible) &&
      compute_gap(report_.best_feasible, report_.best_bound).gap <= params_.target_gap)
    report_.stop_reason = "target_gap";
  else if (params_.max_iterations >= 0 && state_.k >= params_.max_iterations)
    report_.stop_reason = "iteration_limit";
  else
    report_.stop_reason = "time_limit";
  if (std::isfinite(report_.best_feasible))
    report_.gap = compute_gap(report_.best_feasible, report_.best_bound,
                              "dual@" + std::to_string(report_.bound_iteration));
  return report_;
}

}  // namespace sjs::slblr
