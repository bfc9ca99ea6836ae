#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "sjs/dispatch.hpp"
#include "sjs/feasibility.hpp"
#include "sjs/generate.hpp"
#include "sjs/milp/builtin.hpp"
#include "sjs/milp/enumerate.hpp"
#include "sjs/model.hpp"
#include "sjs/slblr/engine.hpp"
#include "sjs/slblr/job_dp.hpp"
#include "support.hpp"

using namespace sjs;
using namespace sjs::slblr;

namespace {

test::TinyShape small_shape() {
  test::TinyShape s;
  s.max_jobs = 2;
  s.max_ops = 2;
  s.max_groups = 2;
  s.max_proc = 2;
  s.shift = 4;
  return s;
}

std::vector<double> random_lambda(test::Rng& rng, const VariableLayout& layout, double hi) {
  std::vector<double> l(layout.num_cells());
  for (double& v : l) v = test::uniform_int(rng, 0, 3) == 0 ? 0.0 : test::uniform_real(rng, 0.0, hi);
  return l;
}

std::vector<double> candidate_prices(const VariableLayout& layout, const std::vector<double>& l) {
  std::vector<double> cost(layout.num_candidates(), 0.0);
  for (const PlacementGroup& pg : layout.groups())
    for (size_t k = 0; k < pg.candidates.size(); ++k) {
      const Candidate& c = pg.candidates[k];
      for (int t = c.start; t <= c.completion(); ++t)
        cost[pg.first_candidate + k] += pg.capacity_weight * l[layout.cell(c.group, t)];
    }
  return cost;
}

// A copy of the instance whose capacities never bind.
Instance uncapacitated(Instance inst) {
  for (auto& g : inst.machine_groups) g.capacity = 1000;
  return inst;
}

}  // namespace

TEST_CASE("job DP equals exhaustive enumeration of the job subproblem") {
  test::Rng rng(31);
  int compared = 0;
  for (int trial = 0; trial < 80; ++trial) {
    Instance inst = test::random_instance(rng, small_shape());
    if (inst.horizon > 12) continue;
    VariableLayout layout(inst);
    auto lambda = random_lambda(rng, layout, 1.5);
    auto cost = candidate_prices(layout, lambda);
    std::vector<int> base(layout.num_groups(), 0);
    for (int j = 0; j < inst.num_jobs(); ++j) {
      const int subset[] = {j};
      BuiltModel built = build_subproblem_model(inst, layout, subset, base, lambda, 0.0);
      if (milp::enumeration_size(built.model) > 2e6) continue;
      milp::MilpSolution exact = milp::enumerate_all(built.model);
      JobSolution dp = solve_job_dp(inst, layout, j, cost);
      REQUIRE(exact.status == milp::Status::kOptimal);
      CHECK(dp.cost == doctest::Approx(exact.objective).epsilon(1e-9));
      ++compared;
    }
  }
  CHECK(compared >= 30);
}

TEST_CASE("job DP choices obey the job's own rules and price to the reported cost") {
  test::Rng rng(37);
  for (int trial = 0; trial < 150; ++trial) {
    test::TinyShape shape;
    shape.max_jobs = 3;
    shape.max_ops = 4;
    shape.shift = 4;
    Instance inst = uncapacitated(test::random_instance(rng, shape));
    inst.horizon += inst.shift_length;
    VariableLayout layout(inst);
    auto lambda = random_lambda(rng, layout, 2.0);
    auto cost = candidate_prices(layout, lambda);
    std::vector<int> choices(layout.num_groups(), 0);
    double priced = 0.0, total = 0.0;
    for (int j = 0; j < inst.num_jobs(); ++j) {
      JobSolution dp = solve_job_dp(inst, layout, j, cost);
      REQUIRE(static_cast<int>(dp.choices.size()) == layout.job_end(j) - layout.job_begin(j));
      std::copy(dp.choices.begin(), dp.choices.end(), choices.begin() + layout.job_begin(j));
      total += dp.cost;
      for (int g = layout.job_begin(j); g < layout.job_end(j); ++g)
        priced += cost[layout.group(g).first_candidate + choices[g]];
    }
    Schedule s = layout.to_schedule(choices);
    CHECK(check_feasible(inst, s).empty());
    CHECK(total == doctest::Approx(priced + test::oracle_objective(inst, s)).epsilon(1e-9));
  }
}

TEST_CASE("dual bound: dynamic programming and MILP routes agree") {
  test::Rng rng(41);
  milp::BuiltinBackend backend;
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Instance inst = test::random_instance(rng, small_shape());
    if (inst.horizon > 12) continue;
    VariableLayout layout(inst);
    auto lambda = random_lambda(rng, layout, 1.0);
    double dp = evaluate_dual_bound(inst, layout, lambda);
    milp::Budget budget;
    budget.time_limit_s = 30;
    std::optional<double> mip = evaluate_dual_bound(inst, layout, lambda, backend, budget);
    REQUIRE(mip.has_value());
    CHECK(dp == doctest::Approx(*mip).epsilon(1e-9));
    ++compared;
  }
  CHECK(compared >= 10);
}

TEST_CASE("dual bound never exceeds the optimum") {
  test::Rng rng(43);
  int compared = 0;
  for (int trial = 0; trial < 60 && compared < 15; ++trial) {
    Instance inst = test::random_instance(rng, small_shape());
    if (inst.horizon > 12) continue;
    VariableLayout layout(inst);
    BuiltModel full = build_full_model(inst, layout);
    if (milp::enumeration_size(full.model) > 1e6) continue;
    milp::MilpSolution opt = milp::enumerate_all(full.model);
    REQUIRE(opt.status == milp::Status::kOptimal);
    for (int k = 0; k < 10; ++k) {
      auto lambda = random_lambda(rng, layout, 3.0);
      CHECK(evaluate_dual_bound(inst, layout, lambda) <= opt.objective + 1e-9);
    }
    std::vector<double> zero(layout.num_cells(), 0.0);
    CHECK(evaluate_dual_bound(inst, layout, zero) <= opt.objective + 1e-9);
    ++compared;
  }
  CHECK(compared >= 5);
}

TEST_CASE("engine invariants over a run") {
  GeneratorConfig c;
  c.jobs = 5;
  c.seed = 3;
  Instance inst = generate_instance(c);
  milp::BuiltinBackend backend;
  HyperParams p;
  p.time_limit = 60;
  p.max_iterations = 300;
  p.target_gap = 1e-6;
  p.bound_every = 10;
  Engine engine(inst, p, backend);
  while (!engine.done()) {
    engine.iterate();
    for (double l : engine.state().lambda) REQUIRE(l >= 0.0);
  }
  const SolveReport& r = engine.report();
  CHECK(r.weak_duality_violations == 0);
  CHECK(r.infeasible_schedules == 0);
  REQUIRE(!r.bounds.empty());
  REQUIRE(!r.feasible_costs.empty());
  for (double b : r.bounds)
    for (double f : r.feasible_costs) CHECK(b <= f + 1e-9 * std::max(1.0, f));
  CHECK(check_feasible(inst, r.best_schedule).empty());
  CHECK(evaluate_objective(inst, r.best_schedule) == doctest::Approx(r.best_feasible));
}

TEST_CASE("subproblem solutions are kept only when they lower the surrogate") {
  GeneratorConfig c;
  c.jobs = 4;
  c.seed = 8;
  Instance inst = generate_instance(c);
  milp::BuiltinBackend backend;
  HyperParams p;
  p.rho0 = 0.2;
  p.rho_max = 1.0;
  p.max_iterations = 200;
  Engine engine(inst, p, backend);
  long long seen_accept = 0;
  for (int k = 0; k < 200; ++k) {
    const std::vector<double> lambda = engine.state().lambda;
    const double rho = engine.state().rho;
    const std::vector<int> before = engine.choices();
    const double old =
        surrogate_subgradient(inst, engine.layout(), before, lambda, rho).lagrangian;
    const long long accepted = engine.report().accepted;
    engine.iterate();
    if (engine.report().accepted > accepted) {
      ++seen_accept;
      const double now =
          surrogate_subgradient(inst, engine.layout(), engine.choices(), lambda, rho).lagrangian;
      CHECK(now < old);
    } else {
      CHECK(engine.choices() == before);
    }
  }
  CHECK(seen_accept > 0);
}

TEST_CASE("list and greedy schedules are feasible") {
  test::Rng rng(47);
  for (int trial = 0; trial < 150; ++trial) {
    test::TinyShape shape;
    shape.max_jobs = 4;
    shape.max_ops = 3;
    shape.max_groups = 3;
    shape.max_proc = 3;
    shape.shift = 4;
    Instance inst = test::random_instance(rng, shape);
    std::optional<Schedule> g = greedy_schedule(inst);
    REQUIRE(g.has_value());
    CHECK(check_feasible(inst, *g).empty());
    Instance roomy = inst;
    roomy.horizon *= 3;
    Schedule ref = test::random_schedule(rng, inst);
    std::optional<Schedule> l = list_schedule(roomy, ref);
    if (l) CHECK(check_feasible(roomy, *l).empty());
  }
}

TEST_CASE("convergence CSV") {
  std::vector<ConvergenceRow> rows(2);
  rows[0].k = 0;
  rows[1].k = 20;
  rows[1].lagrangian = 12.5;
  rows[1].best_bound = 10.0;
  rows[1].best_feasible = 14.0;
  std::ostringstream out;
  write_convergence_csv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,L,gnorm,step,level,rho,best_bound,best_feasible,wall_ms");
  std::getline(in, line);
  CHECK(line == "0,0,0,0,0,0,-inf,inf,0");
  std::getline(in, line);
  CHECK(line == "20,12.5,0,0,0,0,10,14,0");
}

TEST_CASE("warm start clamps and checks length") {
  Instance inst = generate_instance(GeneratorConfig{.jobs = 3});
  milp::BuiltinBackend backend;
  Engine engine(inst, HyperParams{}, backend);
  std::vector<double> l(engine.layout().num_cells(), -1.0);
  l[0] = 2.0;
  engine.warm_start(l);
  CHECK(engine.state().lambda[0] == 2.0);
  CHECK(engine.state().lambda[1] == 0.0);
  CHECK_THROWS_AS(engine.warm_start(std::vector<double>(3, 0.0)), std::invalid_argument);
}
