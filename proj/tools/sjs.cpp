// sjs: command-line front end for the stochastic job-shop solver.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sjs/feasibility.hpp"
#include "sjs/generate.hpp"
#include "sjs/instance.hpp"
#include "sjs/instance_io.hpp"
#include "sjs/milp/backend.hpp"
#include "sjs/model.hpp"
#include "sjs/simulate.hpp"
#include "sjs/slblr/engine.hpp"
#include "sjs/solution_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kInvalidConfig = 2, kInfeasible = 3, kTimeout = 4 };

struct CliError {
  int code;
  std::string kind;
  std::string message;
  json details = json::object();
};

[[noreturn]] void fail(int code, const std::string& kind, const std::string& message,
                       json details = json::object()) {
  throw CliError{code, kind, message, std::move(details)};
}

struct SolveOptions {
  sjs::slblr::HyperParams params;
  std::string backend = "builtin";
  std::string solver_cmd;
  std::string out = ".";
  std::string warm_start;
  bool quiet = false;
};

void add_solve_options(CLI::App* app, SolveOptions& o) {
  auto& p = o.params;
  app->add_option("--gamma", p.gamma, "Step factor gamma in (0,1)")->envname("SJS_GAMMA");
  app->add_option("--zeta", p.zeta, "Level discount zeta in (0,1)")->envname("SJS_ZETA");
  app->add_option("--beta", p.beta, "Penalty increment (default 0.05 x mean weight)")
      ->envname("SJS_BETA");
  app->add_option("--rho0", p.rho0, "Initial penalty")->envname("SJS_RHO0");
  app->add_option("--rho-max", p.rho_max, "Penalty cap (default 0)")->envname("SJS_RHO_MAX");
  app->add_option("--eps-violation", p.eps_violation,
                  "Repair when the violation norm falls below this (default 1e-3 ||C||)")
      ->envname("SJS_EPS_VIOLATION");
  app->add_option("--delta", p.delta, "Initial repair window")->envname("SJS_DELTA");
  app->add_option("--delta-max", p.delta_max, "Largest repair window (default shift length)")
      ->envname("SJS_DELTA_MAX");
  app->add_option("--target-gap", p.target_gap, "Stop at this relative gap")
      ->envname("SJS_TARGET_GAP");
  app->add_option("--time-limit", p.time_limit, "Wall-clock limit in seconds")
      ->envname("SJS_TIME_LIMIT");
  app->add_option("--max-iterations", p.max_iterations, "Iteration limit (-1 = none)")
      ->envname("SJS_MAX_ITERATIONS");
  app->add_option("--bound-every", p.bound_every, "Iterations between bound evaluations")
      ->envname("SJS_BOUND_EVERY");
  app->add_option("--repair-every", p.repair_every, "Also repair every N iterations (0 = off)")
      ->envname("SJS_REPAIR_EVERY");
  app->add_option("--repair-time-limit", p.repair_time_limit, "Budget per repair, seconds")
      ->envname("SJS_REPAIR_TIME_LIMIT");
  app->add_option("--window-cap", p.window_cap, "Divergence-detection window cap")
      ->envname("SJS_WINDOW_CAP");
  app->add_option("--group-size", p.group_size, "Jobs per subproblem")->envname("SJS_GROUP_SIZE");
  app->add_option("--subproblem-nodes", p.subproblem_nodes,
                  "Branch-and-bound nodes per penalized subproblem (0 = DP only)")
      ->envname("SJS_SUBPROBLEM_NODES");
  app->add_option("--list-trials", p.list_trials, "Perturbed list schedules per bound evaluation")
      ->envname("SJS_LIST_TRIALS");
  app->add_option("--stall-bounds", p.stall_bounds,
                  "Bound evaluations without progress before the level is cut (0 = never)")
      ->envname("SJS_STALL_BOUNDS");
  app->add_option("--seed", p.seed, "Random seed")->envname("SJS_SEED");
  app->add_option("--backend", o.backend, "MILP backend")
      ->check(CLI::IsMember({"builtin", "external"}))
      ->envname("SJS_BACKEND");
  app->add_option("--solver-cmd", o.solver_cmd,
                  "External solver command with {model} {solution} {time_limit}")
      ->envname("SJS_SOLVER_CMD");
  app->add_option("--out", o.out, "Output directory")->envname("SJS_OUT");
  app->add_option("--warm-start", o.warm_start, "Multipliers file (whitespace-separated)");
  app->add_flag("--quiet", o.quiet, "No progress output");
}

void check_options(const SolveOptions& o) {
  const auto& p = o.params;
  auto bad = [](const std::string& what) { fail(kInvalidConfig, "invalid_config", what); };
  if (!(p.gamma > 0.0 && p.gamma < 1.0)) bad("--gamma must be in (0,1)");
  if (!(p.zeta > 0.0 && p.zeta < 1.0)) bad("--zeta must be in (0,1)");
  if (!(p.target_gap > 0.0 && p.target_gap <= 1.0)) bad("--target-gap must be in (0,1]");
  if (!(p.time_limit > 0.0)) bad("--time-limit must be positive");
  if (p.beta == 0.0) bad("--beta must be positive");
  if (p.rho0 < 0.0) bad("--rho0 must be nonnegative");
  if (p.bound_every < 0) bad("--bound-every must be nonnegative");
  if (p.window_cap < 1) bad("--window-cap must be positive");
  if (p.group_size < 1) bad("--group-size must be positive");
  if (p.delta < 0) bad("--delta must be nonnegative");
  if (o.backend == "external" && o.solver_cmd.empty())
    bad("--backend external requires --solver-cmd");
}

sjs::Instance read_instance(const std::string& path) {
  std::vector<std::string> warnings;
  sjs::Instance inst;
  try {
    inst = sjs::load_instance(path, &warnings);
  } catch (const sjs::FormatError& e) {
    fail(kInvalidConfig, "instance_format", e.what(), {{"path", path}, {"where", e.where()}});
  } catch (const std::runtime_error& e) {
    fail(kInvalidConfig, "instance_io", e.what(), {{"path", path}});
  }
  for (const std::string& w : warnings) std::cerr << "warning: " << path << ": " << w << "\n";
  const std::vector<sjs::Violation> bad = sjs::validate_instance(inst);
  if (!bad.empty()) {
    json list = json::array();
    for (const sjs::Violation& v : bad) list.push_back({{"field", v.field}, {"message", v.message}});
    fail(kInvalidConfig, "invalid_instance", bad.front().field + ": " + bad.front().message,
         {{"path", path}, {"violations", list}});
  }
  return inst;
}

std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(kInvalidConfig, "warm_start", "cannot open " + path);
  std::vector<double> v;
  double x;
  while (in >> x) v.push_back(x);
  if (!in.eof()) fail(kInvalidConfig, "warm_start", "non-numeric entry in " + path);
  return v;
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json report_json(const sjs::slblr::SolveReport& r, const std::string& backend) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"best_feasible", num(r.best_feasible)},
          {"feasible_source", r.feasible_source},
          {"best_bound", num(r.best_bound)},
          {"bound_iteration", r.bound_iteration},
          {"gap", std::isfinite(r.best_feasible) && std::isfinite(r.best_bound) ? json(r.gap.gap)
                                                                                : json(nullptr)},
          {"iterations", r.iterations},
          {"wall_seconds", r.wall_seconds},
          {"stop_reason", r.stop_reason},
          {"accepted", r.accepted},
          {"rejected", r.rejected},
          {"level_updates", r.level_updates},
          {"level_breaches", r.level_breaches},
          {"level_cuts", r.level_cuts},
          {"stationary", r.stationary},
          {"detections", r.detections},
          {"repairs", r.repairs},
          {"repairs_ok", r.repairs_ok},
          {"list_trials", r.list_trials},
          {"weak_duality_violations", r.weak_duality_violations},
          {"infeasible_schedules", r.infeasible_schedules},
          {"bounds_evaluated", r.bounds.size()},
          {"feasible_found", r.feasible_costs.size()},
          {"backend", backend},
          {"simd", r.simd}};
}

struct SolveOutcome {
  sjs::slblr::SolveReport report;
  int exit_code = kOk;
};

// Runs the engine and writes solution.json, convergence.csv, gantt.csv and
// report.json into `dir`.
SolveOutcome run_solve(const sjs::Instance& inst, const SolveOptions& o, const fs::path& dir) {
  check_options(o);
  fs::create_directories(dir);
  auto warn = [&](const std::string& w) {
    if (!o.quiet) std::cerr << "warning: " << w << "\n";
  };
  std::unique_ptr<sjs::milp::SolverBackend> backend =
      sjs::milp::make_backend(o.backend, o.solver_cmd, warn);

  sjs::slblr::Engine engine(inst, o.params, *backend);
  if (!o.warm_start.empty()) {
    try {
      engine.warm_start(read_numbers(o.warm_start));
    } catch (const std::invalid_argument& e) {
      fail(kInvalidConfig, "warm_start", e.what());
    }
  }
  SolveOutcome out;
  out.report = engine.run();
  const sjs::slblr::SolveReport& r = out.report;

  {
    std::ofstream csv(dir / "convergence.csv");
    sjs::slblr::write_convergence_csv(csv, r.trace);
  }
  std::ofstream(dir / "report.json") << report_json(r, backend->name()).dump(2) << "\n";

  if (!std::isfinite(r.best_feasible)) {
    out.exit_code = kTimeout;
    return out;
  }
  const std::vector<sjs::ScheduleViolation> bad = sjs::check_feasible(inst, r.best_schedule);
  if (!bad.empty()) {
    fail(kInfeasible, "infeasible_schedule", bad.front().rule + ": " + bad.front().message);
  }
  sjs::SolutionFile sol;
  sol.schedule = r.best_schedule;
  sol.objective = r.best_feasible;
  if (std::isfinite(r.best_bound)) {
    sol.bound = r.best_bound;
    sol.gap = r.gap.gap;
    sol.bound_source = r.gap.bound_source;
  }
  sol.seed = r.params.seed;
  sol.backend = backend->name();
  sol.params = r.params;
  sjs::save_solution(inst, sol, dir / "solution.json");
  std::ofstream gantt(dir / "gantt.csv");
  sjs::write_gantt_csv(gantt, inst, r.best_schedule);
  return out;
}

void print_summary(const sjs::slblr::SolveReport& r) {
  std::printf("feasible %s  bound %s  gap %s  iterations %lld  wall %.1fs  stop %s\n",
              csv_number(r.best_feasible).c_str(), csv_number(r.best_bound).c_str(),
              std::isfinite(r.best_feasible) && std::isfinite(r.best_bound)
                  ? csv_number(r.gap.gap).c_str()
                  : "n/a",
              r.iterations, r.wall_seconds, r.stop_reason.c_str());
}

int cmd_generate(const sjs::GeneratorConfig& c, bool example1, int example2_seed,
                 const std::string& output) {
  sjs::Instance inst;
  try {
    inst = example1 ? sjs::example1_instance()
           : example2_seed >= 0 ? sjs::example2_instance(example2_seed)
                                : sjs::generate_instance(c);
  } catch (const std::invalid_argument& e) {
    fail(kInvalidConfig, "invalid_config", e.what());
  }
  if (output.empty() || output == "-") {
    std::cout << sjs::format_instance(inst);
  } else {
    sjs::save_instance(inst, output);
  }
  return kOk;
}

int cmd_validate(const std::string& instance_path, const std::string& solution_path) {
  const sjs::Instance inst = read_instance(instance_path);
  sjs::SolutionFile sol;
  try {
    sol = sjs::load_solution(inst, solution_path);
  } catch (const sjs::FormatError& e) {
    fail(kInvalidConfig, "solution_format", e.what(), {{"where", e.where()}});
  } catch (const std::runtime_error& e) {
    fail(kInvalidConfig, "solution_io", e.what());
  }
  std::vector<sjs::ScheduleViolation> bad = sjs::check_feasible(inst, sol.schedule);
  if (bad.empty()) {
    const double cost = sjs::evaluate_objective(inst, sol.schedule);
    if (std::abs(cost - sol.objective) > 1e-6 * std::max(1.0, std::abs(cost))) {
      bad.push_back({"objective", "stored objective " + csv_number(sol.objective) +
                                      " differs from recomputed " + csv_number(cost)});
    }
  }
  if (!bad.empty()) {
    json list = json::array();
    for (const auto& v : bad) {
      list.push_back({{"rule", v.rule}, {"message", v.message}});
      std::cout << "violation " << v.rule << ": " << v.message << "\n";
    }
    fail(kInfeasible, "validation_failed",
         std::to_string(bad.size()) + " violation(s), first: " + bad.front().message,
         {{"violations", list}});
  }
  std::cout << "feasible, objective " << csv_number(sol.objective) << "\n";
  return kOk;
}

int cmd_evaluate(const std::string& instance_path, const std::string& solution_path,
                 long long samples, unsigned long long seed, const std::string& mode, int threads,
                 const std::string& out) {
  const sjs::Instance inst = read_instance(instance_path);
  sjs::SolutionFile sol;
  try {
    sol = sjs::load_solution(inst, solution_path);
  } catch (const std::exception& e) {
    fail(kInvalidConfig, "solution_format", e.what());
  }
  if (samples < 2) fail(kInvalidConfig, "invalid_config", "--samples must be at least 2");
  double exact = 0.0;
  try {
    exact = sjs::exact_expected_tardiness(inst, sol.schedule);
  } catch (const std::invalid_argument& e) {
    fail(kInfeasible, "incomplete_schedule", e.what());
  }
  std::vector<sjs::MonteCarloResult> runs;
  if (mode == "single" || mode == "both")
    runs.push_back(sjs::monte_carlo_tardiness(inst, sol.schedule, samples, seed,
                                              sjs::SimMode::kSingleFailure, threads));
  if (mode == "markov" || mode == "both")
    runs.push_back(sjs::monte_carlo_tardiness(inst, sol.schedule, samples, seed,
                                              sjs::SimMode::kFullMarkov, threads));
  if (out.empty()) {
    sjs::write_evaluation_csv(std::cout, runs, exact);
  } else {
    fs::create_directories(out);
    std::ofstream f(fs::path(out) / "evaluation.csv");
    sjs::write_evaluation_csv(f, runs, exact);
    std::cout << "exact " << csv_number(exact) << "\n";
  }
  return kOk;
}

struct BenchCase {
  std::string name;
  unsigned long long seed = 0;
  sjs::Instance inst;
};

std::vector<BenchCase> bench_cases(const std::string& suite, int seeds) {
  std::vector<BenchCase> cases;
  if (suite == "example1") {
    cases.push_back({"example1", 0, sjs::example1_instance()});
  } else if (suite == "example1-robustness") {
    for (int s = 1; s <= seeds; ++s) {
      sjs::GeneratorConfig c;  // 20 jobs x 5 ops, U[1,5] processing, U[10,40] due dates
      c.seed = s;
      cases.push_back({"robustness-" + std::to_string(s), c.seed, sjs::generate_instance(c)});
    }
  } else if (suite == "example2") {
    for (int s = 1; s <= seeds; ++s)
      cases.push_back({"example2-" + std::to_string(s), static_cast<unsigned long long>(s),
                       sjs::example2_instance(s)});
  } else if (suite == "example2-100") {
    for (int s = 1; s <= seeds; ++s) {
      sjs::GeneratorConfig c;
      c.jobs = 100;
      c.proc_lo = 1;
      c.proc_hi = 50;
      c.due_lo = 100;
      c.due_hi = 400;
      c.seed = s;
      cases.push_back({"example2-100-" + std::to_string(s), c.seed, sjs::generate_instance(c)});
    }
  } else {
    fail(kInvalidConfig, "invalid_config", "unknown suite " + suite);
  }
  return cases;
}

int cmd_bench(const std::string& suite, int seeds, SolveOptions o) {
  if (seeds < 1) fail(kInvalidConfig, "invalid_config", "--seeds must be positive");
  check_options(o);
  const fs::path root = o.out;
  fs::create_directories(root);
  std::ofstream csv(root / "bench.csv");
  csv << "suite,case,seed,jobs,feasible,bound,gap,wall_s,iterations,stop_reason\n";
  int code = kOk;
  for (BenchCase& c : bench_cases(suite, seeds)) {
    const fs::path dir = root / c.name;
    fs::create_directories(dir);
    sjs::save_instance(c.inst, dir / "instance.json");
    const SolveOutcome res = run_solve(c.inst, o, dir);
    const auto& r = res.report;
    const bool has_gap = std::isfinite(r.best_feasible) && std::isfinite(r.best_bound);
    csv << suite << ',' << c.name << ',' << c.seed << ',' << c.inst.num_jobs() << ','
        << csv_number(r.best_feasible) << ',' << csv_number(r.best_bound) << ','
        << (has_gap ? csv_number(sjs::compute_gap(r.best_feasible, r.best_bound).gap) : "")
        << ',' << csv_number(r.wall_seconds) << ',' << r.iterations << ',' << r.stop_reason
        << '\n';
    csv.flush();
    if (!o.quiet) {
      std::printf("%-24s ", c.name.c_str());
      print_summary(r);
    }
    if (res.exit_code != kOk) code = res.exit_code;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic job-shop scheduling with scrap and rework"};
  app.require_subcommand(1);
  int code = kOk;

  // generate
  sjs::GeneratorConfig gen;
  bool gen_example1 = false;
  int gen_example2 = -1;
  std::string gen_out;
  auto* g = app.add_subcommand("generate", "Write a random or benchmark instance");
  g->add_option("output", gen_out, "Output file (default stdout)");
  g->add_option("--jobs", gen.jobs);
  g->add_option("--ops", gen.ops_per_job);
  g->add_option("--groups", gen.groups);
  g->add_option("--proc-lo", gen.proc_lo);
  g->add_option("--proc-hi", gen.proc_hi);
  g->add_option("--due-lo", gen.due_lo);
  g->add_option("--due-hi", gen.due_hi);
  g->add_option("--capacities", gen.capacities)->delimiter(',');
  g->add_option("--scrap", gen.scrap);
  g->add_option("--rework", gen.rework);
  g->add_option("--weight", gen.weight);
  g->add_option("--eligible", gen.eligible_per_op, "Eligible groups per operation");
  g->add_option("--shift", gen.shift_length);
  g->add_option("--seed", gen.seed)->envname("SJS_SEED");
  g->add_flag("--example1", gen_example1, "The Example-1 base case");
  g->add_option("--example2", gen_example2, "Example 2 (20 jobs) with this seed");

  // solve
  SolveOptions solve_opt;
  std::string solve_instance;
  auto* s = app.add_subcommand("solve", "Run the dual engine on an instance");
  s->add_option("instance", solve_instance)->required();
  add_solve_options(s, solve_opt);

  // validate
  std::string val_instance, val_solution;
  auto* v = app.add_subcommand("validate", "Check a solution file against an instance");
  v->add_option("instance", val_instance)->required();
  v->add_option("solution", val_solution)->required();

  // evaluate
  std::string ev_instance, ev_solution, ev_mode = "both", ev_out;
  long long ev_samples = 200000;
  unsigned long long ev_seed = 1;
  int ev_threads = 1;
  auto* e = app.add_subcommand("evaluate", "Exact and Monte-Carlo expected tardiness");
  e->add_option("instance", ev_instance)->required();
  e->add_option("solution", ev_solution)->required();
  e->add_option("--samples", ev_samples)->envname("SJS_SAMPLES");
  e->add_option("--seed", ev_seed)->envname("SJS_SEED");
  e->add_option("--mode", ev_mode)->check(CLI::IsMember({"single", "markov", "both"}));
  e->add_option("--threads", ev_threads)->envname("SJS_THREADS");
  e->add_option("--out", ev_out, "Directory for evaluation.csv (default stdout)");

  // bench
  SolveOptions bench_opt;
  std::string bench_suite = "example1";
  int bench_seeds = 5;
  auto* b = app.add_subcommand("bench", "Run a benchmark suite and write bench.csv");
  b->add_option("--suite", bench_suite)
      ->check(CLI::IsMember({"example1", "example1-robustness", "example2", "example2-100"}));
  b->add_option("--seeds", bench_seeds, "Cases for seeded suites");
  add_solve_options(b, bench_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    json rec = {{"error", "invalid_config"}, {"message", ex.what()}, {"exit_code", kInvalidConfig}};
    std::cerr << rec.dump() << "\n";
    return kInvalidConfig;
  }

  try {
    if (*g) {
      code = cmd_generate(gen, gen_example1, gen_example2, gen_out);
    } else if (*s) {
      const sjs::Instance inst = read_instance(solve_instance);
      const SolveOutcome res = run_solve(inst, solve_opt, solve_opt.out);
      if (!solve_opt.quiet) print_summary(res.report);
      code = res.exit_code;
      if (code == kTimeout)
        fail(kTimeout, "timeout_without_feasible", "no feasible schedule within the time limit");
    } else if (*v) {
      code = cmd_validate(val_instance, val_solution);
    } else if (*e) {
      code = cmd_evaluate(ev_instance, ev_solution, ev_samples, ev_seed, ev_mode, ev_threads,
                          ev_out);
    } else if (*b) {
      code = cmd_bench(bench_suite, bench_seeds, bench_opt);
    }
  } catch (const CliError& err) {
    json rec = {{"error", err.kind}, {"message", err.message}, {"exit_code", err.code}};
    if (!err.details.empty()) rec["details"] = err.details;
    std::cerr << rec.dump() << "\n";
    return err.code;
  } catch (const std::exception& ex) {
    json rec = {{"error", "internal"}, {"message", ex.what()}, {"exit_code", kInternal}};
    std::cerr << rec.dump() << "\n";
    return kInternal;
  }
  return code;
}
