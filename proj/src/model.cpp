#include "sjs/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sjs/dispatch.hpp"

namespace sjs {

namespace {

using milp::Sense;
using milp::Term;
using milp::VarType;

std::string tag(const PlacementGroup& pg) {
  return std::to_string(pg.job + 1) + "," + std::to_string(pg.scenario) + "," +
         std::to_string(pg.op + 1);
}

void check_instance(const Instance& inst) {
  const std::vector<Violation> bad = validate_instance(inst);
  if (!bad.empty()) {
    throw std::invalid_argument("invalid instance: " + bad.front().field + ": " + bad.front().message);
  }
}

BuiltModel blank(const Instance& inst, const VariableLayout& layout) {
  BuiltModel b;
  const int cells = layout.num_cells();
  b.x_begin.assign(layout.num_groups(), -1);
  b.sos.assign(layout.num_groups(), -1);
  b.tardiness.resize(inst.num_jobs());
  b.shift.resize(inst.num_jobs());
  for (int i = 0; i < inst.num_jobs(); ++i) {
    b.tardiness[i].assign(num_scenarios(inst.jobs[i]), -1);
    b.shift[i].assign(num_scenarios(inst.jobs[i]), -1);
  }
  b.slack.assign(cells, -1);
  b.over.assign(cells, -1);
  b.under.assign(cells, -1);
  b.capacity_row.assign(cells, -1);
  b.cell_rhs.assign(cells, 0.0);
  b.cell_lambda.assign(cells, 0.0);
  for (int m = 0; m < inst.num_groups(); ++m) {
    for (int t = 1; t <= inst.horizon; ++t) {
      b.cell_rhs[layout.cell(m, t)] = inst.machine_groups[m].capacity;
    }
  }
  return b;
}

// Terms for sum over candidates of coef(t) * x.
std::vector<Term> start_terms(const BuiltModel& b, const VariableLayout& layout, int g,
                              double sign, bool completion) {
  const PlacementGroup& pg = layout.group(g);
  std::vector<Term> terms;
  for (int k = 0; k < static_cast<int>(pg.candidates.size()); ++k) {
    const Candidate& c = pg.candidates[k];
    terms.push_back({b.x(g, k), sign * (completion ? c.completion() : c.start)});
  }
  return terms;
}

std::vector<Term> concat(std::vector<Term> a, const std::vector<Term>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Placements, SOS1 rows, precedence, restart, shift and tardiness of one job.
void add_job(BuiltModel& b, const Instance& inst, const VariableLayout& layout, int i) {
  milp::MilpModel& m = b.model;
  const Job& job = inst.jobs[i];
  const int T = inst.horizon;
  const int S = inst.shift_length;
  b.jobs.push_back(i);

  for (int g = layout.job_begin(i); g < layout.job_end(i); ++g) {
    const PlacementGroup& pg = layout.group(g);
    b.x_begin[g] = m.num_vars();
    std::vector<int> members;
    std::vector<double> weights;
    for (const Candidate& c : pg.candidates) {
      members.push_back(m.add_variable("x[" + tag(pg) + "," + std::to_string(c.group + 1) + "," +
                                           std::to_string(c.start) + "]",
                                       0.0, 1.0, VarType::kBinary));
      weights.push_back(c.start);
    }
    b.sos[g] = m.add_sos1("assign[" + tag(pg) + "]", std::move(members), std::move(weights));
  }

  const std::vector<ScenarioWeight> weights = scenario_weights(job, i);
  for (int s = 0; s < num_scenarios(job); ++s) {
    const ScenarioKey key = scenario_key(i, s);
    const std::string name = std::to_string(i + 1) + "," + std::to_string(s);
    for (int j = key.first_op(); j + 1 < job.num_ops(); ++j) {
      const int cur = layout.group_index(i, s, j);
      const int next = layout.group_index(i, s, j + 1);
      m.add_row("prec[" + name + "," + std::to_string(j + 1) + "]",
                concat(start_terms(b, layout, next, 1.0, false),
                       start_terms(b, layout, cur, -1.0, true)),
                Sense::kGreaterEqual, 1.0);
    }
    if (key.is_second_attempt()) {
      const int failed = layout.group_index(i, 0, key.failed_op);
      const int first = layout.group_index(i, s, key.first_op());
      m.add_row("restart[" + name + "]",
                concat(start_terms(b, layout, first, 1.0, false),
                       start_terms(b, layout, failed, -1.0, true)),
                Sense::kGreaterEqual, 1.0);
      // y = ceil(c / S) through S*y - c in [0, S(1 - eps)].
      const int y = m.add_variable("y[" + name + "]", 0.0, std::ceil(static_cast<double>(T) / S),
                                   VarType::kInteger);
      b.shift[i][s] = y;
      std::vector<Term> sy_minus_c = concat({{y, static_cast<double>(S)}},
                                            start_terms(b, layout, failed, -1.0, true));
      m.add_row("shift_lo[" + name + "]", sy_minus_c, Sense::kGreaterEqual, 0.0);
      m.add_row("shift_hi[" + name + "]", sy_minus_c, Sense::kLessEqual,
                S * (1.0 - inst.ceiling_epsilon));
      m.add_row("shift_start[" + name + "]",
                concat(start_terms(b, layout, first, 1.0, false), {{y, -static_cast<double>(S)}}),
                Sense::kGreaterEqual, 1.0);
    }
    const int last = layout.group_index(i, s, job.num_ops() - 1);
    const int tau = m.add_variable("tau[" + name + "]", 0.0, T, VarType::kContinuous,
                                   job.weight * weights[s].weight);
    b.tardiness[i][s] = tau;
    m.add_row("tard[" + name + "]", concat({{tau, 1.0}}, start_terms(b, layout, last, -1.0, true)),
              Sense::kGreaterEqual, -static_cast<double>(job.due_date));
  }
}

// Per-cell x terms with expected-occupancy coefficients, for the model's jobs.
std::vector<std::vector<Term>> cell_terms(const BuiltModel& b, const VariableLayout& layout) {
  std::vector<std::vector<Term>> cells(layout.num_cells());
  for (int g = 0; g < layout.num_groups(); ++g) {
    if (b.x_begin[g] < 0) continue;
    const PlacementGroup& pg = layout.group(g);
    for (int k = 0; k < static_cast<int>(pg.candidates.size()); ++k) {
      const Candidate& c = pg.candidates[k];
      for (int t = c.start; t <= c.completion(); ++t) {
        cells[layout.cell(c.group, t)].push_back({b.x(g, k), pg.capacity_weight});
      }
    }
  }
  return cells;
}

std::string cell_name(const VariableLayout& layout, int cell) {
  const int T = layout.horizon();
  return std::to_string(cell / T + 1) + "," + std::to_string(cell % T + 1);
}

void add_capacity_rows(BuiltModel& b, const Instance& inst, const VariableLayout& layout) {
  std::vector<std::vector<Term>> cells = cell_terms(b, layout);
  for (int cell = 0; cell < layout.num_cells(); ++cell) {
    if (cells[cell].empty()) continue;
    const double cap = b.cell_rhs[cell];
    const int z = b.model.add_variable("z[" + cell_name(layout, cell) + "]", 0.0, cap,
                                       VarType::kContinuous);
    b.slack[cell] = z;
    cells[cell].push_back({z, 1.0});
    b.capacity_row[cell] = b.model.add_row("cap[" + cell_name(layout, cell) + "]",
                                           std::move(cells[cell]), Sense::kEqual, cap);
  }
  (void)inst;
}

}  // namespace

BuiltModel build_full_model(const Instance& inst, const VariableLayout& layout) {
  check_instance(inst);
  if (!greedy_schedule(inst)) {
    throw std::invalid_argument("horizon " + std::to_string(inst.horizon) +
                                " is too short for a serial schedule");
  }
  BuiltModel b = blank(inst, layout);
  b.model.name = "full";
  for (int i = 0; i < inst.num_jobs(); ++i) add_job(b, inst, layout, i);
  add_capacity_rows(b, inst, layout);
  return b;
}

BuiltModel build_subproblem_model(const Instance& inst, const VariableLayout& layout,
                                  std::span<const int> subset, std::span<const int> fixed_choices,
                                  std::span<const double> lambda, double rho) {
  if (subset.empty()) throw std::invalid_argument("subproblem needs at least one job");
  BuiltModel b = blank(inst, layout);
  b.model.name = "sub";
  b.rho = rho;
  std::vector<char> in_subset(inst.num_jobs(), 0);
  for (int i : subset) in_subset.at(i) = 1;
  for (int i = 0; i < inst.num_jobs(); ++i) {
    if (in_subset[i]) add_job(b, inst, layout, i);
  }

  // Fixed load of the other jobs.
  std::vector<double> other(layout.num_cells(), 0.0);
  for (int g = 0; g < layout.num_groups(); ++g) {
    const PlacementGroup& pg = layout.group(g);
    if (in_subset[pg.job]) continue;
    const int k = fixed_choices[g];
    if (k < 0) throw std::invalid_argument("fixed solution misses a placement of job " + std::to_string(pg.job + 1));
    const Candidate& c = pg.candidates[k];
    for (int t = c.start; t <= c.completion(); ++t) other[layout.cell(c.group, t)] += pg.capacity_weight;
  }

  std::vector<std::vector<Term>> cells = cell_terms(b, layout);
  double offset = 0.0;
  for (int cell = 0; cell < layout.num_cells(); ++cell) {
    const double lam = lambda[cell];
    b.cell_lambda[cell] = lam;
    b.cell_rhs[cell] -= other[cell];
    for (const Term& t : cells[cell]) b.model.add_objective(t.var, lam * t.coef);
    if (rho <= 0.0) continue;
    const double cap = inst.machine_groups[cell / layout.horizon()].capacity;
    if (cells[cell].empty()) {
      const double r = other[cell] - cap;
      offset += r >= 0.0 ? rho * r : std::min(lam, rho) * -r;
      continue;
    }
    const std::string name = cell_name(layout, cell);
    double reach = other[cell] + cap;
    for (const Term& t : cells[cell]) reach += t.coef;
    const int z = b.model.add_variable("z[" + name + "]", 0.0, cap, VarType::kContinuous, lam);
    const int vp = b.model.add_variable("vp[" + name + "]", 0.0, reach, VarType::kContinuous, rho);
    const int vm = b.model.add_variable("vm[" + name + "]", 0.0, cap, VarType::kContinuous, rho);
    b.slack[cell] = z;
    b.over[cell] = vp;
    b.under[cell] = vm;
    std::vector<Term> terms = std::move(cells[cell]);
    terms.push_back({z, 1.0});
    terms.push_back({vp, -1.0});
    terms.push_back({vm, 1.0});
    b.capacity_row[cell] = b.model.add_row("cap[" + name + "]", std::move(terms), Sense::kEqual,
                                           b.cell_rhs[cell]);
  }
  b.model.set_objective_offset(offset);
  return b;
}

BuiltModel build_repair_model(const Instance& inst, const VariableLayout& layout,
                              std::span<const int> anchor_choices, std::span<const int> delta) {
  BuiltModel b = build_full_model(inst, layout);
  b.model.name = "repair";
  for (int g = 0; g < layout.num_groups(); ++g) {
    const PlacementGroup& pg = layout.group(g);
    const int k = anchor_choices[g];
    if (k < 0) throw std::invalid_argument("anchor misses a placement of job " + std::to_string(pg.job + 1));
    const int start = pg.candidates[k].start;
    const int d = delta.empty() ? layout.horizon()
                                : delta[std::min<std::size_t>(pg.op, delta.size() - 1)];
    if (d < layout.horizon()) {
      std::vector<Term> b_terms = start_terms(b, layout, g, 1.0, false);
      b.model.add_row("box_lo[" + tag(pg) + "]", b_terms, Sense::kGreaterEqual, start - d);
      b.model.add_row("box_hi[" + tag(pg) + "]", std::move(b_terms), Sense::kLessEqual, start + d);
    }
    b.model.set_hint(b.sos[g], start);
  }
  b.model.set_start(encode_choices(b, layout, anchor_choices));
  return b;
}

double evaluate_objective(const Instance& inst, const Schedule& schedule) {
  double total = 0.0;
  for (int i = 0; i < inst.num_jobs(); ++i) {
    const Job& job = inst.jobs[i];
    const std::vector<ScenarioWeight> weights = scenario_weights(job, i);
    double expected = 0.0;
    for (int s = 0; s < num_scenarios(job); ++s) {
      const int c = final_completion(inst, schedule, i, s);
      expected += weights[s].weight * std::max(c - job.due_date, 0);
    }
    total += job.weight * expected;
  }
  return total;
}

std::vector<double> encode_choices(const BuiltModel& built, const VariableLayout& layout,
                                   std::span<const int> choices) {
  const Instance& inst = layout.instance();
  std::vector<double> v(built.model.num_vars(), 0.0);
  std::vector<double> own(layout.num_cells(), 0.0);
  std::vector<int> completion(layout.num_groups(), 0);
  for (int g = 0; g < layout.num_groups(); ++g) {
    if (built.x_begin[g] < 0) continue;
    const int k = choices[g];
    if (k < 0) return {};
    const PlacementGroup& pg = layout.group(g);
    const Candidate& c = pg.candidates[k];
    v[built.x(g, k)] = 1.0;
    completion[g] = c.completion();
    for (int t = c.start; t <= c.completion(); ++t) own[layout.cell(c.group, t)] += pg.capacity_weight;
  }
  for (int i : built.jobs) {
    const Job& job = inst.jobs[i];
    for (int s = 0; s < num_scenarios(job); ++s) {
      const ScenarioKey key = scenario_key(i, s);
      const int c_last = completion[layout.group_index(i, s, job.num_ops() - 1)];
      v[built.tardiness[i][s]] = std::max(c_last - job.due_date, 0);
      if (key.is_second_attempt()) {
        const int c = completion[layout.group_index(i, 0, key.failed_op)];
        v[built.shift[i][s]] = (c + inst.shift_length - 1) / inst.shift_length;
      }
    }
  }
  for (int cell = 0; cell < layout.num_cells(); ++cell) {
    if (built.slack[cell] < 0) continue;
    if (built.over[cell] < 0) {
      v[built.slack[cell]] = built.cell_rhs[cell] - own[cell];
      continue;
    }
    const double r = own[cell] - built.cell_rhs[cell];
    const double z = (r < 0.0 && built.rho > built.cell_lambda[cell]) ? -r : 0.0;
    const double g = r + z;
    v[built.slack[cell]] = z;
    v[built.over[cell]] = std::max(g, 0.0);
    v[built.under[cell]] = std::max(-g, 0.0);
  }
  return v;
}

std::vector<int> decode_choices(const BuiltModel& built, const VariableLayout& layout,
                                std::span<const double> values, std::span<const int> base) {
  std::vector<int> out(layout.num_groups(), -1);
  if (!base.empty()) std::copy(base.begin(), base.end(), out.begin());
  for (int g = 0; g < layout.num_groups(); ++g) {
    if (built.x_begin[g] < 0) continue;
    out[g] = -1;
    const int n = static_cast<int>(layout.group(g).candidates.size());
    for (int k = 0; k < n; ++k) {
      if (values[built.x(g, k)] > 0.5) {
        out[g] = k;
        break;
      }
    }
  }
  return out;
}

}  // namespace sjs
