#include "sjs/solution_io.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "sjs/instance_io.hpp"

namespace sjs {

using nlohmann::json;

namespace {

// Expected-occupancy weight of a placement: survival for first-pass
// operations, the scenario probability for second attempts.
double placement_weight(const Instance& inst, const std::vector<ScenarioWeight>& weights,
                        int job, int scenario, int op) {
  return scenario == 0 ? survival_before(inst.jobs[job], op) : weights[scenario].weight;
}

json params_json(const slblr::HyperParams& p) {
  return {{"gamma", p.gamma},
          {"zeta", p.zeta},
          {"beta", p.beta},
          {"rho0", p.rho0},
          {"rho_max", p.rho_max},
          {"eps_violation", p.eps_violation},
          {"window_cap", p.window_cap},
          {"group_size", p.group_size},
          {"bound_every", p.bound_every},
          {"repair_every", p.repair_every},
          {"delta", p.delta},
          {"delta_max", p.delta_max},
          {"repair_time_limit", p.repair_time_limit},
          {"subproblem_nodes", p.subproblem_nodes},
          {"target_gap", p.target_gap},
          {"time_limit", p.time_limit},
          {"max_iterations", p.max_iterations},
          {"seed", p.seed}};
}

template <typename T>
void read_if(const json& obj, const char* key, T& out) {
  auto it = obj.find(key);
  if (it != obj.end() && !it->is_null()) out = it->get<T>();
}

}  // namespace

std::string format_solution(const Instance& inst, const SolutionFile& solution) {
  json doc;
  doc["schema_version"] = kSolutionSchemaVersion;
  doc["objective"] = solution.objective;
  doc["bound"] = solution.bound ? json(*solution.bound) : json(nullptr);
  doc["gap"] = solution.gap ? json(*solution.gap) : json(nullptr);
  doc["bound_source"] = solution.bound_source;
  doc["seed"] = solution.seed;
  doc["backend"] = solution.backend;
  doc["hyperparams"] = params_json(solution.params);
  doc["layout"] = {{"horizon", inst.horizon},
                   {"shift_length", inst.shift_length},
                   {"machine_groups", inst.num_groups()},
                   {"jobs", inst.num_jobs()}};
  json rows = json::array();
  for (int i = 0; i < inst.num_jobs(); ++i) {
    const Job& job = inst.jobs[i];
    const std::vector<ScenarioWeight> weights = scenario_weights(job, i);
    for (int s = 0; s < num_scenarios(job); ++s) {
      const ScenarioKey key = scenario_key(i, s);
      for (int j = key.first_op(); j < job.num_ops(); ++j) {
        const Placement& p = solution.schedule.at(key, j);
        json row = {{"job", job.id}, {"scenario", to_string(key)}, {"op", j + 1}};
        if (p.assigned()) {
          row["group"] = p.group + 1;
          row["start"] = p.start;
          row["end"] = completion_of(inst, i, j, p);
        } else {
          row["group"] = nullptr;
          row["start"] = nullptr;
          row["end"] = nullptr;
        }
        row["weight"] = placement_weight(inst, weights, i, s, j);
        rows.push_back(std::move(row));
      }
    }
  }
  doc["placements"] = std::move(rows);
  return doc.dump(2) + "\n";
}

SolutionFile parse_solution(const Instance& inst, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("line " + std::to_string(line_of_offset(text, e.byte)), e.what());
  }
  if (!doc.is_object()) throw FormatError("line 1", "solution document must be an object");
  SolutionFile out;
  try {
    if (doc.value("schema_version", 0) != kSolutionSchemaVersion)
      throw FormatError("schema_version", "unsupported or missing version");
    if (!doc.contains("objective") || !doc["objective"].is_number())
      throw FormatError("objective", "missing or not a number");
    out.objective = doc["objective"].get<double>();
    if (doc.contains("bound") && doc["bound"].is_number()) out.bound = doc["bound"].get<double>();
    if (doc.contains("gap") && doc["gap"].is_number()) out.gap = doc["gap"].get<double>();
    read_if(doc, "bound_source", out.bound_source);
    read_if(doc, "seed", out.seed);
    read_if(doc, "backend", out.backend);
    if (doc.contains("hyperparams") && doc["hyperparams"].is_object()) {
      const json& h = doc["hyperparams"];
      slblr::HyperParams& p = out.params;
      read_if(h, "gamma", p.gamma);
      read_if(h, "zeta", p.zeta);
      read_if(h, "beta", p.beta);
      read_if(h, "rho0", p.rho0);
      read_if(h, "rho_max", p.rho_max);
      read_if(h, "eps_violation", p.eps_violation);
      read_if(h, "window_cap", p.window_cap);
      read_if(h, "group_size", p.group_size);
      read_if(h, "bound_every", p.bound_every);
      read_if(h, "repair_every", p.repair_every);
      read_if(h, "delta", p.delta);
      read_if(h, "delta_max", p.delta_max);
      read_if(h, "repair_time_limit", p.repair_time_limit);
      read_if(h, "subproblem_nodes", p.subproblem_nodes);
      read_if(h, "target_gap", p.target_gap);
      read_if(h, "time_limit", p.time_limit);
      read_if(h, "max_iterations", p.max_iterations);
      read_if(h, "seed", p.seed);
    }
  } catch (const json::exception& e) {
    throw FormatError("header", e.what());
  }

  std::map<int, int> job_index;
  for (int i = 0; i < inst.num_jobs(); ++i) job_index[inst.jobs[i].id] = i;
  out.schedule = Schedule::blank(inst);
  if (!doc.contains("placements") || !doc["placements"].is_array())
    throw FormatError("placements", "missing or not an array");
  const json& rows = doc["placements"];
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string where = "placements[" + std::to_string(r) + "]";
    const json& row = rows[r];
    try {
      const int id = row.at("job").get<int>();
      auto it = job_index.find(id);
      if (it == job_index.end()) throw FormatError(where + ".job", "unknown job " + std::to_string(id));
      const int i = it->second;
      const Job& job = inst.jobs[i];
      const std::string name = row.at("scenario").get<std::string>();
      int scenario = -1;
      for (int s = 0; s < num_scenarios(job); ++s)
        if (to_string(scenario_key(i, s)) == name) scenario = s;
      if (scenario < 0) throw FormatError(where + ".scenario", "unknown scenario " + name);
      const ScenarioKey key = scenario_key(i, scenario);
      const int op = row.at("op").get<int>() - 1;
      if (op < key.first_op() || op >= job.num_ops())
        throw FormatError(where + ".op", "operation outside the scenario");
      if (row.at("group").is_null() || row.at("start").is_null()) continue;
      out.schedule.at(key, op) = {row.at("group").get<int>() - 1, row.at("start").get<int>()};
    } catch (const json::exception& e) {
      throw FormatError(where, e.what());
    }
  }
  return out;
}

SolutionFile load_solution(const Instance& inst, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open solution file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_solution(inst, buf.str());
}

void save_solution(const Instance& inst, const SolutionFile& solution,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write solution file " + path.string());
  out << format_solution(inst, solution);
}

void write_gantt_csv(std::ostream& out, const Instance& inst, const Schedule& schedule) {
  out << "scenario,job,op,group,start,end,weight\n";
  const auto old = out.precision(12);
  for (int i = 0; i < inst.num_jobs(); ++i) {
    const Job& job = inst.jobs[i];
    const std::vector<ScenarioWeight> weights = scenario_weights(job, i);
    for (int s = 0; s < num_scenarios(job); ++s) {
      const ScenarioKey key = scenario_key(i, s);
      for (int j = key.first_op(); j < job.num_ops(); ++j) {
        const Placement& p = schedule.at(key, j);
        if (!p.assigned()) continue;
        out << to_string(key) << ',' << job.id << ',' << j + 1 << ',' << p.group + 1 << ','
            << p.start << ',' << completion_of(inst, i, j, p) << ','
            << placement_weight(inst, weights, i, s, j) << '\n';
      }
    }
  }
  out.precision(old);
}

}  // namespace sjs
