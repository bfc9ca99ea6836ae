#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "sjs/instance.hpp"
#include "sjs/schedule.hpp"
#include "sjs/slblr/dual.hpp"

namespace sjs {

inline constexpr int kSolutionSchemaVersion = 1;

// Solution document, schema_version 1:
//
//   { "schema_version": 1, "objective": 67.04, "bound": 45.18, "gap": 0.326,
//     "bound_source": "dual@420", "seed": 1, "backend": "builtin",
//     "hyperparams": { "gamma": 0.5, ... },
//     "layout": { "horizon": 112, "machine_groups": 5 },
//     "placements": [ {"job": 1, "scenario": "FIRST_PASS", "op": 1,
//                      "group": 2, "start": 1, "end": 3, "weight": 1.0}, ... ] }
//
// Ids and operations are 1-based; "scenario" is the to_string form of the
// scenario key. bound and gap are null when no certified bound exists.
struct SolutionFile {
  Schedule schedule;
  double objective = 0.0;
  std::optional<double> bound;
  std::optional<double> gap;
  std::string bound_source;
  unsigned long long seed = 0;
  std::string backend;
  slblr::HyperParams params;
};

std::string format_solution(const Instance& inst, const SolutionFile& solution);
// Throws FormatError on malformed documents or placements that do not name a
// (job, scenario, op) of the instance.
SolutionFile parse_solution(const Instance& inst, const std::string& text);
SolutionFile load_solution(const Instance& inst, const std::filesystem::path& path);
void save_solution(const Instance& inst, const SolutionFile& solution,
                   const std::filesystem::path& path);

// CSV with header scenario,job,op,group,start,end,weight; one row per
// placement, ids 1-based, weight is the placement's expected occupancy.
void write_gantt_csv(std::ostream& out, const Instance& inst, const Schedule& schedule);

}  // namespace sjs
