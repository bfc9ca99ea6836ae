#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "sjs/dispatch.hpp"
#include "sjs/generate.hpp"
#include "sjs/instance_io.hpp"
#include "sjs/model.hpp"
#include "sjs/solution_io.hpp"
#include "support.hpp"

using namespace sjs;
using nlohmann::json;

namespace {

std::string where_of(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const FormatError& e) {
    return e.where();
  }
  return "";
}

}  // namespace

TEST_CASE("instance round trip") {
  Instance ex1 = example1_instance();
  CHECK(parse_instance(format_instance(ex1)) == ex1);
  test::Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    Instance inst = test::random_instance(rng);
    CHECK(parse_instance(format_instance(inst)) == inst);
  }
  GeneratorConfig c;
  c.eligible_per_op = 3;
  Instance flex = generate_instance(c);
  CHECK(parse_instance(format_instance(flex)) == flex);
}

TEST_CASE("instance file round trip") {
  auto path = std::filesystem::temp_directory_path() / "sjs_test_io_instance.json";
  Instance ex1 = example1_instance();
  save_instance(ex1, path);
  CHECK(load_instance(path) == ex1);
  std::filesystem::remove(path);
}

TEST_CASE("instance errors name the field or line") {
  json doc = json::parse(format_instance(example1_instance()));
  json no_jobs = doc;
  no_jobs.erase("jobs");
  CHECK(where_of(no_jobs.dump()) == "jobs");

  json bad_due = doc;
  bad_due["jobs"][3]["due_date"] = "soon";
  CHECK(where_of(bad_due.dump()) == "jobs[3].due_date");

  json bad_version = doc;
  bad_version["schema_version"] = 7;
  CHECK(where_of(bad_version.dump()) == "schema_version");

  CHECK(where_of("{\n  \"horizon\": 12,\n  oops\n}") == "line 3");
}

TEST_CASE("job-level probabilities apply unless an operation overrides them") {
  json doc = json::parse(format_instance(example1_instance()));
  doc["jobs"][0]["operations"][2]["scrap_prob"] = 0.3;
  Instance inst = parse_instance(doc.dump());
  CHECK(inst.jobs[0].operations[2].scrap_prob == 0.3);
  CHECK(inst.jobs[0].operations[1].scrap_prob == 0.05);
}

TEST_CASE("unknown fields are reported as warnings") {
  json doc = json::parse(format_instance(example1_instance()));
  doc["comment"] = "hand edited";
  doc["jobs"][1]["colour"] = "red";
  std::vector<std::string> warnings;
  Instance inst = parse_instance(doc.dump(), &warnings);
  CHECK(inst == example1_instance());
  REQUIRE(warnings.size() == 2);
  CHECK(warnings[0].find("comment") != std::string::npos);
  CHECK(warnings[1].find("jobs[1].colour") != std::string::npos);
}

TEST_CASE("solution round trip") {
  Instance inst = example1_instance();
  std::optional<Schedule> s = greedy_schedule(inst);
  REQUIRE(s.has_value());
  SolutionFile sol;
  sol.schedule = *s;
  sol.objective = evaluate_objective(inst, *s);
  sol.bound = 45.5;
  sol.gap = (sol.objective - 45.5) / sol.objective;
  sol.bound_source = "dual@40";
  sol.seed = 9;
  sol.backend = "builtin";
  sol.params.gamma = 0.25;
  SolutionFile back = parse_solution(inst, format_solution(inst, sol));
  CHECK(back.schedule == sol.schedule);
  CHECK(back.objective == sol.objective);
  CHECK(back.bound == sol.bound);
  CHECK(back.gap == sol.gap);
  CHECK(back.bound_source == "dual@40");
  CHECK(back.seed == 9);
  CHECK(back.backend == "builtin");
  CHECK(back.params.gamma == 0.25);

  sol.bound.reset();
  sol.gap.reset();
  SolutionFile nobound = parse_solution(inst, format_solution(inst, sol));
  CHECK(!nobound.bound.has_value());
  CHECK(!nobound.gap.has_value());
}

TEST_CASE("solution errors") {
  Instance inst = example1_instance();
  Schedule s = *greedy_schedule(inst);
  SolutionFile sol;
  sol.schedule = s;
  sol.objective = evaluate_objective(inst, s);
  json doc = json::parse(format_solution(inst, sol));

  json bad_job = doc;
  bad_job["placements"][0]["job"] = 99;
  CHECK_THROWS_AS(parse_solution(inst, bad_job.dump()), FormatError);

  json bad_scenario = doc;
  bad_scenario["placements"][0]["scenario"] = "SIDEWAYS";
  CHECK_THROWS_AS(parse_solution(inst, bad_scenario.dump()), FormatError);

  json no_placements = doc;
  no_placements.erase("placements");
  try {
    parse_solution(inst, no_placements.dump());
    FAIL("expected a FormatError");
  } catch (const FormatError& e) {
    CHECK(e.where() == "placements");
  }
}

TEST_CASE("gantt CSV") {
  Instance inst;
  inst.machine_groups = {{1, 1}};
  Job job;
  job.id = 1;
  job.due_date = 5;
  OperationSpec op;
  op.eligible = {{0, 2}};
  op.scrap_prob = 0.1;
  op.rework_prob = 0.5;
  job.operations = {op};
  inst.jobs = {job};
  inst.horizon = 16;
  inst.shift_length = 8;
  Schedule s = Schedule::blank(inst);
  s.at(scenario_key(0, 0), 0) = {0, 1};
  s.at(scenario_key(0, 1), 0) = {0, 9};
  s.at(scenario_key(0, 2), 0) = {0, 11};
  std::ostringstream out;
  write_gantt_csv(out, inst, s);
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "scenario,job,op,group,start,end,weight");
  CHECK(lines[1] == "FIRST_PASS,1,1,1,1,2,1");
  CHECK(lines[2] == "DISCARD(1),1,1,1,9,10,0.05");
  CHECK(lines[3] == "REWORK(1),1,1,1,11,12,0.05");
}
