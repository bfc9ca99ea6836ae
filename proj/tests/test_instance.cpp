#include <cmath>

#include "doctest.h"
#include "sjs/dispatch.hpp"
#include "sjs/generate.hpp"
#include "sjs/instance.hpp"
#include "support.hpp"

using namespace sjs;

namespace {

Job uniform_job(int ops, double ps, double pr) {
  Job job;
  job.id = 1;
  job.due_date = 10;
  for (int j = 0; j < ops; ++j) {
    OperationSpec op;
    op.eligible = {{0, 1}};
    op.scrap_prob = ps;
    op.rework_prob = pr;
    job.operations.push_back(op);
  }
  return job;
}

bool has_field(const std::vector<Violation>& v, const std::string& field) {
  for (const auto& x : v)
    if (x.field == field) return true;
  return false;
}

}  // namespace

TEST_CASE("scenario weights: five ops at 5% scrap") {
  auto w = scenario_weights(uniform_job(5, 0.05, 0.2));
  REQUIRE(w.size() == 11);
  CHECK(w[0].key.kind == ScenarioKind::kFirstPass);
  CHECK(w[0].weight == doctest::Approx(0.7737809375).epsilon(1e-15));
  CHECK(std::pow(0.95, 5) == doctest::Approx(w[0].weight).epsilon(1e-15));
}

TEST_CASE("scenario weights: failure at the first op") {
  auto w = scenario_weights(uniform_job(5, 0.05, 0.2));
  CHECK(w[1].key.kind == ScenarioKind::kDiscard);
  CHECK(w[1].key.failed_op == 0);
  CHECK(w[2].key.kind == ScenarioKind::kRework);
  CHECK(std::abs(w[2].weight - 0.01) < 1e-15);
  CHECK(std::abs(w[1].weight - 0.04) < 1e-15);
}

TEST_CASE("scenario weights: no defects") {
  auto w = scenario_weights(uniform_job(4, 0.0, 0.3));
  CHECK(w[0].weight == 1.0);
  for (std::size_t s = 1; s < w.size(); ++s) CHECK(w[s].weight == 0.0);
}

TEST_CASE("scenario weights: path-product oracle and normalization, 1000 draws") {
  test::Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    Job job = uniform_job(test::uniform_int(rng, 1, 8), 0, 0);
    for (auto& op : job.operations) {
      op.scrap_prob = test::uniform_real(rng, 0.0, 0.999);
      op.rework_prob = test::uniform_real(rng, 0.0, 1.0);
    }
    auto w = scenario_weights(job);
    REQUIRE(static_cast<int>(w.size()) == num_scenarios(job));
    double sum = 0.0;
    for (int s = 0; s < num_scenarios(job); ++s) {
      CHECK(w[s].weight >= 0.0);
      CHECK(std::abs(w[s].weight - test::oracle_scenario_prob(job, s)) < 1e-13);
      CHECK(w[s].key == scenario_key(0, s));
      sum += w[s].weight;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("survival_before is the first-pass occupancy weight") {
  Job job = uniform_job(3, 0.1, 0.5);
  CHECK(survival_before(job, 0) == 1.0);
  CHECK(survival_before(job, 1) == doctest::Approx(0.9));
  CHECK(survival_before(job, 2) == doctest::Approx(0.81));
}

TEST_CASE("scenario keys") {
  ScenarioKey r = scenario_key(2, 6);
  CHECK(r.job == 2);
  CHECK(r.kind == ScenarioKind::kRework);
  CHECK(r.failed_op == 2);
  CHECK(r.first_op() == 2);
  ScenarioKey d = scenario_key(0, 5);
  CHECK(d.kind == ScenarioKind::kDiscard);
  CHECK(d.first_op() == 0);
  CHECK(to_string(scenario_key(0, 0)) == "FIRST_PASS");
  CHECK(to_string(r) == "REWORK(3)");
  CHECK(to_string(d) == "DISCARD(3)");
}

TEST_CASE("Example 1 instance is valid") {
  Instance inst = example1_instance();
  CHECK(validate_instance(inst).empty());
  REQUIRE(inst.num_jobs() == 20);
  REQUIRE(inst.num_groups() == 5);
  std::vector<int> caps;
  for (const auto& g : inst.machine_groups) caps.push_back(g.capacity);
  CHECK(caps == std::vector<int>{2, 3, 2, 2, 3});
  const int due[20] = {15, 25, 32, 36, 21, 27, 26, 13, 29, 12,
                       35, 31, 19, 24, 33, 23, 18, 21, 17, 22};
  for (int i = 0; i < 20; ++i) {
    const Job& job = inst.jobs[i];
    CHECK(job.due_date == due[i]);
    CHECK(job.weight == 1.0);
    REQUIRE(job.num_ops() == 5);
    for (int j = 0; j < 5; ++j) {
      const auto& op = job.operations[j];
      REQUIRE(op.eligible.size() == 1);
      CHECK(op.eligible[0].group == j);  // machine j is dedicated to operation j
      CHECK(op.eligible[0].proc_time >= 1);
      CHECK(op.eligible[0].proc_time <= 5);
      CHECK(op.scrap_prob == 0.05);
      CHECK(op.rework_prob == 0.2);
    }
  }
  CHECK(inst.horizon % inst.shift_length == 0);
  CHECK(inst.horizon >= default_horizon(inst));
}

TEST_CASE("validate_instance names the broken field") {
  Instance inst = example1_instance();
  SUBCASE("capacity 0") {
    inst.machine_groups[2].capacity = 0;
    auto v = validate_instance(inst);
    CHECK(v.size() == 1);
    CHECK(has_field(v, "MachineGroup.capacity"));
  }
  SUBCASE("empty eligible set") {
    inst.jobs[3].operations[1].eligible.clear();
    auto v = validate_instance(inst);
    CHECK(v.size() == 1);
    CHECK(has_field(v, "OperationSpec.eligible"));
  }
  SUBCASE("scrap probability of 1") {
    inst.jobs[0].operations[0].scrap_prob = 1.0;
    CHECK(has_field(validate_instance(inst), "OperationSpec.scrap_prob"));
  }
  SUBCASE("unknown group") {
    inst.jobs[0].operations[0].eligible[0].group = 9;
    CHECK(!validate_instance(inst).empty());
  }
  SUBCASE("no operations") {
    inst.jobs[5].operations.clear();
    CHECK(!validate_instance(inst).empty());
  }
  SUBCASE("horizon too short") {
    inst.horizon = 10;
    CHECK(!validate_instance(inst).empty());
  }
}

TEST_CASE("operations_on is the reverse eligibility map") {
  test::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = test::random_instance(rng);
    int count = 0;
    for (int m = 0; m < inst.num_groups(); ++m) {
      for (auto [i, j] : inst.operations_on(m)) {
        CHECK(test::oracle_proc(inst, i, j, m) > 0);
        ++count;
      }
    }
    int expected = 0;
    for (const auto& job : inst.jobs)
      for (const auto& op : job.operations) expected += static_cast<int>(op.eligible.size());
    CHECK(count == expected);
  }
}

TEST_CASE("generate_instance: robustness family shape") {
  GeneratorConfig c;
  c.seed = 4;
  Instance inst = generate_instance(c);
  CHECK(validate_instance(inst).empty());
  CHECK(inst.num_jobs() == 20);
  for (const auto& job : inst.jobs) {
    CHECK(job.due_date >= 10);
    CHECK(job.due_date <= 40);
    CHECK(job.num_ops() == 5);
    for (const auto& op : job.operations)
      for (const auto& e : op.eligible) {
        CHECK(e.proc_time >= 1);
        CHECK(e.proc_time <= 5);
      }
  }
}

TEST_CASE("generate_instance: long processing family") {
  GeneratorConfig c;
  c.proc_lo = 1;
  c.proc_hi = 50;
  c.due_lo = 100;
  c.due_hi = 400;
  Instance inst = generate_instance(c);
  CHECK(validate_instance(inst).empty());
  int hi = 0;
  for (const auto& job : inst.jobs) {
    CHECK(job.due_date >= 100);
    CHECK(job.due_date <= 400);
    for (const auto& op : job.operations) hi = std::max(hi, op.eligible[0].proc_time);
  }
  CHECK(hi > 5);
  CHECK(hi <= 50);

  Instance ex2 = example2_instance(1);
  CHECK(validate_instance(ex2).empty());
  Instance ex1 = example1_instance();
  for (int i = 0; i < 20; ++i) CHECK(ex2.jobs[i].due_date == 10 * ex1.jobs[i].due_date);
}

TEST_CASE("generate_instance: degenerate processing range") {
  GeneratorConfig c;
  c.proc_lo = c.proc_hi = 3;
  Instance inst = generate_instance(c);
  for (const auto& job : inst.jobs)
    for (const auto& op : job.operations)
      for (const auto& e : op.eligible) CHECK(e.proc_time == 3);
}

TEST_CASE("generate_instance is a pure function of its config") {
  for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
    GeneratorConfig c;
    c.seed = seed;
    c.eligible_per_op = 2;
    CHECK(generate_instance(c) == generate_instance(c));
  }
  GeneratorConfig a, b;
  b.seed = a.seed + 1;
  CHECK(!(generate_instance(a) == generate_instance(b)));
}

TEST_CASE("generate_instance rejects inconsistent arguments") {
  GeneratorConfig c;
  c.capacities = {1, 2};
  CHECK_THROWS_AS(generate_instance(c), std::invalid_argument);
  GeneratorConfig d;
  d.proc_lo = 0;
  CHECK_THROWS_AS(generate_instance(d), std::invalid_argument);
  GeneratorConfig e;
  e.due_lo = 5;
  e.due_hi = 4;
  CHECK_THROWS_AS(generate_instance(e), std::invalid_argument);
}

TEST_CASE("default horizon rule") {
  Instance inst = example1_instance();
  int longest = 0;
  for (int i = 0; i < inst.num_jobs(); ++i) {
    int serial = 0;
    for (const auto& op : inst.jobs[i].operations) serial += op.eligible[0].proc_time;
    longest = std::max(longest, 2 * serial);
  }
  int raw = 2 * 36 + longest;
  int expected = ((raw + inst.shift_length - 1) / inst.shift_length) * inst.shift_length;
  CHECK(default_horizon(inst) == expected);
}

TEST_CASE("shift restart is the first block of the next shift") {
  CHECK(shift_restart(7, 8) == 9);
  CHECK(shift_restart(8, 8) == 9);
  CHECK(shift_restart(9, 8) == 17);
  CHECK(shift_restart(1, 4) == 5);
}
