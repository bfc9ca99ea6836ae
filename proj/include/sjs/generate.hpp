#pragma once

#include <cstdint>
#include <vector>

#include "sjs/instance.hpp"

namespace sjs {

struct GeneratorConfig {
  int jobs = 20;
  int ops_per_job = 5;
  int groups = 5;
  int proc_lo = 1, proc_hi = 5;
  int due_lo = 10, due_hi = 40;
  std::vector<int> capacities = {2, 3, 2, 2, 3};
  double scrap = 0.05;
  double rework = 0.2;
  double weight = 1.0;
  // Operation j is always eligible on group j mod groups; extra groups are
  // drawn uniformly from the rest, each with its own processing time.
  int eligible_per_op = 1;
  int shift_length = 8;
  std::uint64_t seed = 1;
};

// Random instance with i.i.d. discrete-uniform processing times and due
// dates. A pure function of the config: the same config gives the same
// instance on every platform. The horizon is sized by sized_horizon().
// Throws std::invalid_argument on inconsistent ranges or capacity count.
Instance generate_instance(const GeneratorConfig& config);

// The 20-job base case with its published processing times, due dates,
// capacities {2,3,2,2,3}, 5% scrap and 20% rework.
Instance example1_instance();

// Example 1 with due dates scaled by 10 and processing times redrawn from
// U[1,50] with the given seed.
Instance example2_instance(std::uint64_t seed);

}  // namespace sjs
