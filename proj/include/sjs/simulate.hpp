#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sjs/instance.hpp"
#include "sjs/schedule.hpp"

namespace sjs {

// Expected weighted tardiness by walking each job's defect tree operation by
// operation: at op j the surviving mass splits into advance, rework and
// discard, and each defect branch is priced with its second-attempt plan.
// Throws std::invalid_argument on a missing placement.
double exact_expected_tardiness(const Instance& inst, const Schedule& schedule);

enum class SimMode {
  kSingleFailure,  // at most one defect per job; unbiased for the model objective
  kFullMarkov,     // retries continue after a second-attempt defect (diagnostic)
};
const char* to_string(SimMode mode);

struct TransitionCounts {
  long long advance = 0;
  long long rework = 0;
  long long discard = 0;

  long long total() const { return advance + rework + discard; }
};

struct MonteCarloResult {
  SimMode mode = SimMode::kSingleFailure;
  long long samples = 0;
  double mean = 0.0;
  double std_error = 0.0;
  TransitionCounts transitions;
};

// Sample n draws from its own SplitMix64 stream keyed by (seed, n), so the
// result does not depend on `threads`. In full-Markov mode, work after a
// second-attempt defect restarts at the next shift boundary and runs the
// remaining operations back to back on their fastest eligible group.
MonteCarloResult monte_carlo_tardiness(const Instance& inst, const Schedule& schedule,
                                       long long samples, std::uint64_t seed,
                                       SimMode mode = SimMode::kSingleFailure, int threads = 1);

// CSV with header mode,N,mean,std_error,exact_value,z_score.
void write_evaluation_csv(std::ostream& out, const std::vector<MonteCarloResult>& runs,
                          double exact_value);

}  // namespace sjs
