#pragma once

#include <span>
#include <string>
#include <vector>

namespace sjs::slblr {

struct HyperParams {
  double gamma = 0.5;
  double zeta = 0.95;
  double beta = -1.0;           // penalty increment; < 0: 0.05 x mean job weight
  double rho0 = 0.0;
  double rho_max = -1.0;        // < 0: 0, i.e. no penalty unless raised
  double eps_violation = -1.0;  // < 0: 1e-3 x ||C||
  double level0 = -1.0;         // < 0: cost of the best starting schedule
  int window_cap = 40;
  int group_size = 1;
  int bound_every = 20;
  int stall_bounds = 3;         // bound evaluations without progress before the level is cut; 0 = never
  int list_trials = 20;         // perturbed list schedules per bound evaluation
  int repair_every = 0;         // 0: repair only when the violation is small
  int delta = 2;
  int delta_max = -1;           // < 0: shift length
  double repair_time_limit = 60.0;
  long long subproblem_nodes = 0;  // branch-and-bound refinement when rho > 0, 0 = DP only
  double target_gap = 0.10;
  double time_limit = 3600.0;
  long long max_iterations = -1;
  unsigned long long seed = 1;
};

// Fills every defaulted (negative) field from the instance data.
HyperParams resolve(HyperParams p, double mean_weight, double capacity_norm, int shift_length);

struct LevelRecord {
  double step = 0.0;
  double gnorm2 = 0.0;
  double lagrangian = 0.0;
};

struct DualState {
  std::vector<double> lambda;
  double step = 0.0;
  double level = 0.0;
  double rho = 0.0;
  long long k = 0;
  // Iterates since the last level update, oldest first, and the matching
  // step records.
  std::vector<std::vector<double>> window;
  std::vector<LevelRecord> records;
};

enum class StepKind { kOk, kStationary, kLevelBreach };

struct StepOutcome {
  StepKind kind = StepKind::kOk;
  double step = 0.0;
};

// s = zeta * gamma * (level - L) / ||g||^2.
StepOutcome compute_stepsize(double level, double lagrangian, double gnorm2, double gamma,
                             double zeta);

// lambda <- max(0, lambda + step * g); the new iterate joins the window.
void update_multipliers(DualState& state, std::span<const double> g, double step);

struct DivergenceVerdict {
  bool feasible = true;
  std::vector<double> witness;  // in the full multiplier space
};

// Is there a point at least as close to every iterate of the window as to
// its predecessor? Infeasibility proves a step overshot the level bound.
// Coordinates that are zero in every iterate are dropped first.
DivergenceVerdict detect_divergence(const std::vector<std::vector<double>>& window);

// max over records of step * ||g||^2 / gamma + L. Throws on an empty window.
double update_level(std::span<const LevelRecord> records, double gamma);

}  // namespace sjs::slblr
