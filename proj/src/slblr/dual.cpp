#include "sjs/slblr/dual.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sjs/kernels.hpp"
#include "sjs/milp/lp.hpp"

namespace sjs::slblr {

HyperParams resolve(HyperParams p, double mean_weight, double capacity_norm, int shift_length) {
  if (p.beta < 0.0) p.beta = 0.05 * mean_weight;
  if (p.rho_max < 0.0) p.rho_max = 0.0;
  if (p.eps_violation < 0.0) p.eps_violation = 1e-3 * capacity_norm;
  if (p.delta_max < 0) p.delta_max = shift_length;
  return p;
}

StepOutcome compute_stepsize(double level, double lagrangian, double gnorm2, double gamma,
                             double zeta) {
  if (!(gnorm2 > 0.0)) return {StepKind::kStationary, 0.0};
  if (!(level > lagrangian)) return {StepKind::kLevelBreach, 0.0};
  return {StepKind::kOk, zeta * gamma * (level - lagrangian) / gnorm2};
}

void update_multipliers(DualState& state, std::span<const double> g, double step) {
  kernels::project_step(state.lambda, g, step);
  state.step = step;
  state.window.push_back(state.lambda);
}

DivergenceVerdict detect_divergence(const std::vector<std::vector<double>>& window) {
  DivergenceVerdict out;
  if (window.size() < 2) return out;
  const std::size_t full = window.front().size();
  std::vector<std::size_t> live;
  for (std::size_t d = 0; d < full; ++d) {
    for (const auto& it : window) {
      if (it[d] != 0.0) {
        live.push_back(d);
        break;
      }
    }
  }
  if (live.empty()) {
    out.witness.assign(full, 0.0);
    return out;
  }
  // ||x - l_{i+1}||^2 <= ||x - l_i||^2  <=>  2 (l_i - l_{i+1}) . x <= ||l_i||^2 - ||l_{i+1}||^2
  std::vector<milp::Inequality> rows;
  for (std::size_t i = 0; i + 1 < window.size(); ++i) {
    milp::Inequality row;
    row.coefs.resize(live.size());
    double ni = 0.0, nj = 0.0;
    for (std::size_t q = 0; q < live.size(); ++q) {
      const double a = window[i][live[q]], b = window[i + 1][live[q]];
      row.coefs[q] = 2.0 * (a - b);
      ni += a * a;
      nj += b * b;
    }
    row.rhs = ni - nj;
    rows.push_back(std::move(row));
  }
  const milp::FeasibilityVerdict v = milp::solve_lp_feasibility(rows, static_cast<int>(live.size()));
  out.feasible = v.feasible;
  if (v.feasible) {
    out.witness.assign(full, 0.0);
    for (std::size_t q = 0; q < live.size(); ++q) out.witness[live[q]] = v.witness[q];
  }
  return out;
}

double update_level(std::span<const LevelRecord> records, double gamma) {
  if (records.empty()) throw std::invalid_argument("level update needs at least one record");
  double best = -std::numeric_limits<double>::infinity();
  for (const LevelRecord& r : records) best = std::max(best, r.step * r.gnorm2 / gamma + r.lagrangian);
  return best;
}

}  // namespace sjs::slblr
