#include "residual.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sjs/milp/lp.hpp"
#include "sjs/milp/tolerances.hpp"

namespace sjs::milp::detail {

namespace {

constexpr double kTol = kFeasibilityTol;

BlockResult single_variable(double cost, double lower, double upper, bool is_int,
                            const std::vector<RowSpan>& rows) {
  BlockResult out;
  double lo = lower;
  double hi = upper;
  for (const RowSpan& r : rows) {
    const double a = r.coefs[0];
    if (a == 0.0) {
      if (r.lo > kTol || r.hi < -kTol) return out;
      continue;
    }
    double from = r.lo / a;
    double to = r.hi / a;
    if (a < 0.0) std::swap(from, to);
    lo = std::max(lo, from);
    hi = std::min(hi, to);
  }
  if (is_int) {
    lo = std::ceil(lo - kIntegralityTol);
    hi = std::floor(hi + kIntegralityTol);
  }
  if (lo > hi + kTol) return out;
  if (hi < lo) hi = lo;
  const double v = cost < 0.0 ? hi : lo;
  out.feasible = true;
  out.values = {v};
  out.objective = cost * v;
  return out;
}

// Continuous knapsack-style LP with one range row.
BlockResult single_row(const std::vector<double>& cost, const std::vector<double>& lower,
                       const std::vector<double>& upper, const RowSpan& row) {
  const int n = static_cast<int>(cost.size());
  BlockResult out;
  std::vector<double> v(n);
  double activity = 0.0;
  for (int k = 0; k < n; ++k) {
    v[k] = cost[k] < 0.0 ? upper[k] : lower[k];
    activity += row.coefs[k] * v[k];
  }
  auto repair = [&](double need, bool raise) {
    // Moves variables to shift the activity by `need` (> 0) in the given
    // direction at the least cost per unit of activity.
    struct Move {
      double rate;
      int k;
      double room;
    };
    std::vector<Move> moves;
    for (int k = 0; k < n; ++k) {
      const double a = row.coefs[k];
      if (a == 0.0) continue;
      const bool up = (a > 0.0) == raise;  // direction of v_k that helps
      const double room = up ? upper[k] - v[k] : v[k] - lower[k];
      if (room <= 0.0) continue;
      const double rate = (up ? cost[k] : -cost[k]) / std::abs(a);
      moves.push_back({rate, k, room * std::abs(a)});
    }
    std::stable_sort(moves.begin(), moves.end(),
                     [](const Move& x, const Move& y) { return x.rate < y.rate; });
    for (const Move& m : moves) {
      if (need <= 0.0) break;
      const double take = std::min(need, m.room);
      const double a = row.coefs[m.k];
      const bool up = (a > 0.0) == raise;
      v[m.k] += (up ? 1.0 : -1.0) * take / std::abs(a);
      need -= take;
    }
    return need <= kTol;
  };
  if (activity < row.lo - kTol) {
    if (!repair(row.lo - activity, true)) return out;
  } else if (activity > row.hi + kTol) {
    if (!repair(activity - row.hi, false)) return out;
  }
  out.feasible = true;
  out.values = v;
  out.objective = 0.0;
  for (int k = 0; k < n; ++k) out.objective += cost[k] * v[k];
  return out;
}

BlockResult dense(const std::vector<double>& cost, const std::vector<double>& lower,
                  const std::vector<double>& upper, const std::vector<RowSpan>& rows) {
  DenseLp lp;
  lp.cost = cost;
  lp.lower = lower;
  lp.upper = upper;
  for (const RowSpan& r : rows) lp.rows.push_back({r.coefs, r.lo, r.hi});
  const LpResult res = solve_lp(lp);
  BlockResult out;
  if (res.status != LpStatus::kOptimal) return out;
  out.feasible = true;
  out.values = res.x;
  out.objective = res.objective;
  return out;
}

}  // namespace

BlockResult minimize_block(const std::vector<double>& cost, const std::vector<double>& lower,
                           const std::vector<double>& upper, const std::vector<bool>& is_int,
                           const std::vector<RowSpan>& rows, bool exact_integers) {
  const int n = static_cast<int>(cost.size());
  if (n == 1) return single_variable(cost[0], lower[0], upper[0], is_int[0], rows);
  const bool any_int = std::any_of(is_int.begin(), is_int.end(), [](bool b) { return b; });
  if (rows.size() == 1 && !any_int) return single_row(cost, lower, upper, rows[0]);
  if (rows.empty() && !any_int) {
    BlockResult out{true, 0.0, {}};
    for (int k = 0; k < n; ++k) {
      out.values.push_back(cost[k] < 0.0 ? upper[k] : lower[k]);
      out.objective += cost[k] * out.values.back();
    }
    return out;
  }
  if (!any_int || !exact_integers) return dense(cost, lower, upper, rows);

  // Enumerate integer assignments, LP over the continuous rest.
  std::vector<int> ints;
  long long combos = 1;
  for (int k = 0; k < n; ++k) {
    if (!is_int[k]) continue;
    ints.push_back(k);
    const double span = std::floor(upper[k] + kIntegralityTol) - std::ceil(lower[k] - kIntegralityTol) + 1;
    combos *= static_cast<long long>(std::max(span, 0.0));
    if (combos > 100000) throw std::runtime_error("residual integer block too large to enumerate");
  }
  BlockResult best;
  std::vector<double> lo = lower;
  std::vector<double> hi = upper;
  std::vector<double> pick(ints.size());
  for (std::size_t q = 0; q < ints.size(); ++q) pick[q] = std::ceil(lower[ints[q]] - kIntegralityTol);
  for (long long c = 0; c < combos; ++c) {
    for (std::size_t q = 0; q < ints.size(); ++q) lo[ints[q]] = hi[ints[q]] = pick[q];
    BlockResult r = dense(cost, lo, hi, rows);
    if (r.feasible && (!best.feasible || r.objective < best.objective - kOptimalityTol)) best = r;
    for (std::size_t q = 0; q < ints.size(); ++q) {
      pick[q] += 1.0;
      if (pick[q] <= std::floor(upper[ints[q]] + kIntegralityTol)) break;
      pick[q] = std::ceil(lower[ints[q]] - kIntegralityTol);
    }
  }
  return best;
}

}  // namespace sjs::milp::detail
