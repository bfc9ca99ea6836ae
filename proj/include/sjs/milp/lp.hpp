#pragma once

#include <limits>
#include <span>
#include <vector>

namespace sjs::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// coefs . x <= rhs
struct Inequality {
  std::vector<double> coefs;
  double rhs = 0.0;
};

struct FeasibilityVerdict {
  bool feasible = false;
  std::vector<double> witness;  // satisfies every row within kLpWitnessTol when feasible
};

// Phase-1 simplex over free variables x in R^dim.
FeasibilityVerdict solve_lp_feasibility(std::span<const Inequality> rows, int dim);

// min cost . x  s.t.  lo_i <= a_i . x <= hi_i,  lower <= x <= upper.
// Any bound may be infinite.
struct DenseLp {
  struct RangeRow {
    std::vector<double> coefs;
    double lo = -kInf;
    double hi = kInf;
  };
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<RangeRow> rows;

  int num_vars() const { return static_cast<int>(cost.size()); }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective = kInf;
};

// Two-phase dense tableau simplex with Bland's rule.
LpResult solve_lp(const DenseLp& lp);

}  // namespace sjs::milp
