#pragma once

// Closed-form minimization of residual (non-SOS) variable blocks. Internal to
// the MILP solvers.

#include <vector>

namespace sjs::milp::detail {

struct RowSpan {
  std::vector<double> coefs;  // one per block variable
  double lo;
  double hi;
};

struct BlockResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> values;
};

// min cost . v  s.t.  lo_r <= coefs_r . v <= hi_r,  lower <= v <= upper,
// integrality where is_int. Single-variable and single-row continuous blocks
// are solved greedily; anything else goes through the dense LP, enumerating
// integer variables when `exact_integers` is set.
BlockResult minimize_block(const std::vector<double>& cost, const std::vector<double>& lower,
                           const std::vector<double>& upper, const std::vector<bool>& is_int,
                           const std::vector<RowSpan>& rows, bool exact_integers);

}  // namespace sjs::milp::detail
