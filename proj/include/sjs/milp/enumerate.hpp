#pragma once

#include "sjs/milp/model.hpp"

namespace sjs::milp {

inline constexpr double kEnumerationCap = 1e7;

// Exhaustive oracle: tries every combination of SOS1 choices and resolves the
// remaining variables exactly. SOS1 domains and the bounds of the other
// variables are first reduced by row-by-row propagation to a fixpoint; the
// product of the reduced domain sizes must not exceed kEnumerationCap,
// otherwise std::length_error is thrown.
//
// Among optimal combinations the first in lexicographic order of (group,
// member) wins. Shares no search code with solve_builtin.
MilpSolution enumerate_all(const MilpModel& model);

// Product of SOS1 domain sizes after the filter, as used for the cap.
double enumeration_size(const MilpModel& model);

}  // namespace sjs::milp
