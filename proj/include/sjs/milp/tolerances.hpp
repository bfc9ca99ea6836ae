#pragma once

namespace sjs::milp {

// Numeric tolerances shared by every solver path.
inline constexpr double kFeasibilityTol = 1e-6;  // row and bound satisfaction
inline constexpr double kOptimalityTol = 1e-9;   // absolute gap closure / pruning
inline constexpr double kLpPivotTol = 1e-11;     // simplex pivot magnitude
inline constexpr double kLpWitnessTol = 1e-9;    // feasibility witness check
inline constexpr double kIntegralityTol = 1e-9;

}  // namespace sjs::milp
