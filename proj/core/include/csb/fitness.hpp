#pragma once

#include <stdexcept>

namespace csb {

struct FitnessParams {
  double cost_threshold_keur = 150.0;  // c_r
};

/// Maps (cost, max constraint ratio) to the scalar maximization objective.
///
/// Three regimes, separated by the cost threshold c_r and the feasibility
/// boundary s = 1:
///   cost >  c_r            -> c_r / cost, in (0, 1); cost == c_r included
///   cost <  c_r, s > 1     -> 1 + 1/s, in (1, 2)
///   cost <  c_r, s <= 1    -> 2 - (1 - s) + c_r/cost, > 2
/// The formula is undefined at cost == c_r (strict inequalities on both
/// sides); that boundary is resolved to the first branch, giving f = 1,
/// the continuity limit. s may be +inf (failed-analysis sentinel), which
/// lands in the second branch with 1/s = 0, i.e. f = 1 exactly.
///
/// Throws std::domain_error on cost <= 0 or s < 0 (evaluator bug, not a
/// legitimate design outcome).
double fitness(double cost_keur, double s, const FitnessParams& p = {});

}  // namespace csb
