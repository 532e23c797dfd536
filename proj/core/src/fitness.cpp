#include "csb/fitness.hpp"

#include <cmath>

namespace csb {

double fitness(double cost_keur, double s, const FitnessParams& p) {
  if (!(cost_keur > 0.0) || std::isnan(cost_keur))
    throw std::domain_error("fitness: cost must be positive");
  if (s < 0.0 || std::isnan(s))
    throw std::domain_error("fitness: constraint value must be >= 0");

  const double cr = p.cost_threshold_keur;
  if (cost_keur >= cr) return cr / cost_keur;
  if (s > 1.0) return 1.0 + 1.0 / s;
  return 2.0 - (1.0 - s) + cr / cost_keur;
}

}  // namespace csb
