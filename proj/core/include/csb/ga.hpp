#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "csb/design_space.hpp"
#include "csb/run_log.hpp"

namespace csb {

struct GAConfig {
  int population_size = 10;
  int generations = 40000;
  int tournament_size = 3;
  double crossover_rate_per_gene = 0.5;
  double mutation_rate_per_gene = 0.1;
  int elite_size = 1;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on violated bounds.
  void validate() const;
};

/// Draws k population indices uniformly with replacement and returns the
/// index of the best fitness among them; exact ties go to the lowest
/// population index.
int tournament_select(const std::vector<double>& fitnesses, int k, Rng& rng);

/// Per-gene swap with the given probability; each locus of the children is
/// a permutation of the parents' genes, so in-domain parents always yield
/// in-domain children.
std::pair<DesignVector, DesignVector> uniform_crossover(const DesignVector& a,
                                                        const DesignVector& b,
                                                        double rate, Rng& rng);

/// Per-gene replacement: with the given probability the gene is resampled
/// uniformly from its own domain interval.
DesignVector mutate(const DesignVector& v, const DomainTable& domains,
                    double rate, Rng& rng);

/// Generational real-coded GA: tournament selection, per-gene uniform
/// crossover, per-gene replacement mutation, elitism. Exactly
/// population_size * generations objective evaluations; elites are
/// re-evaluated each generation so every individual counts once.
///
/// RNG draw order is fixed: initial population gene by gene; then per
/// generation, for each offspring pair left to right: the two tournaments
/// (k index draws each), the crossover mask (one draw per gene), then the
/// mutation draws for child 1 and child 2 (rate draw per gene, plus the
/// replacement value draw when triggered).
RunLog run_ga(const DomainTable& domains, const GAConfig& cfg,
              const Objective& objective);

}  // namespace csb
