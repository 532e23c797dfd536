#include "csb/ga.hpp"

#include <algorithm>
#include <stdexcept>

namespace csb {

void GAConfig::validate() const {
  if (population_size < 1)
    throw std::invalid_argument("ga: population_size must be >= 1");
  if (elite_size < 1 || elite_size > population_size)
    throw std::invalid_argument("ga: need 1 <= elite_size <= population_size");
  if (generations < 1)
    throw std::invalid_argument("ga: generations must be >= 1");
  if (tournament_size < 1 || tournament_size > population_size)
    throw std::invalid_argument("ga: need 1 <= tournament_size <= population_size");
  if (crossover_rate_per_gene < 0.0 || crossover_rate_per_gene > 1.0 ||
      mutation_rate_per_gene < 0.0 || mutation_rate_per_gene > 1.0)
    throw std::invalid_argument("ga: rates must be within [0, 1]");
}

int tournament_select(const std::vector<double>& fitnesses, int k, Rng& rng) {
  if (fitnesses.empty())
    throw std::invalid_argument("tournament_select: empty population");
  int best = -1;
  for (int draw = 0; draw < k; ++draw) {
    const int idx = rng.uniform_int(static_cast<int>(fitnesses.size()));
    if (best < 0 ||
        fitnesses[static_cast<std::size_t>(idx)] >
            fitnesses[static_cast<std::size_t>(best)] ||
        (fitnesses[static_cast<std::size_t>(idx)] ==
             fitnesses[static_cast<std::size_t>(best)] &&
         idx < best))
      best = idx;
  }
  return best;
}

std::pair<DesignVector, DesignVector> uniform_crossover(const DesignVector& a,
                                                        const DesignVector& b,
                                                        double rate, Rng& rng) {
  DesignVector c1 = a, c2 = b;
  for (int i = 0; i < kGeneCount; ++i) {
    if (rng.uniform01() < rate) std::swap(c1[i], c2[i]);
  }
  return {c1, c2};
}

DesignVector mutate(const DesignVector& v, const DomainTable& domains,
                    double rate, Rng& rng) {
  DesignVector out = v;
  for (int i = 0; i < kGeneCount; ++i) {
    if (rng.uniform01() < rate)
      out[i] = rng.uniform(domains.lower(i), domains.upper(i));
  }
  return out;
}

RunLog run_ga(const DomainTable& domains, const GAConfig& cfg,
              const Objective& objective) {
  cfg.validate();
  Rng rng(cfg.seed);

  const int pop_size = cfg.population_size;
  std::vector<DesignVector> pop;
  pop.reserve(static_cast<std::size_t>(pop_size));
  for (int i = 0; i < pop_size; ++i) pop.push_back(sample_uniform(domains, rng));

  RunLog log;
  log.algorithm = "ga";
  log.seed = cfg.seed;
  log.records.reserve(static_cast<std::size_t>(cfg.generations));

  std::vector<Evaluation> evals(static_cast<std::size_t>(pop_size));
  std::vector<double> fitness_of(static_cast<std::size_t>(pop_size));
  std::int64_t evals_used = 0;
  bool have_best = false;

  for (int gen = 0; gen < cfg.generations; ++gen) {
    for (int i = 0; i < pop_size; ++i) {
      evals[static_cast<std::size_t>(i)] =
          objective(pop[static_cast<std::size_t>(i)]);
      fitness_of[static_cast<std::size_t>(i)] =
          evals[static_cast<std::size_t>(i)].fitness;
      ++evals_used;
    }

    // Best-so-far archive; elitism makes this equal to the generation best.
    for (int i = 0; i < pop_size; ++i) {
      if (!have_best ||
          evals[static_cast<std::size_t>(i)].fitness > log.best.fitness) {
        log.best = evals[static_cast<std::size_t>(i)];
        log.best_genome = pop[static_cast<std::size_t>(i)];
        have_best = true;
      }
    }
    log.records.push_back(
        {gen, evals_used, log.best.fitness, log.best.cost, log.best.s});

    if (gen + 1 == cfg.generations) break;

    // Elites by fitness, ties to the lower index.
    std::vector<int> order(static_cast<std::size_t>(pop_size));
    for (int i = 0; i < pop_size; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
      return fitness_of[static_cast<std::size_t>(l)] >
             fitness_of[static_cast<std::size_t>(r)];
    });

    std::vector<DesignVector> next;
    next.reserve(static_cast<std::size_t>(pop_size));
    for (int e = 0; e < cfg.elite_size; ++e)
      next.push_back(pop[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])]);

    while (static_cast<int>(next.size()) < pop_size) {
      const int p1 = tournament_select(fitness_of, cfg.tournament_size, rng);
      const int p2 = tournament_select(fitness_of, cfg.tournament_size, rng);
      auto [c1, c2] = uniform_crossover(pop[static_cast<std::size_t>(p1)],
                                        pop[static_cast<std::size_t>(p2)],
                                        cfg.crossover_rate_per_gene, rng);
      c1 = mutate(c1, domains, cfg.mutation_rate_per_gene, rng);
      c2 = mutate(c2, domains, cfg.mutation_rate_per_gene, rng);
      next.push_back(c1);
      if (static_cast<int>(next.size()) < pop_size) next.push_back(c2);
    }
    pop = std::move(next);
  }
  return log;
}

}  // namespace csb
