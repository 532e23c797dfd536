#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "csb/evaluator.hpp"
#include "csb/fitness.hpp"
#include "csb/run_log.hpp"
#include "csb/stats.hpp"

namespace csb {

struct IncompleteData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The bar used for improvement rates: a fixed documented design evaluated
/// under this repository's evaluator. The published baseline constants of
/// the original study are carried as metadata only and never used as a
/// pass/fail target (they belong to a different evaluator).
struct ReferenceDesign {
  DesignVector genome;
  double cost_keur = 0.0;  // evaluated under the repo evaluator
  double s_max = 0.0;
  double paper_cost_keur = 91.354;
  double paper_s_max = 0.9962;

  static const DesignVector& standard_genome();
  static ReferenceDesign standard(const Evaluator& evaluator);
};

struct ImprovementRate {
  int numerator = 0;
  int denominator = 0;
  double value = 0.0;
};

/// Fraction of runs whose final best is strictly cheaper than the
/// reference and feasible (s <= 1).
ImprovementRate improvement_rate(std::span<const RunLog> logs,
                                 const ReferenceDesign& reference);

struct MetricTest {
  std::string metric;
  double u = 0.0;
  double p = 1.0;
  double effect_size = 0.0;
};

struct ExperimentSummary {
  std::string algorithm;
  std::uint64_t base_seed = 0;
  int n_runs = 0;
  double mean_fitness = 0.0, std_fitness = 0.0;
  double mean_cost = 0.0, std_cost = 0.0;
  double mean_s = 0.0, std_s = 0.0;
  ImprovementRate improvement;
  double reference_cost_keur = 0.0;
  double reference_s_max = 0.0;

  struct Final {
    std::uint64_t seed = 0;
    double fitness = 0.0;
    double cost = 0.0;
    double s = 0.0;
  };
  std::vector<Final> finals;  // in run order
};

ExperimentSummary summarize(const std::string& algorithm,
                            std::uint64_t base_seed,
                            std::span<const RunLog> logs,
                            const ReferenceDesign& reference);

std::string summary_json(const ExperimentSummary& s);

/// seed of run i under base seed b; documented derivation b*1000 + i.
std::uint64_t seed_for_run(std::uint64_t base_seed, int run_index);

struct ExperimentOptions {
  int n_runs = 30;
  std::uint64_t base_seed = 0;
  int threads = 0;  // 0 = hardware concurrency
};

using RunFunction = std::function<RunLog(std::uint64_t seed)>;

/// Executes n_runs independent runs on a worker pool. Each run is one
/// task with its own state; results land in run-index order, so the
/// outcome is independent of thread count and scheduling.
std::vector<RunLog> run_experiment(const RunFunction& run_one,
                                   const ExperimentOptions& opts);

/// Experiment directory layout: <dir>/runs/<algo>/<seed>.csv and
/// <dir>/best/<seed>.json, plus <dir>/summary.json.
void persist_run(const std::string& out_dir, const RunLog& log);
void persist_summary(const std::string& out_dir, const ExperimentSummary& s);

struct LoadedExperiment {
  std::string algorithm;
  std::vector<RunLog> logs;  // sorted by seed
};

/// Throws IncompleteData when the directory holds no runs or a run log
/// lacks its best-genome file.
LoadedExperiment load_experiment_dir(const std::string& dir);

struct ComparisonReport {
  ExperimentSummary a;
  ExperimentSummary b;
  std::vector<MetricTest> tests;  // fitness, cost, s; a-vs-b orientation
  double best_cost_a = 0.0, best_s_a = 0.0;
  double best_cost_b = 0.0, best_s_b = 0.0;
  double reference_cost = 0.0, reference_s = 0.0;
};

/// Rank tests and the best-solution table for two run sets. The effect
/// size follows the a-vs-b orientation: pass the strategy of interest
/// (e.g. the ES run set) as `a` to match the usual reporting convention.
ComparisonReport compare_experiments(const LoadedExperiment& a,
                                     const LoadedExperiment& b,
                                     const ReferenceDesign& reference);

std::string comparison_json(const ComparisonReport& r);
std::string comparison_text(const ComparisonReport& r);

/// Per-generation mean of the best-so-far series across runs; rows start
/// at generation `skip_first` (plot-data convention for convergence
/// figures where early generations dwarf the axis).
void write_mean_curves_csv(std::ostream& os, std::span<const RunLog> logs,
                           int skip_first);
void write_finals_csv(std::ostream& os, std::span<const RunLog> logs);

/// Bridge objective: evaluate then score. The +inf sentinel from failed
/// analyses flows through fitness as its documented branch-2 limit.
Objective make_bridge_objective(const Evaluator& evaluator,
                                const FitnessParams& params);

}  // namespace csb
