#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "csb/design_space.hpp"

namespace csb {

/// What an optimizer sees for one candidate: the scalar it maximizes plus
/// the (cost, s) pair behind it, carried along for logging.
struct Evaluation {
  double fitness = 0.0;
  double cost = 0.0;
  double s = 0.0;
};

using Objective = std::function<Evaluation(const DesignVector&)>;

struct GenerationRecord {
  int generation = 0;        // 0-based
  std::int64_t evals_used = 0;
  double best_fitness = 0.0;  // best-so-far
  double best_cost = 0.0;     // cost of the best-so-far individual
  double best_s = 0.0;
};

/// Per-run record: one row per generation (best-so-far metrics, cumulative
/// evaluation counter) plus the final best genome.
struct RunLog {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<GenerationRecord> records;
  DesignVector best_genome;
  Evaluation best;

  /// Throws std::logic_error when the counter is not strictly increasing
  /// or the final record disagrees with the best-fitness record.
  void validate() const;
};

/// Shortest round-trip decimal representation (std::to_chars), the one
/// number format used in every artifact so outputs are byte-reproducible.
std::string format_double(double x);

void write_run_csv(std::ostream& os, const RunLog& log);
void write_run_csv_file(const std::string& path, const RunLog& log);
RunLog read_run_csv_file(const std::string& path, const std::string& algorithm,
                         std::uint64_t seed);

std::string best_genome_json(const RunLog& log);
void write_best_genome_file(const std::string& path, const RunLog& log);
RunLog read_best_genome_file(const std::string& path);

}  // namespace csb
