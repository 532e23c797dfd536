// Command-line front end: batch experiment runner, statistics, comparison
// reports and geometry export. Exit codes: 0 success, 2 configuration
// error, 3 I/O error, 4 incomplete data.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "csb/cmaes.hpp"
#include "csb/design_space.hpp"
#include "csb/evaluator.hpp"
#include "csb/fitness.hpp"
#include "csb/ga.hpp"
#include "csb/geometry_export.hpp"
#include "csb/harness.hpp"
#include "csb/run_log.hpp"

namespace fs = std::filesystem;
using namespace csb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitIncomplete = 4;

struct CommonOptions {
  std::string domains_path;
  std::string materials_path;
  double cr = 150.0;

  DomainTable domains() const {
    return domains_path.empty() ? DomainTable::standard()
                                : DomainTable::load(domains_path);
  }
  MaterialParams materials() const {
    return materials_path.empty() ? MaterialParams::standard()
                                  : MaterialParams::load(materials_path);
  }
};

struct RunOptions {
  std::string algo;
  std::string out_dir;
  int runs = 1;
  std::uint64_t seed = 0;
  int threads = 0;
  int generations = 0;  // 0 = algorithm default
  int pop_size = 10;
  int mu = 25;
  int lambda = 50;
  double sigma0 = 0.5;
  int snapshot_every = 0;
};

void add_common_flags(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--domains", common.domains_path,
                  "Gene domain table (JSON); defaults to the built-in table");
  cmd->add_option("--materials", common.materials_path,
                  "Material prices/capacities (JSON)");
  cmd->add_option("--cr", common.cr,
                  "Cost threshold of the fitness function, k EUR");
}

void add_run_flags(CLI::App* cmd, RunOptions& run) {
  cmd->add_option("--algo", run.algo, "Algorithm: ga or cmaes")->required();
  cmd->add_option("--out", run.out_dir, "Output directory");
  cmd->add_option("--runs", run.runs, "Number of independent runs");
  cmd->add_option("--seed", run.seed, "Base seed (run i uses seed*1000+i)");
  cmd->add_option("--threads", run.threads,
                  "Worker threads (0 = hardware concurrency)");
  cmd->add_option("--generations", run.generations,
                  "Generations per run (0 = algorithm default)");
  cmd->add_option("--pop-size", run.pop_size, "GA population size");
  cmd->add_option("--mu", run.mu, "CMA-ES parent count");
  cmd->add_option("--lambda", run.lambda, "CMA-ES offspring count");
  cmd->add_option("--sigma0", run.sigma0, "CMA-ES initial step size");
  cmd->add_option("--snapshot-every", run.snapshot_every,
                  "Dump CMA-ES state snapshot every N generations");
}

struct ValidatedRun {
  std::optional<GAConfig> ga;
  std::optional<CmaEsConfig> cmaes;
};

// Shared by `run` and `validate-config` so both accept exactly the same
// configurations.
ValidatedRun validate_run_config(const CommonOptions& common,
                                 const RunOptions& run) {
  common.domains().validate();
  common.materials();
  if (common.cr <= 0.0)
    throw std::invalid_argument("--cr must be positive");
  if (run.runs < 1) throw std::invalid_argument("--runs must be >= 1");
  if (run.threads < 0) throw std::invalid_argument("--threads must be >= 0");
  if (run.snapshot_every < 0)
    throw std::invalid_argument("--snapshot-every must be >= 0");

  ValidatedRun v;
  if (run.algo == "ga") {
    GAConfig cfg;
    cfg.population_size = run.pop_size;
    if (run.generations > 0) cfg.generations = run.generations;
    cfg.validate();
    v.ga = cfg;
  } else if (run.algo == "cmaes") {
    CmaEsConfig cfg;
    cfg.mu = run.mu;
    cfg.lambda = run.lambda;
    cfg.sigma0 = run.sigma0;
    if (run.generations > 0) cfg.generations = run.generations;
    cfg.validate();
    v.cmaes = cfg;
  } else {
    throw std::invalid_argument("--algo must be 'ga' or 'cmaes'");
  }
  return v;
}

int cmd_run(const CommonOptions& common, const RunOptions& run) {
  const ValidatedRun v = validate_run_config(common, run);
  if (run.out_dir.empty())
    throw std::invalid_argument("run requires --out <directory>");

  const DomainTable domains = common.domains();
  const Evaluator evaluator(FixedParams{}, common.materials());
  const FitnessParams fp{common.cr};
  const Objective objective = make_bridge_objective(evaluator, fp);

  fs::create_directories(run.out_dir);

  RunFunction run_one;
  if (v.ga) {
    run_one = [&, cfg = *v.ga](std::uint64_t seed) mutable {
      GAConfig c = cfg;
      c.seed = seed;
      return run_ga(domains, c, objective);
    };
  } else {
    const std::string snap_dir =
        (fs::path(run.out_dir) / "snapshots").string();
    if (run.snapshot_every > 0) fs::create_directories(snap_dir);
    run_one = [&, cfg = *v.cmaes, snap_dir](std::uint64_t seed) mutable {
      CmaEsConfig c = cfg;
      c.seed = seed;
      SnapshotSink sink = nullptr;
      if (run.snapshot_every > 0) {
        sink = [snap_dir, seed](long gen, const std::string& json) {
          std::ofstream out(fs::path(snap_dir) /
                                (std::to_string(seed) + "_gen" +
                                 std::to_string(gen) + ".json"),
                            std::ios::binary);
          out << json;
        };
      }
      return run_cmaes(domains, c, objective, run.snapshot_every, sink);
    };
  }

  ExperimentOptions opts;
  opts.n_runs = run.runs;
  opts.base_seed = run.seed;
  opts.threads = run.threads;
  const std::vector<RunLog> logs = run_experiment(run_one, opts);

  for (const RunLog& log : logs) persist_run(run.out_dir, log);
  const ReferenceDesign ref = ReferenceDesign::standard(evaluator);
  const ExperimentSummary summary =
      summarize(run.algo, run.seed, logs, ref);
  persist_summary(run.out_dir, summary);

  std::cout << "wrote " << logs.size() << " run(s) to " << run.out_dir
            << "\n";
  std::cout << run.algo << ": mean fitness "
            << format_double(summary.mean_fitness) << ", mean cost "
            << format_double(summary.mean_cost) << " k EUR, mean s "
            << format_double(summary.mean_s) << ", improvement rate "
            << summary.improvement.numerator << "/"
            << summary.improvement.denominator << "\n";
  return kExitOk;
}

int cmd_stats(const CommonOptions& common, const std::string& dir,
              int skip_first) {
  const LoadedExperiment exp = load_experiment_dir(dir);
  const Evaluator evaluator(FixedParams{}, common.materials());
  const ReferenceDesign ref = ReferenceDesign::standard(evaluator);
  const ExperimentSummary summary = summarize(exp.algorithm, 0, exp.logs, ref);
  persist_summary(dir, summary);

  {
    std::ofstream curves(fs::path(dir) / "mean_curve.csv", std::ios::binary);
    if (!curves) throw std::runtime_error("cannot write mean_curve.csv");
    write_mean_curves_csv(curves, exp.logs, skip_first);
  }
  {
    std::ofstream finals(fs::path(dir) / "finals.csv", std::ios::binary);
    if (!finals) throw std::runtime_error("cannot write finals.csv");
    write_finals_csv(finals, exp.logs);
  }
  std::cout << summary_json(summary);
  return kExitOk;
}

int cmd_compare(const CommonOptions& common, const std::string& dir_a,
                const std::string& dir_b, const std::string& json_out) {
  const LoadedExperiment a = load_experiment_dir(dir_a);
  const LoadedExperiment b = load_experiment_dir(dir_b);
  const Evaluator evaluator(FixedParams{}, common.materials());
  const ReferenceDesign ref = ReferenceDesign::standard(evaluator);
  const ComparisonReport report = compare_experiments(a, b, ref);
  std::cout << comparison_text(report);
  if (!json_out.empty()) {
    std::ofstream out(json_out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + json_out);
    out << comparison_json(report);
  }
  return kExitOk;
}

int cmd_export_geometry(const CommonOptions& common,
                        const std::vector<std::string>& genome_paths,
                        const std::string& format, const std::string& out) {
  const DomainTable domains = common.domains();
  const Evaluator evaluator(FixedParams{}, common.materials());

  std::vector<BridgeGeometry> geometries;
  std::vector<BridgeModel> models;
  for (const std::string& path : genome_paths) {
    const RunLog entry = read_best_genome_file(path);
    if (!is_within_domain(domains, entry.best_genome)) {
      std::ostringstream os;
      os << "genome " << path << " is out of domain:";
      for (int i = 0; i < kGeneCount; ++i) {
        const double x = entry.best_genome[i];
        if (x < domains.lower(i) || x > domains.upper(i))
          os << "\n  gene " << i << " (" << domains.gene(i).name << ") = "
             << format_double(x) << ", domain [" << format_double(domains.lower(i))
             << ", " << format_double(domains.upper(i)) << "]";
      }
      throw std::invalid_argument(os.str());
    }
    const BridgeGeometry g = decode(entry.best_genome, evaluator.fixed(),
                                    evaluator.scales());
    geometries.push_back(g);
    models.push_back(evaluator.build_model(g));
  }

  std::string payload;
  if (format == "svg") payload = geometry_svg(geometries);
  else if (format == "csv") payload = geometry_csv(models);
  else throw std::invalid_argument("--format must be svg or csv");

  std::ofstream os(out, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << payload;
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cable-stayed footbridge design optimization workbench"};
  app.require_subcommand(1);

  CommonOptions common;
  RunOptions run;
  std::string stats_dir, dir_a, dir_b, json_out;
  int skip_first = 0;
  std::vector<std::string> genome_paths;
  std::string format = "svg", export_out;

  CLI::App* c_run = app.add_subcommand("run", "Run seeded optimization runs");
  add_common_flags(c_run, common);
  add_run_flags(c_run, run);

  CLI::App* c_validate = app.add_subcommand(
      "validate-config", "Validate a run configuration without running");
  add_common_flags(c_validate, common);
  add_run_flags(c_validate, run);

  CLI::App* c_stats = app.add_subcommand(
      "stats", "Summary statistics and plot data for an experiment directory");
  add_common_flags(c_stats, common);
  c_stats->add_option("dir", stats_dir, "Experiment directory")->required();
  c_stats->add_option("--skip-first", skip_first,
                      "Skip the first N generations in curve exports");

  CLI::App* c_compare =
      app.add_subcommand("compare", "Compare two experiment directories");
  add_common_flags(c_compare, common);
  c_compare->add_option("dir_a", dir_a, "First experiment directory")
      ->required();
  c_compare->add_option("dir_b", dir_b, "Second experiment directory")
      ->required();
  c_compare->add_option("--json", json_out, "Also write the report as JSON");

  CLI::App* c_export = app.add_subcommand(
      "export-geometry", "Render decoded designs as SVG or CSV");
  add_common_flags(c_export, common);
  c_export->add_option("genomes", genome_paths, "Genome JSON file(s)")
      ->required();
  c_export->add_option("--format", format, "svg or csv");
  c_export->add_option("--out", export_out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (c_run->parsed()) return cmd_run(common, run);
    if (c_validate->parsed()) {
      validate_run_config(common, run);
      std::cout << "configuration ok\n";
      return kExitOk;
    }
    if (c_stats->parsed()) return cmd_stats(common, stats_dir, skip_first);
    if (c_compare->parsed()) return cmd_compare(common, dir_a, dir_b, json_out);
    if (c_export->parsed())
      return cmd_export_geometry(common, genome_paths, format, export_out);
  } catch (const IncompleteData& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIncomplete;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}
