#include "csb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "csb/fitness.hpp"

namespace fs = std::filesystem;

namespace csb {

const DesignVector& ReferenceDesign::standard_genome() {
  // Frozen output of a short seeded optimization run at the default
  // settings (see README); feasible under the standard evaluator with a
  // cost the full-budget runs can still undercut.
  static const DesignVector genome{{
      6.0886739405164727,
      0.92763239716581858,
      0.88491747905889806,
      1.2845799474877682,
      0.69999999999999996,
      1.8652765802638986,
      1.6947880640735822,
      0.36054661046119985,
      0.45453806697343691,
      586.19469985712817,
      935.33487109293321,
      723.84707192645192,
      247.38944586018903,
      0.10000000000000001,
      29.156964976690283,
      1.2162355954277078,
      1.2726263503559092,
      10.957682644676135,
      9.8519044224844681,
      1.6925598669204533,
      2.3340893684431743,
      5.9268559258833733,
  }};
  return genome;
}

ReferenceDesign ReferenceDesign::standard(const Evaluator& evaluator) {
  ReferenceDesign ref;
  ref.genome = standard_genome();
  const EvaluationResult r = evaluator.evaluate(ref.genome);
  ref.cost_keur = r.cost_keur;
  ref.s_max = r.s_max;
  return ref;
}

ImprovementRate improvement_rate(std::span<const RunLog> logs,
                                 const ReferenceDesign& reference) {
  ImprovementRate rate;
  rate.denominator = static_cast<int>(logs.size());
  for (const RunLog& log : logs)
    if (log.best.cost < reference.cost_keur && log.best.s <= 1.0)
      ++rate.numerator;
  rate.value = rate.denominator == 0
                   ? 0.0
                   : static_cast<double>(rate.numerator) / rate.denominator;
  return rate;
}

std::uint64_t seed_for_run(std::uint64_t base_seed, int run_index) {
  return base_seed * 1000 + static_cast<std::uint64_t>(run_index);
}

ExperimentSummary summarize(const std::string& algorithm,
                            std::uint64_t base_seed,
                            std::span<const RunLog> logs,
                            const ReferenceDesign& reference) {
  if (logs.empty()) throw IncompleteData("summarize: no runs");
  ExperimentSummary s;
  s.algorithm = algorithm;
  s.base_seed = base_seed;
  s.n_runs = static_cast<int>(logs.size());

  std::vector<double> f, c, sv;
  for (const RunLog& log : logs) {
    s.finals.push_back({log.seed, log.best.fitness, log.best.cost, log.best.s});
    f.push_back(log.best.fitness);
    c.push_back(log.best.cost);
    sv.push_back(log.best.s);
  }
  s.mean_fitness = stats::mean(f);
  s.std_fitness = stats::sample_stddev(f);
  s.mean_cost = stats::mean(c);
  s.std_cost = stats::sample_stddev(c);
  s.mean_s = stats::mean(sv);
  s.std_s = stats::sample_stddev(sv);
  s.improvement = improvement_rate(logs, reference);
  s.reference_cost_keur = reference.cost_keur;
  s.reference_s_max = reference.s_max;
  return s;
}

namespace {

nlohmann::json summary_to_json(const ExperimentSummary& s) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["algorithm"] = s.algorithm;
  j["base_seed"] = s.base_seed;
  j["n_runs"] = s.n_runs;
  j["mean_fitness"] = s.mean_fitness;
  j["std_fitness"] = s.std_fitness;
  j["mean_cost_keur"] = s.mean_cost;
  j["std_cost_keur"] = s.std_cost;
  j["mean_s_max"] = s.mean_s;
  j["std_s_max"] = s.std_s;
  j["improvement_rate"] = {{"numerator", s.improvement.numerator},
                           {"denominator", s.improvement.denominator},
                           {"value", s.improvement.value}};
  j["reference"] = {{"cost_keur", s.reference_cost_keur},
                    {"s_max", s.reference_s_max},
                    {"published_cost_keur", ReferenceDesign{}.paper_cost_keur},
                    {"published_s_max", ReferenceDesign{}.paper_s_max}};
  j["finals"] = nlohmann::json::array();
  for (const auto& fin : s.finals)
    j["finals"].push_back({{"seed", fin.seed},
                           {"fitness", fin.fitness},
                           {"cost_keur", fin.cost},
                           {"s_max", fin.s}});

  // Normality diagnostic only; nothing downstream gates on it.
  auto diag = nlohmann::json::object();
  auto add_diag = [&](const char* name, std::vector<double> xs) {
    try {
      const auto r = stats::shapiro_wilk(std::move(xs));
      diag[name] = {{"w", r.w}, {"p", r.p_value}};
    } catch (const std::invalid_argument&) {
      diag[name] = nullptr;
    }
  };
  std::vector<double> f, c, sv;
  for (const auto& fin : s.finals) {
    f.push_back(fin.fitness);
    c.push_back(fin.cost);
    sv.push_back(fin.s);
  }
  add_diag("fitness", f);
  add_diag("cost", c);
  add_diag("s_max", sv);
  j["shapiro_wilk"] = diag;
  return j;
}

}  // namespace

std::string summary_json(const ExperimentSummary& s) {
  return summary_to_json(s).dump(2) + "\n";
}

std::vector<RunLog> run_experiment(const RunFunction& run_one,
                                   const ExperimentOptions& opts) {
  if (opts.n_runs < 1) throw std::invalid_argument("run_experiment: n_runs < 1");
  std::vector<RunLog> logs(static_cast<std::size_t>(opts.n_runs));

  int workers = opts.threads > 0
                    ? opts.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, opts.n_runs));

  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < opts.n_runs; i = next.fetch_add(1))
          logs[static_cast<std::size_t>(i)] =
              run_one(seed_for_run(opts.base_seed, i));
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return logs;
}

void persist_run(const std::string& out_dir, const RunLog& log) {
  const fs::path base(out_dir);
  fs::create_directories(base / "runs" / log.algorithm);
  fs::create_directories(base / "best");
  const std::string seed = std::to_string(log.seed);
  write_run_csv_file((base / "runs" / log.algorithm / (seed + ".csv")).string(),
                     log);
  write_best_genome_file((base / "best" / (seed + ".json")).string(), log);
}

void persist_summary(const std::string& out_dir, const ExperimentSummary& s) {
  std::ofstream out(fs::path(out_dir) / "summary.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write summary in " + out_dir);
  out << summary_json(s);
}

LoadedExperiment load_experiment_dir(const std::string& dir) {
  const fs::path runs = fs::path(dir) / "runs";
  if (!fs::is_directory(runs))
    throw IncompleteData("no runs/ directory under " + dir);

  std::vector<fs::path> algo_dirs;
  for (const auto& e : fs::directory_iterator(runs))
    if (e.is_directory()) algo_dirs.push_back(e.path());
  if (algo_dirs.empty()) throw IncompleteData("no algorithm runs under " + dir);
  if (algo_dirs.size() > 1)
    throw IncompleteData("expected a single algorithm under " + dir);

  LoadedExperiment exp;
  exp.algorithm = algo_dirs.front().filename().string();

  std::vector<std::uint64_t> seeds;
  for (const auto& e : fs::directory_iterator(algo_dirs.front())) {
    if (e.path().extension() != ".csv") continue;
    seeds.push_back(std::stoull(e.path().stem().string()));
  }
  if (seeds.empty()) throw IncompleteData("no run logs under " + dir);
  std::sort(seeds.begin(), seeds.end());

  for (std::uint64_t seed : seeds) {
    const fs::path csv =
        algo_dirs.front() / (std::to_string(seed) + ".csv");
    const fs::path genome =
        fs::path(dir) / "best" / (std::to_string(seed) + ".json");
    if (!fs::exists(genome))
      throw IncompleteData("missing best genome for seed " +
                           std::to_string(seed) + " under " + dir);
    RunLog log = read_run_csv_file(csv.string(), exp.algorithm, seed);
    const RunLog best = read_best_genome_file(genome.string());
    log.best_genome = best.best_genome;
    log.best = best.best;
    exp.logs.push_back(std::move(log));
  }
  return exp;
}

ComparisonReport compare_experiments(const LoadedExperiment& a,
                                     const LoadedExperiment& b,
                                     const ReferenceDesign& reference) {
  ComparisonReport r;
  r.a = summarize(a.algorithm, 0, a.logs, reference);
  r.b = summarize(b.algorithm, 0, b.logs, reference);

  auto metric_values = [](const LoadedExperiment& e, int which) {
    std::vector<double> out;
    for (const RunLog& log : e.logs)
      out.push_back(which == 0   ? log.best.fitness
                    : which == 1 ? log.best.cost
                                 : log.best.s);
    return out;
  };
  const char* names[3] = {"fitness", "cost", "s_max"};
  for (int m = 0; m < 3; ++m) {
    const auto va = metric_values(a, m);
    const auto vb = metric_values(b, m);
    const auto mw = stats::mann_whitney_u(va, vb);
    r.tests.push_back({names[m], mw.u, mw.p_two_sided, mw.effect_size});
  }

  auto best_of = [](const LoadedExperiment& e) {
    const RunLog* best = &e.logs.front();
    for (const RunLog& log : e.logs)
      if (log.best.fitness > best->best.fitness) best = &log;
    return best;
  };
  const RunLog* ba = best_of(a);
  const RunLog* bb = best_of(b);
  r.best_cost_a = ba->best.cost;
  r.best_s_a = ba->best.s;
  r.best_cost_b = bb->best.cost;
  r.best_s_b = bb->best.s;
  r.reference_cost = reference.cost_keur;
  r.reference_s = reference.s_max;
  return r;
}

std::string comparison_json(const ComparisonReport& r) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["a"] = summary_to_json(r.a);
  j["b"] = summary_to_json(r.b);
  j["tests"] = nlohmann::json::array();
  for (const MetricTest& t : r.tests)
    j["tests"].push_back({{"metric", t.metric},
                          {"u", t.u},
                          {"p_two_sided", t.p},
                          {"effect_size", t.effect_size}});
  j["best"] = {{"reference", {{"cost_keur", r.reference_cost},
                              {"s_max", r.reference_s}}},
               {"a",
                {{"cost_keur", r.best_cost_a},
                 {"s_max", r.best_s_a},
                 {"cost_diff_vs_reference", r.reference_cost - r.best_cost_a},
                 {"s_diff_vs_reference", r.reference_s - r.best_s_a}}},
               {"b",
                {{"cost_keur", r.best_cost_b},
                 {"s_max", r.best_s_b},
                 {"cost_diff_vs_reference", r.reference_cost - r.best_cost_b},
                 {"s_diff_vs_reference", r.reference_s - r.best_s_b}}}};
  return j.dump(2) + "\n";
}

std::string comparison_text(const ComparisonReport& r) {
  std::ostringstream os;
  auto fmt = [](double x) { return format_double(x); };
  os << "== Summary (mean +/- std over runs) ==\n";
  for (const ExperimentSummary* s : {&r.a, &r.b}) {
    os << s->algorithm << ": fitness " << fmt(s->mean_fitness) << " +/- "
       << fmt(s->std_fitness) << ", cost " << fmt(s->mean_cost) << " +/- "
       << fmt(s->std_cost) << " k EUR, s " << fmt(s->mean_s) << " +/- "
       << fmt(s->std_s) << ", improvement rate " << s->improvement.numerator
       << "/" << s->improvement.denominator << "\n";
  }
  os << "== Rank tests (" << r.a.algorithm << " vs " << r.b.algorithm
     << ") ==\n";
  for (const MetricTest& t : r.tests)
    os << t.metric << ": U = " << fmt(t.u) << ", p = " << fmt(t.p)
       << ", effect size = " << fmt(t.effect_size) << "\n";
  os << "== Best solutions vs reference (cost " << fmt(r.reference_cost)
     << " k EUR, s " << fmt(r.reference_s) << ") ==\n";
  os << r.a.algorithm << ": cost " << fmt(r.best_cost_a) << " (diff "
     << fmt(r.reference_cost - r.best_cost_a) << "), s " << fmt(r.best_s_a)
     << "\n";
  os << r.b.algorithm << ": cost " << fmt(r.best_cost_b) << " (diff "
     << fmt(r.reference_cost - r.best_cost_b) << "), s " << fmt(r.best_s_b)
     << "\n";
  return os.str();
}

void write_mean_curves_csv(std::ostream& os, std::span<const RunLog> logs,
                           int skip_first) {
  if (logs.empty()) throw IncompleteData("mean curves: no runs");
  const std::size_t gens = logs.front().records.size();
  for (const RunLog& log : logs)
    if (log.records.size() != gens)
      throw IncompleteData("mean curves: runs have differing lengths");

  os << "generation,mean_best_fitness,mean_best_cost,mean_best_s\n";
  for (std::size_t g = 0; g < gens; ++g) {
    if (logs.front().records[g].generation < skip_first) continue;
    double f = 0.0, c = 0.0, s = 0.0;
    for (const RunLog& log : logs) {
      f += log.records[g].best_fitness;
      c += log.records[g].best_cost;
      s += log.records[g].best_s;
    }
    const double n = static_cast<double>(logs.size());
    os << logs.front().records[g].generation << ',' << format_double(f / n)
       << ',' << format_double(c / n) << ',' << format_double(s / n) << '\n';
  }
}

void write_finals_csv(std::ostream& os, std::span<const RunLog> logs) {
  os << "seed,fitness,cost_keur,s_max\n";
  for (const RunLog& log : logs)
    os << log.seed << ',' << format_double(log.best.fitness) << ','
       << format_double(log.best.cost) << ',' << format_double(log.best.s)
       << '\n';
}

Objective make_bridge_objective(const Evaluator& evaluator,
                                const FitnessParams& params) {
  return [&evaluator, params](const DesignVector& v) {
    const EvaluationResult r = evaluator.evaluate(v);
    Evaluation e;
    e.cost = r.cost_keur;
    e.s = r.s_max;
    e.fitness = fitness(r.cost_keur, r.s_max, params);
    return e;
  };
}

}  // namespace csb
