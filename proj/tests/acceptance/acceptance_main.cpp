// Acceptance suite: one pass/fail line per criterion, exit code = number
// of failed hard criteria. The reduced-scale protocol criterion is soft:
// its failure is reported but does not fail the binary.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "csb/cmaes.hpp"
#include "csb/evaluator.hpp"
#include "csb/fitness.hpp"
#include "csb/ga.hpp"
#include "csb/harness.hpp"
#include "csb/stats.hpp"

using namespace csb;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_hard_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail,
            bool soft = false) {
  const char* tag = ok ? "[PASS]" : (soft ? "[SOFT-FAIL]" : "[FAIL]");
  std::printf("%s %s — %s\n", tag, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok && !soft) ++g_hard_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------
// 1. Fitness branch suite.
void criterion_fitness_branches() {
  Rng rng(2021);
  bool partition_ok = true;
  for (int k = 0; k < 100000 && partition_ok; ++k) {
    const double cost = rng.uniform(1.0, 450.0);
    const double s = rng.uniform(0.0, 6.0);
    const double f = fitness(cost, s);
    if (cost > 150.0) partition_ok = f > 0.0 && f < 1.0;
    else if (cost < 150.0 && s > 1.0) partition_ok = f > 1.0 && f <= 2.0;
    else if (cost < 150.0) partition_ok = f > 2.0;
  }
  const bool ex1 = std::abs(fitness(300.0, 3.0) - 0.5) <= 1e-12;
  const bool ex2 = std::abs(fitness(100.0, 2.0) - 1.5) <= 1e-12;
  const double baseline = 2.0 - (1.0 - 0.9962) + 150.0 / 91.354;
  const bool ex3 = std::abs(fitness(91.354, 0.9962) - baseline) <= 1e-12;
  report("fitness-branch-suite", partition_ok && ex1 && ex2 && ex3,
         "1e5 random (cost, s) pairs partition into (0,1) / (1,2] / (2,inf); "
         "worked examples match to 1e-12");
}

// ---------------------------------------------------------------------
// 2. Budget parity.
void criterion_budget_parity() {
  const DomainTable dom = DomainTable::standard();
  long ga_calls = 0;
  const Objective ga_obj = [&ga_calls](const DesignVector& v) {
    ++ga_calls;
    return Evaluation{-v[1] * v[1], 1.0, 0.0};
  };
  GAConfig ga_cfg;  // 10 x 40000 defaults
  ga_cfg.seed = 1;
  const RunLog ga_log = run_ga(dom, ga_cfg, ga_obj);

  long es_calls = 0;
  const Objective es_obj = [&es_calls](const DesignVector& v) {
    ++es_calls;
    return Evaluation{-v[1] * v[1], 1.0, 0.0};
  };
  CmaEsConfig es_cfg;  // 50 x 8000 defaults
  es_cfg.seed = 1;
  const RunLog es_log = run_cmaes(dom, es_cfg, es_obj);

  const bool ok = ga_calls == 400000 &&
                  ga_log.records.back().evals_used == 400000 &&
                  es_calls == 400000 &&
                  es_log.records.back().evals_used == 400000;
  std::ostringstream os;
  os << "GA 10x40000 consumed " << ga_calls << " evaluations, CMA-ES 50x8000 "
     << "consumed " << es_calls << " (counters and RunLog agree)";
  report("budget-parity", ok, os.str());
}

// ---------------------------------------------------------------------
// 3. CMA-ES correctness oracles.
double rosenbrock(const Eigen::VectorXd& x) {
  double f = 0.0;
  for (int i = 0; i + 1 < x.size(); ++i) {
    const double a = x(i + 1) - x(i) * x(i);
    const double b = 1.0 - x(i);
    f += 100.0 * a * a + b * b;
  }
  return f;
}

void criterion_cmaes_oracle() {
  // Sphere, 10-D, f <= 1e-10 within 1e4 evaluations.
  const auto t0 = Clock::now();
  CmaEsConfig cfg;
  cfg.mu = 25;
  cfg.lambda = 50;
  cfg.sigma0 = 0.3;
  cfg.seed = 4;
  cfg.initial_mean_norm = Eigen::VectorXd::Constant(10, 0.55);  // x = 0.5
  CmaEs sphere_es(BoxDomain::cube(10, -5.0, 5.0), cfg);
  double sphere_best = 1e300;
  int sphere_evals = 0;
  while (sphere_evals < 10000 && sphere_best > 1e-10) {
    const auto cands = sphere_es.ask();
    std::vector<double> fit;
    for (const auto& x : cands) {
      const double f = x.squaredNorm();
      sphere_best = std::min(sphere_best, f);
      fit.push_back(-f);
      ++sphere_evals;
    }
    sphere_es.tell(cands, fit);
  }
  const double sphere_time = seconds_since(t0);

  // Rosenbrock, 22-D in the unit box, f <= 1e-6 within the 400k budget.
  CmaEsConfig rcfg;
  rcfg.mu = 25;
  rcfg.lambda = 50;
  rcfg.sigma0 = 0.3;
  rcfg.seed = 1;
  rcfg.initial_mean_norm = Eigen::VectorXd::Constant(22, 0.5);
  CmaEs rosen_es(BoxDomain::cube(22, -2.048, 2.048), rcfg);
  double rosen_best = 1e300;
  long rosen_evals = 0;
  while (rosen_evals < 400000 && rosen_best > 1e-6) {
    const auto cands = rosen_es.ask();
    std::vector<double> fit;
    for (const auto& x : cands) {
      const double f = rosenbrock(x);
      rosen_best = std::min(rosen_best, f);
      fit.push_back(-f);
      ++rosen_evals;
    }
    rosen_es.tell(cands, fit);
  }

  // Covariance invariants over 1e4 random updates.
  CmaEsConfig pcfg;
  pcfg.mu = 25;
  pcfg.lambda = 50;
  pcfg.seed = 17;
  CmaEs psd_es(BoxDomain::cube(22, 0.0, 1.0), pcfg);
  Rng rng(404);
  bool psd_ok = true;
  for (int g = 0; g < 10000 && psd_ok; ++g) {
    const auto cands = psd_es.ask();
    std::vector<double> fit;
    for (std::size_t i = 0; i < cands.size(); ++i) fit.push_back(rng.uniform01());
    psd_es.tell(cands, fit);
    const Eigen::MatrixXd& c = psd_es.state().C;
    psd_ok = (c - c.transpose()).cwiseAbs().maxCoeff() <= 1e-12 &&
             psd_es.state().eigen_scale.minCoeff() > 0.0;
    if (g % 1000 == 0 && psd_ok) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
      psd_ok = eig.eigenvalues().minCoeff() >=
               -1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff());
    }
  }

  const bool ok = sphere_best <= 1e-10 && sphere_time < 10.0 &&
                  rosen_best <= 1e-6 && psd_ok;
  std::ostringstream os;
  os << "sphere-10D reached " << format_double(sphere_best) << " in "
     << sphere_evals << " evals (" << format_double(sphere_time)
     << " s); rosenbrock-22D reached " << format_double(rosen_best) << " in "
     << rosen_evals << " evals; covariance symmetric PSD over 1e4 updates";
  report("cmaes-correctness-oracle", ok, os.str());
}

// ---------------------------------------------------------------------
// 4. GA operator suite.
void criterion_ga_operators() {
  const DomainTable dom = DomainTable::standard();
  Rng rng(555);

  bool conservation_ok = true;
  for (int k = 0; k < 10000 && conservation_ok; ++k) {
    const DesignVector a = sample_uniform(dom, rng);
    const DesignVector b = sample_uniform(dom, rng);
    const auto [c1, c2] = uniform_crossover(a, b, 0.5, rng);
    for (int i = 0; i < kGeneCount && conservation_ok; ++i)
      conservation_ok = (c1[i] == a[i] && c2[i] == b[i]) ||
                        (c1[i] == b[i] && c2[i] == a[i]);
  }

  // Mutation at rate 1 vs fresh uniform sampling, KS per gene.
  bool ks_ok = true;
  double worst_p = 1.0;
  const DesignVector base = sample_uniform(dom, rng);
  for (int gene = 0; gene < kGeneCount && ks_ok; ++gene) {
    std::vector<double> samples;
    samples.reserve(10000);
    for (int k = 0; k < 10000; ++k)
      samples.push_back(mutate(base, dom, 1.0, rng)[gene]);
    const double lo = dom.lower(gene), hi = dom.upper(gene);
    const auto ks = stats::kolmogorov_smirnov(
        samples, [lo, hi](double x) { return (x - lo) / (hi - lo); });
    worst_p = std::min(worst_p, ks.p_value);
    ks_ok = ks.p_value > 0.01;
  }

  // Tournament probability for the two-individual fixture.
  const std::vector<double> two{1.0, 2.0};
  int worse = 0;
  for (int k = 0; k < 100000; ++k)
    if (tournament_select(two, 3, rng) == 0) ++worse;
  const double p_worse = worse / 100000.0;
  const bool tournament_ok = std::abs(p_worse - 0.125) <= 0.01;

  // Elitism monotonicity over full (reduced) runs on the real objective.
  const Evaluator ev;
  const Objective obj = make_bridge_objective(ev, FitnessParams{});
  bool monotone_ok = true;
  for (std::uint64_t seed : {1ull, 2ull}) {
    GAConfig cfg;
    cfg.generations = 150;
    cfg.seed = seed;
    const RunLog log = run_ga(dom, cfg, obj);
    for (std::size_t g = 0; g + 1 < log.records.size() && monotone_ok; ++g)
      monotone_ok = log.records[g + 1].best_fitness >= log.records[g].best_fitness;
  }

  const bool ok = conservation_ok && ks_ok && tournament_ok && monotone_ok;
  std::ostringstream os;
  os << "gene conservation over 1e4 crossovers; KS worst p = "
     << format_double(worst_p) << " (> 0.01) across 22 genes; P(worse) = "
     << format_double(p_worse) << " vs 0.125; elitism monotone over full runs";
  report("ga-operator-suite", ok, os.str());
}

// ---------------------------------------------------------------------
// 5. Evaluator physics suite.
void criterion_evaluator_physics() {
  const auto t0 = Clock::now();
  const Evaluator ev;
  const DomainTable dom = DomainTable::standard();
  Rng rng(909);

  int solved = 0, singular = 0;
  double worst_residual = 0.0;
  bool residual_ok = true;
  for (int k = 0; k < 1000; ++k) {
    const BridgeGeometry g =
        decode(sample_uniform(dom, rng), ev.fixed(), ev.scales());
    const BridgeModel bm = ev.build_model(g);
    const LoadSet cases[2] = {ev.loads_for(bm, g, LoadCase::dead),
                              ev.loads_for(bm, g, LoadCase::live)};
    for (const AnalysisResult& r : solve_static_cases(bm.model, cases)) {
      if (r.singular) {
        ++singular;
        continue;
      }
      ++solved;
      worst_residual = std::max(worst_residual, r.residual);
      residual_ok = residual_ok && r.residual <= 1e-8;
    }
  }

  // Beam deflection oracle.
  StructuralModel beam;
  const double L = 24.0, EI = 210e6 * 2.0e-3, P = 35.0;
  for (int i = 0; i <= 12; ++i) beam.nodes.push_back({L * i / 12.0, 0.0});
  for (int i = 0; i < 12; ++i)
    beam.beams.push_back({i, i + 1, 0.01, 2.0e-3, 210e6});
  beam.supports.push_back({0, true, true, false});
  beam.supports.push_back({12, false, true, false});
  LoadSet mid_load;
  mid_load.points.push_back({6, 0.0, -P, 0.0});
  const AnalysisResult beam_res = solve_static(beam, mid_load);
  const double expected = P * L * L * L / (48.0 * EI);
  const bool beam_ok =
      !beam_res.singular &&
      std::abs(-beam_res.displacements(3 * 6 + 1) - expected) / expected < 1e-6;

  // Reaction symmetry under dead load.
  bool symmetry_ok = true;
  for (int k = 0; k < 25 && symmetry_ok; ++k) {
    const BridgeGeometry g =
        decode(sample_uniform(dom, rng), ev.fixed(), ev.scales());
    const BridgeModel bm = ev.build_model(g);
    const AnalysisResult r =
        solve_static(bm.model, ev.loads_for(bm, g, LoadCase::dead));
    if (r.singular) continue;
    const double left = r.reactions(3 * bm.left_support_node + 1);
    const double right = r.reactions(3 * bm.right_support_node + 1);
    symmetry_ok = std::abs(left - right) / std::max(std::abs(left), 1e-30) <= 1e-9;
  }

  // Monotonicity in the deck-section gene on 100 random base designs.
  int mono_checked = 0;
  bool mono_ok = true;
  for (int k = 0; k < 140 && mono_checked < 100; ++k) {
    DesignVector v = sample_uniform(dom, rng);
    v[14] = 20.0;
    const EvaluationResult lo = ev.evaluate(v);
    v[14] = 45.0;
    const EvaluationResult hi = ev.evaluate(v);
    if (lo.analysis_singular || hi.analysis_singular) continue;
    ++mono_checked;
    mono_ok = mono_ok && hi.ratio("deck_stress") < lo.ratio("deck_stress") &&
              hi.cost_keur > lo.cost_keur;
  }
  const double elapsed = seconds_since(t0);

  const bool ok = residual_ok && solved >= 1900 && beam_ok && symmetry_ok &&
                  mono_ok && mono_checked >= 100 && elapsed < 60.0;
  std::ostringstream os;
  os << "equilibrium residual <= 1e-8 on " << solved
     << " solves over 1000 random designs (worst "
     << format_double(worst_residual) << ", " << singular
     << " singular-sentinel); beam PL^3/48EI within 1e-6; reactions symmetric "
        "to 1e-9; DV14 monotonicity on "
     << mono_checked << " designs; " << format_double(elapsed) << " s";
  report("evaluator-physics-suite", ok, os.str());
}

// ---------------------------------------------------------------------
// 6. Statistics oracle.
double pair_count_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a)
    for (double y : b) {
      if (x > y) u += 1.0;
      else if (x == y) u += 0.5;
    }
  return u;
}

void enumerate_splits(const std::vector<double>& all, std::size_t start,
                      std::vector<double>& a, std::size_t na,
                      std::vector<double>& b,
                      const std::function<void(const std::vector<double>&,
                                               const std::vector<double>&)>& fn) {
  if (a.size() == na) {
    std::vector<double> rest = b;
    for (std::size_t i = start; i < all.size(); ++i) rest.push_back(all[i]);
    fn(a, rest);
    return;
  }
  if (start == all.size()) return;
  a.push_back(all[start]);
  enumerate_splits(all, start + 1, a, na, b, fn);
  a.pop_back();
  if (all.size() - start > na - a.size()) {
    b.push_back(all[start]);
    enumerate_splits(all, start + 1, a, na, b, fn);
    b.pop_back();
  }
}

void criterion_stats_oracle() {
  Rng rng(777);
  bool exact_ok = true;
  int cases = 0;
  for (int na = 1; na <= 11 && exact_ok; ++na) {
    for (int nb = 1; na + nb <= 12 && nb <= 11 && exact_ok; ++nb) {
      for (int rep = 0; rep < 4 && exact_ok; ++rep) {
        std::vector<double> a, b;
        for (int i = 0; i < na; ++i)
          a.push_back(static_cast<double>(rng.uniform_int(5)));
        for (int i = 0; i < nb; ++i)
          b.push_back(static_cast<double>(rng.uniform_int(5)));
        const auto r = stats::mann_whitney_u(a, b);
        if (r.u != pair_count_u(a, b)) {
          exact_ok = false;
          break;
        }
        const double nm = static_cast<double>(na) * nb;
        const double observed = std::abs(pair_count_u(a, b) - nm / 2.0);
        int total = 0, extreme = 0;
        std::vector<double> all = a;
        all.insert(all.end(), b.begin(), b.end());
        std::vector<double> wa, wb;
        enumerate_splits(all, 0, wa, a.size(), wb,
                         [&](const std::vector<double>& xa,
                             const std::vector<double>& xb) {
                           ++total;
                           if (std::abs(pair_count_u(xa, xb) - nm / 2.0) >=
                               observed - 1e-12)
                             ++extreme;
                         });
        exact_ok = std::abs(r.p_two_sided -
                            static_cast<double>(extreme) / total) <= 1e-12;
        ++cases;
      }
    }
  }

  bool identity_ok = true;
  for (int k = 0; k < 1000 && identity_ok; ++k) {
    const int na = 1 + rng.uniform_int(25);
    const int nb = 1 + rng.uniform_int(25);
    std::vector<double> a, b;
    for (int i = 0; i < na; ++i)
      a.push_back(static_cast<double>(rng.uniform_int(10)));
    for (int i = 0; i < nb; ++i)
      b.push_back(static_cast<double>(rng.uniform_int(10)));
    const auto ab = stats::mann_whitney_u(a, b);
    const auto ba = stats::mann_whitney_u(b, a);
    identity_ok = 2.0 * ab.u + 2.0 * ba.u == 2.0 * na * nb &&
                  std::abs(ab.effect_size + ba.effect_size) <= 1e-12;
  }

  std::ostringstream os;
  os << "exact p matches brute-force enumeration on " << cases
     << " tied samples across all n+m <= 12; U + U' = nm and rank-biserial "
        "antisymmetry over 1e3 random samples";
  report("statistics-oracle", exact_ok && identity_ok, os.str());
}

// ---------------------------------------------------------------------
// 7 & 8. Reduced-scale protocol plus end-to-end determinism.
struct ExperimentArtifacts {
  fs::path dir;
  std::vector<RunLog> ga_logs, es_logs;
};

ExperimentArtifacts run_reduced_experiment(const fs::path& dir, int threads) {
  const DomainTable domains = DomainTable::standard();
  const Evaluator evaluator;
  const FitnessParams fp;
  const Objective objective = make_bridge_objective(evaluator, fp);

  ExperimentArtifacts art;
  art.dir = dir;
  fs::create_directories(dir / "ga");
  fs::create_directories(dir / "cmaes");

  ExperimentOptions opts;
  opts.n_runs = 10;
  opts.base_seed = 7;
  opts.threads = threads;

  art.ga_logs = run_experiment(
      [&](std::uint64_t seed) {
        GAConfig cfg;
        cfg.generations = 1000;  // 10 x 1000 = 10k evaluations per run
        cfg.seed = seed;
        return run_ga(domains, cfg, objective);
      },
      opts);
  art.es_logs = run_experiment(
      [&](std::uint64_t seed) {
        CmaEsConfig cfg;
        cfg.generations = 200;  // 50 x 200 = 10k evaluations per run
        cfg.seed = seed;
        return run_cmaes(domains, cfg, objective);
      },
      opts);

  const ReferenceDesign ref = ReferenceDesign::standard(evaluator);
  for (const RunLog& log : art.ga_logs) persist_run((dir / "ga").string(), log);
  for (const RunLog& log : art.es_logs)
    persist_run((dir / "cmaes").string(), log);
  persist_summary((dir / "ga").string(),
                  summarize("ga", opts.base_seed, art.ga_logs, ref));
  persist_summary((dir / "cmaes").string(),
                  summarize("cmaes", opts.base_seed, art.es_logs, ref));
  return art;
}

double median_cost(const std::vector<RunLog>& logs) {
  std::vector<double> costs;
  for (const RunLog& log : logs) costs.push_back(log.best.cost);
  std::sort(costs.begin(), costs.end());
  const std::size_t n = costs.size();
  return n % 2 == 1 ? costs[n / 2] : 0.5 * (costs[n / 2 - 1] + costs[n / 2]);
}

void criteria_protocol_and_determinism(const fs::path& work) {
  const auto t0 = Clock::now();
  const ExperimentArtifacts first = run_reduced_experiment(work / "exp1", 2);
  const double exp_seconds = seconds_since(t0);

  int ga_near_feasible = 0, es_near_feasible = 0;
  for (const RunLog& log : first.ga_logs)
    if (log.best.s <= 1.05) ++ga_near_feasible;
  for (const RunLog& log : first.es_logs)
    if (log.best.s <= 1.05) ++es_near_feasible;
  const double ga_median = median_cost(first.ga_logs);
  const double es_median = median_cost(first.es_logs);

  const bool protocol_ok = ga_near_feasible >= 8 && es_near_feasible >= 8 &&
                           es_median <= ga_median &&
                           exp_seconds < 1800.0;
  {
    std::ostringstream os;
    os << "10 runs x 10k evaluations per algorithm in "
       << format_double(exp_seconds) << " s: s_max <= 1.05 in "
       << ga_near_feasible << "/10 GA and " << es_near_feasible
       << "/10 CMA-ES runs; median cost CMA-ES "
       << format_double(es_median) << " vs GA " << format_double(ga_median)
       << " k EUR";
    report("reduced-scale-protocol", protocol_ok, os.str(), /*soft=*/true);
  }

  // Same base seed, different thread count: artifacts must be identical.
  run_reduced_experiment(work / "exp2", 1);
  bool identical = true;
  std::string first_diff;
  for (auto it = fs::recursive_directory_iterator(work / "exp1");
       it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_regular_file()) continue;
    const fs::path rel = fs::relative(it->path(), work / "exp1");
    const fs::path other = work / "exp2" / rel;
    std::ifstream fa(it->path(), std::ios::binary);
    std::ifstream fb(other, std::ios::binary);
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str() != sb.str()) {
      identical = false;
      first_diff = rel.string();
      break;
    }
  }
  std::ostringstream os;
  if (identical)
    os << "repeated experiment with the same base seed (and a different "
          "thread count) produced byte-identical artifacts";
  else
    os << "artifacts differ, first difference: " << first_diff;
  report("end-to-end-determinism", identical, os.str());
}

}  // namespace

int main() {
  const fs::path work =
      fs::temp_directory_path() /
      ("csb_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(work);

  criterion_fitness_branches();
  criterion_budget_parity();
  criterion_cmaes_oracle();
  criterion_ga_operators();
  criterion_evaluator_physics();
  criterion_stats_oracle();
  criteria_protocol_and_determinism(work);

  fs::remove_all(work);
  if (g_hard_failures == 0)
    std::printf("acceptance: all hard criteria passed\n");
  else
    std::printf("acceptance: %d hard criteria FAILED\n", g_hard_failures);
  return g_hard_failures;
}
