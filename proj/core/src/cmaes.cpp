#include "csb/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace csb {

BoxDomain BoxDomain::from(const DomainTable& domains) {
  BoxDomain b;
  b.lower.resize(kGeneCount);
  b.upper.resize(kGeneCount);
  for (int i = 0; i < kGeneCount; ++i) {
    b.lower(i) = domains.lower(i);
    b.upper(i) = domains.upper(i);
  }
  return b;
}

BoxDomain BoxDomain::cube(int n, double lo, double hi) {
  BoxDomain b;
  b.lower = Eigen::VectorXd::Constant(n, lo);
  b.upper = Eigen::VectorXd::Constant(n, hi);
  return b;
}

void CmaEsConfig::validate() const {
  if (lambda < 2) throw std::invalid_argument("cmaes: lambda must be >= 2");
  if (mu < 1 || mu > lambda)
    throw std::invalid_argument("cmaes: need 1 <= mu <= lambda");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("cmaes: sigma0 must be > 0");
  if (generations < 1)
    throw std::invalid_argument("cmaes: generations must be >= 1");
}

CmaEsConstants CmaEsConstants::defaults(int n, int mu, int lambda) {
  CmaEsConstants k;
  const double nd = static_cast<double>(n);

  k.weights.resize(mu);
  const double base = std::log((static_cast<double>(lambda) + 1.0) / 2.0);
  for (int i = 0; i < mu; ++i)
    k.weights(i) = std::max(base - std::log(static_cast<double>(i + 1)), 0.0);
  k.weights /= k.weights.sum();
  k.mu_eff = 1.0 / k.weights.squaredNorm();

  k.c_sigma = (k.mu_eff + 2.0) / (nd + k.mu_eff + 5.0);
  k.d_sigma = 1.0 +
              2.0 * std::max(0.0, std::sqrt((k.mu_eff - 1.0) / (nd + 1.0)) - 1.0) +
              k.c_sigma;
  k.c_c = (4.0 + k.mu_eff / nd) / (nd + 4.0 + 2.0 * k.mu_eff / nd);
  k.c1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + k.mu_eff);
  k.c_mu = std::min(1.0 - k.c1, 2.0 * (k.mu_eff - 2.0 + 1.0 / k.mu_eff) /
                                    ((nd + 2.0) * (nd + 2.0) + k.mu_eff));
  k.chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));
  k.eigen_refresh_interval = std::max(
      1, static_cast<int>(std::ceil(1.0 / (10.0 * nd * (k.c1 + k.c_mu)))));
  return k;
}

CmaEs::CmaEs(BoxDomain domain, CmaEsConfig cfg)
    : domain_(std::move(domain)), cfg_(cfg), rng_(cfg.seed) {
  cfg_.validate();
  const int n = domain_.dim();
  state_.constants = CmaEsConstants::defaults(n, cfg_.mu, cfg_.lambda);

  if (cfg_.initial_mean_norm) {
    if (cfg_.initial_mean_norm->size() != n)
      throw DimensionMismatch("cmaes: initial mean dimension mismatch");
    state_.mean = *cfg_.initial_mean_norm;
  } else {
    state_.mean.resize(n);
    for (int i = 0; i < n; ++i) state_.mean(i) = rng_.uniform01();
  }
  state_.sigma = cfg_.sigma0;
  state_.C = Eigen::MatrixXd::Identity(n, n);
  state_.p_sigma = Eigen::VectorXd::Zero(n);
  state_.p_c = Eigen::VectorXd::Zero(n);
  state_.eigen_basis = Eigen::MatrixXd::Identity(n, n);
  state_.eigen_scale = Eigen::VectorXd::Ones(n);
  state_.generations_since_eigen = 0;
  state_.generation = 0;
}

Eigen::VectorXd CmaEs::gene_from_norm(const Eigen::VectorXd& z) const {
  return domain_.lower.array() +
         z.array() * (domain_.upper - domain_.lower).array();
}

Eigen::VectorXd CmaEs::norm_from_gene(const Eigen::VectorXd& x) const {
  return (x - domain_.lower).array() /
         (domain_.upper - domain_.lower).array();
}

Eigen::VectorXd CmaEs::sample_raw() {
  const int n = domain_.dim();
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z(i) = rng_.normal();
  const Eigen::VectorXd y =
      state_.eigen_basis * (state_.eigen_scale.array() * z.array()).matrix();
  return gene_from_norm(state_.mean + state_.sigma * y);
}

std::vector<Eigen::VectorXd> CmaEs::ask() {
  std::vector<Eigen::VectorXd> out;
  out.reserve(static_cast<std::size_t>(cfg_.lambda));
  for (int k = 0; k < cfg_.lambda; ++k) {
    Eigen::VectorXd x = sample_raw();
    out.push_back(x.cwiseMax(domain_.lower).cwiseMin(domain_.upper));
  }
  return out;
}

void CmaEs::refresh_eigen() {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(state_.C);
  state_.eigen_basis = eig.eigenvectors();
  state_.eigen_scale =
      eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();
  state_.generations_since_eigen = 0;
}

void CmaEs::restart_from_mean() {
  const int n = domain_.dim();
  state_.sigma = cfg_.sigma0;
  state_.C = Eigen::MatrixXd::Identity(n, n);
  state_.p_sigma = Eigen::VectorXd::Zero(n);
  state_.p_c = Eigen::VectorXd::Zero(n);
  state_.restart_generations.push_back(state_.generation);
  refresh_eigen();
}

void CmaEs::tell(const std::vector<Eigen::VectorXd>& candidates,
                 const std::vector<double>& fitnesses) {
  const int n = domain_.dim();
  if (static_cast<int>(candidates.size()) != cfg_.lambda ||
      static_cast<int>(fitnesses.size()) != cfg_.lambda)
    throw DimensionMismatch("cmaes: tell expects lambda candidates/fitnesses");
  for (const auto& c : candidates)
    if (c.size() != n) throw DimensionMismatch("cmaes: candidate dimension");

  const CmaEsConstants& k = state_.constants;

  std::vector<int> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
    return fitnesses[static_cast<std::size_t>(l)] >
           fitnesses[static_cast<std::size_t>(r)];
  });

  const Eigen::VectorXd m_old = state_.mean;
  Eigen::VectorXd m_new = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < cfg_.mu; ++i)
    m_new +=
        k.weights(i) *
        norm_from_gene(candidates[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
  state_.mean = m_new;

  const Eigen::VectorXd y_w = (m_new - m_old) / state_.sigma;

  // C^(-1/2) from the cached eigendecomposition.
  const Eigen::VectorXd c_inv_sqrt_yw =
      state_.eigen_basis *
      (state_.eigen_basis.transpose() * y_w).cwiseQuotient(state_.eigen_scale);

  state_.p_sigma = (1.0 - k.c_sigma) * state_.p_sigma +
                   std::sqrt(k.c_sigma * (2.0 - k.c_sigma) * k.mu_eff) *
                       c_inv_sqrt_yw;
  const double ps_norm = state_.p_sigma.norm();

  const double expected =
      std::sqrt(1.0 - std::pow(1.0 - k.c_sigma,
                               2.0 * static_cast<double>(state_.generation + 1)));
  const bool h_sigma =
      ps_norm / expected < (1.4 + 2.0 / (n + 1.0)) * k.chi_n;

  state_.p_c = (1.0 - k.c_c) * state_.p_c +
               (h_sigma ? std::sqrt(k.c_c * (2.0 - k.c_c) * k.mu_eff) : 0.0) * y_w;

  Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < cfg_.mu; ++i) {
    const Eigen::VectorXd y =
        (norm_from_gene(candidates[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]) -
         m_old) /
        state_.sigma;
    rank_mu += k.weights(i) * y * y.transpose();
  }

  const double delta_h = h_sigma ? 0.0 : k.c_c * (2.0 - k.c_c);
  state_.C = (1.0 - k.c1 - k.c_mu) * state_.C +
             k.c1 * (state_.p_c * state_.p_c.transpose() + delta_h * state_.C) +
             k.c_mu * rank_mu;
  state_.C = 0.5 * (state_.C + state_.C.transpose().eval());

  state_.sigma *=
      std::exp(k.c_sigma / k.d_sigma * (ps_norm / k.chi_n - 1.0));

  ++state_.generation;
  ++state_.generations_since_eigen;
  if (state_.generations_since_eigen >= k.eigen_refresh_interval) {
    refresh_eigen();
    const double cond =
        state_.eigen_scale.maxCoeff() / state_.eigen_scale.minCoeff();
    if (cond * cond > 1e14) restart_from_mean();
  }
}

std::string CmaEs::snapshot_json() const {
  nlohmann::json j;
  j["format_version"] = 1;
  j["dim"] = domain_.dim();
  j["generation"] = state_.generation;
  j["sigma"] = state_.sigma;
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  j["mean"] = vec(state_.mean);
  j["p_sigma"] = vec(state_.p_sigma);
  j["p_c"] = vec(state_.p_c);
  std::vector<double> c_flat;
  c_flat.reserve(static_cast<std::size_t>(state_.C.size()));
  for (int r = 0; r < state_.C.rows(); ++r)
    for (int c = 0; c < state_.C.cols(); ++c) c_flat.push_back(state_.C(r, c));
  j["covariance_row_major"] = c_flat;
  j["restart_generations"] = state_.restart_generations;
  j["rng_state"] = rng_.serialize_state();
  j["constants"] = {{"mu_eff", state_.constants.mu_eff},
                    {"c_sigma", state_.constants.c_sigma},
                    {"d_sigma", state_.constants.d_sigma},
                    {"c_c", state_.constants.c_c},
                    {"c1", state_.constants.c1},
                    {"c_mu", state_.constants.c_mu},
                    {"chi_n", state_.constants.chi_n},
                    {"eigen_refresh_interval",
                     state_.constants.eigen_refresh_interval},
                    {"weights", vec(state_.constants.weights)}};
  return j.dump(2) + "\n";
}

CmaEs CmaEs::restore(BoxDomain domain, CmaEsConfig cfg,
                     const std::string& snapshot) {
  const nlohmann::json j = nlohmann::json::parse(snapshot);
  CmaEs es(std::move(domain), cfg);
  const int n = es.domain_.dim();
  if (j.at("dim").get<int>() != n)
    throw DimensionMismatch("cmaes: snapshot dimension mismatch");
  auto read_vec = [&](const char* key) {
    const auto v = j.at(key).get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                             static_cast<long>(v.size()))
        .eval();
  };
  es.state_.generation = j.at("generation").get<long>();
  es.state_.sigma = j.at("sigma").get<double>();
  es.state_.mean = read_vec("mean");
  es.state_.p_sigma = read_vec("p_sigma");
  es.state_.p_c = read_vec("p_c");
  const auto c_flat = j.at("covariance_row_major").get<std::vector<double>>();
  es.state_.C.resize(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      es.state_.C(r, c) = c_flat[static_cast<std::size_t>(r * n + c)];
  es.state_.restart_generations =
      j.at("restart_generations").get<std::vector<long>>();
  es.rng_.deserialize_state(j.at("rng_state").get<std::string>());
  es.refresh_eigen();
  return es;
}

RunLog run_cmaes(const DomainTable& domains, const CmaEsConfig& cfg,
                 const Objective& objective, int snapshot_every,
                 const SnapshotSink& snapshot_sink) {
  CmaEs es(BoxDomain::from(domains), cfg);

  RunLog log;
  log.algorithm = "cmaes";
  log.seed = cfg.seed;
  log.records.reserve(static_cast<std::size_t>(cfg.generations));

  std::int64_t evals_used = 0;
  bool have_best = false;
  std::vector<double> fitnesses(static_cast<std::size_t>(cfg.lambda));

  for (int gen = 0; gen < cfg.generations; ++gen) {
    const std::vector<Eigen::VectorXd> candidates = es.ask();
    for (int i = 0; i < cfg.lambda; ++i) {
      DesignVector dv;
      for (int g = 0; g < kGeneCount; ++g)
        dv[g] = candidates[static_cast<std::size_t>(i)](g);
      const Evaluation ev = objective(dv);
      fitnesses[static_cast<std::size_t>(i)] = ev.fitness;
      ++evals_used;
      if (!have_best || ev.fitness > log.best.fitness) {
        log.best = ev;
        log.best_genome = dv;
        have_best = true;
      }
    }
    log.records.push_back(
        {gen, evals_used, log.best.fitness, log.best.cost, log.best.s});
    es.tell(candidates, fitnesses);

    if (snapshot_every > 0 && snapshot_sink &&
        (gen + 1) % snapshot_every == 0)
      snapshot_sink(es.state().generation, es.snapshot_json());
  }
  return log;
}

}  // namespace csb
