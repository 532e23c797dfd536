#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csb/design_space.hpp"
#include "csb/rng.hpp"
#include "csb/run_log.hpp"

namespace csb {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Axis-aligned search box in gene space. The strategy itself works in the
/// normalized [0,1]^n cube mapped affinely onto this box, so one step-size
/// value is meaningful even when gene ranges span orders of magnitude.
struct BoxDomain {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  static BoxDomain from(const DomainTable& domains);
  static BoxDomain cube(int n, double lo, double hi);
};

struct CmaEsConfig {
  int mu = 25;
  int lambda = 50;
  double sigma0 = 0.5;  // in normalized coordinates
  int generations = 8000;
  std::uint64_t seed = 0;
  /// When absent, the initial mean is drawn uniformly from the unit cube.
  std::optional<Eigen::VectorXd> initial_mean_norm;

  void validate() const;
};

/// Strategy constants for dimension n, standard published defaults.
struct CmaEsConstants {
  Eigen::VectorXd weights;  // mu positive recombination weights, sum 1
  double mu_eff = 0.0;
  double c_sigma = 0.0;
  double d_sigma = 0.0;
  double c_c = 0.0;
  double c1 = 0.0;
  double c_mu = 0.0;
  double chi_n = 0.0;
  int eigen_refresh_interval = 1;  // generations between eigendecompositions

  static CmaEsConstants defaults(int n, int mu, int lambda);
};

struct CmaEsState {
  Eigen::VectorXd mean;  // normalized coordinates
  double sigma = 0.0;
  Eigen::MatrixXd C;
  Eigen::VectorXd p_sigma;
  Eigen::VectorXd p_c;
  Eigen::MatrixXd eigen_basis;        // B
  Eigen::VectorXd eigen_scale;        // sqrt of (floored) eigenvalues
  int generations_since_eigen = 0;
  long generation = 0;
  std::vector<long> restart_generations;  // conditioning-guard resets
  CmaEsConstants constants;
};

/// (mu/mu_w, lambda)-CMA-ES with clamp repair: samples are projected onto
/// the box and the repaired point is used both for evaluation and for the
/// distribution update. Covariance conditioning above 1e14 triggers a
/// restart from the current mean with the initial step size.
class CmaEs {
 public:
  CmaEs(BoxDomain domain, CmaEsConfig cfg);

  /// λ clamped gene-space candidates. All randomness of one generation is
  /// drawn here, in candidate-major coordinate-minor order.
  std::vector<Eigen::VectorXd> ask();

  /// One unrepaired sample (gene space); test hook for the sampling
  /// distribution, draws from the same stream as ask().
  Eigen::VectorXd sample_raw();

  /// Rank-based update, maximization convention: the mu best candidates by
  /// descending fitness recombine. Throws DimensionMismatch unless
  /// candidates and fitnesses both have size lambda.
  void tell(const std::vector<Eigen::VectorXd>& candidates,
            const std::vector<double>& fitnesses);

  const CmaEsState& state() const { return state_; }
  CmaEsState& state() { return state_; }
  const CmaEsConfig& config() const { return cfg_; }
  const BoxDomain& domain() const { return domain_; }

  std::string snapshot_json() const;
  static CmaEs restore(BoxDomain domain, CmaEsConfig cfg,
                       const std::string& snapshot);

 private:
  Eigen::VectorXd gene_from_norm(const Eigen::VectorXd& z) const;
  Eigen::VectorXd norm_from_gene(const Eigen::VectorXd& x) const;
  void refresh_eigen();
  void restart_from_mean();

  BoxDomain domain_;
  CmaEsConfig cfg_;
  CmaEsState state_;
  Rng rng_;
};

using VectorObjective = std::function<Evaluation(const Eigen::VectorXd&)>;
using SnapshotSink = std::function<void(long generation, const std::string&)>;

/// Full run over the 22-gene design domain: ask -> evaluate -> tell for
/// cfg.generations generations, best-so-far archive logged per generation.
RunLog run_cmaes(const DomainTable& domains, const CmaEsConfig& cfg,
                 const Objective& objective, int snapshot_every = 0,
                 const SnapshotSink& snapshot_sink = nullptr);

}  // namespace csb
