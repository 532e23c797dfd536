#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace csb {
namespace stats {

struct EmptySample : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MannWhitneyResult {
  double u = 0.0;            // U statistic, a-vs-b orientation
  double p_two_sided = 1.0;
  double effect_size = 0.0;  // rank-biserial r = 2U/(nm) - 1
};

/// Mann-Whitney U with midrank tie handling. The p-value is computed by
/// exhaustive enumeration (conditional on the observed values) when
/// n + m <= 12, otherwise by the normal approximation with tie correction
/// and continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> a,
                                 std::span<const double> b);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against a given CDF (asymptotic
/// p-value with the small-sample correction factor).
KsResult kolmogorov_smirnov(std::vector<double> sample,
                            const std::function<double(double)>& cdf);

struct ShapiroResult {
  double w = 0.0;
  double p_value = 1.0;
};

/// Shapiro-Wilk normality test (Royston's approximation, 3 <= n <= 5000).
/// Shipped as a diagnostic; nothing in the pipeline gates on it.
ShapiroResult shapiro_wilk(std::vector<double> sample);

double normal_cdf(double z);
double normal_quantile(double p);  // inverse CDF, 0 < p < 1

double mean(std::span<const double> xs);
double sample_stddev(std::span<const double> xs);  // n-1 denominator

}  // namespace stats
}  // namespace csb
