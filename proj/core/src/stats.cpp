#include "csb/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace csb {
namespace stats {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Wichura's PPND16 (applied statistics algorithm AS 241).
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -value : value;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw EmptySample("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

namespace {

// Midranks (doubled, so they stay integral under ties) of the combined
// sample, plus the tie-correction term sum(t^3 - t).
struct RankInfo {
  std::vector<std::int64_t> double_ranks;  // 2 * midrank per sorted position
  double tie_term = 0.0;
};

RankInfo midranks(const std::vector<double>& sorted_combined) {
  RankInfo info;
  const std::size_t n = sorted_combined.size();
  info.double_ranks.resize(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && sorted_combined[j + 1] == sorted_combined[i]) ++j;
    // positions i..j share midrank (i+1 + j+1)/2; doubled: i+j+2.
    const std::int64_t dr = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) info.double_ranks[k] = dr;
    const double t = static_cast<double>(j - i + 1);
    info.tie_term += t * t * t - t;
    i = j + 1;
  }
  return info;
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a,
                                 std::span<const double> b) {
  if (a.empty() || b.empty())
    throw EmptySample("mann_whitney_u: both samples must be nonempty");
  const std::size_t na = a.size(), nb = b.size(), nt = na + nb;

  struct Tagged {
    double value;
    bool from_a;
  };
  std::vector<Tagged> all;
  all.reserve(nt);
  for (double x : a) all.push_back({x, true});
  for (double x : b) all.push_back({x, false});
  std::sort(all.begin(), all.end(),
            [](const Tagged& l, const Tagged& r) { return l.value < r.value; });

  std::vector<double> values(nt);
  for (std::size_t i = 0; i < nt; ++i) values[i] = all[i].value;
  const RankInfo ranks = midranks(values);

  std::int64_t double_rank_sum_a = 0;
  for (std::size_t i = 0; i < nt; ++i)
    if (all[i].from_a) double_rank_sum_a += ranks.double_ranks[i];
  // 2U = 2R_a - na(na+1).
  const std::int64_t u2 =
      double_rank_sum_a -
      static_cast<std::int64_t>(na) * (static_cast<std::int64_t>(na) + 1);

  MannWhitneyResult res;
  res.u = static_cast<double>(u2) / 2.0;
  const double nm = static_cast<double>(na) * static_cast<double>(nb);
  res.effect_size = 2.0 * res.u / nm - 1.0;

  const std::int64_t nm2 = static_cast<std::int64_t>(na) *
                           static_cast<std::int64_t>(nb);  // 2 * (nm/2)
  if (nt <= 12) {
    // Exhaustive enumeration over which sorted positions belong to sample
    // a, conditional on the observed values. Integer arithmetic on doubled
    // ranks keeps the comparisons exact.
    const std::int64_t observed_dev = std::llabs(u2 - nm2);
    std::uint32_t count_total = 0, count_extreme = 0;
    const std::uint32_t limit = 1u << nt;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
      if (std::popcount(mask) != static_cast<int>(na)) continue;
      ++count_total;
      std::int64_t drs = 0;
      for (std::size_t i = 0; i < nt; ++i)
        if (mask & (1u << i)) drs += ranks.double_ranks[i];
      const std::int64_t u2p =
          drs - static_cast<std::int64_t>(na) * (static_cast<std::int64_t>(na) + 1);
      if (std::llabs(u2p - nm2) >= observed_dev) ++count_extreme;
    }
    res.p_two_sided =
        static_cast<double>(count_extreme) / static_cast<double>(count_total);
    return res;
  }

  const double ntd = static_cast<double>(nt);
  const double sigma2 =
      nm / 12.0 * ((ntd + 1.0) - ranks.tie_term / (ntd * (ntd - 1.0)));
  if (sigma2 <= 0.0) {
    res.p_two_sided = 1.0;
    return res;
  }
  const double mu = nm / 2.0;
  double z = res.u - mu;
  // Continuity correction toward the mean.
  if (z > 0.0) z -= 0.5;
  else if (z < 0.0) z += 0.5;
  z /= std::sqrt(sigma2);
  res.p_two_sided = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
  return res;
}

KsResult kolmogorov_smirnov(std::vector<double> sample,
                            const std::function<double(double)>& cdf) {
  if (sample.empty()) throw EmptySample("kolmogorov_smirnov: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double q = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    q += sign * term;
    sign = -sign;
    if (term < 1e-16) break;
  }
  return {d, std::clamp(2.0 * q, 0.0, 1.0)};
}

namespace {

double poly(const double* c, int n, double x) {
  double v = c[0];
  double xp = 1.0;
  for (int i = 1; i < n; ++i) {
    xp *= x;
    v += c[i] * xp;
  }
  return v;
}

}  // namespace

// Port of Royston's approximation (the classic swilk routine used by R and
// scipy). Weights from the expected normal order statistics, p-value from
// a normalizing transform of 1 - W.
ShapiroResult shapiro_wilk(std::vector<double> x) {
  const int n = static_cast<int>(x.size());
  if (n < 3) throw std::invalid_argument("shapiro_wilk: need n >= 3");
  if (n > 5000) throw std::invalid_argument("shapiro_wilk: n > 5000");
  std::sort(x.begin(), x.end());
  if (x.back() - x.front() <= 0.0)
    throw std::invalid_argument("shapiro_wilk: sample has zero range");

  static const double c1[6] = {0.0, 0.221157, -0.147981, -2.071190,
                               4.434685, -2.706056};
  static const double c2[6] = {0.0, 0.042981, -0.293762, -1.752461,
                               5.682633, -3.582633};
  static const double c3[4] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static const double c4[4] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static const double c5[4] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static const double c6[3] = {-0.4803, -0.082676, 0.0030302};
  static const double gc[2] = {-2.273, 0.459};

  const int n2 = n / 2;
  std::vector<double> a(static_cast<std::size_t>(n2));
  const double an = static_cast<double>(n);

  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    const double an25 = an + 0.25;
    double summ2 = 0.0;
    for (int i = 1; i <= n2; ++i) {
      a[static_cast<std::size_t>(i - 1)] =
          normal_quantile((static_cast<double>(i) - 0.375) / an25);
      summ2 += a[static_cast<std::size_t>(i - 1)] *
               a[static_cast<std::size_t>(i - 1)];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, 6, rsn) - a[0] / ssumm2;

    int i1;
    double fac, a2 = 0.0;
    if (n > 5) {
      i1 = 3;
      a2 = -a[1] / ssumm2 + poly(c2, 6, rsn);
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
    } else {
      i1 = 2;
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    if (n > 5) a[1] = a2;
    for (int i = i1; i <= n2; ++i)
      a[static_cast<std::size_t>(i - 1)] /= -fac;
  }

  // W statistic.
  const double xm = mean(x);
  double ssq = 0.0;
  for (double v : x) ssq += (v - xm) * (v - xm);
  double sa = 0.0;
  for (int i = 0; i < n2; ++i)
    sa += a[static_cast<std::size_t>(i)] *
          (x[static_cast<std::size_t>(n - 1 - i)] - x[static_cast<std::size_t>(i)]);
  const double w = sa * sa / ssq;
  const double w_clamped = std::min(w, 1.0);

  // p-value via Royston's transforms.
  double pw;
  if (n == 3) {
    const double pi6 = 6.0 / M_PI;
    const double stqr = std::asin(std::sqrt(0.75));
    pw = pi6 * (std::asin(std::sqrt(w_clamped)) - stqr);
    pw = std::clamp(pw, 0.0, 1.0);
  } else {
    const double y = std::log1p(-w_clamped);
    double m, s;
    if (n <= 11) {
      const double gamma = poly(gc, 2, an);
      if (y >= gamma) return {w_clamped, 1e-99};
      const double yg = -std::log(gamma - y);
      m = poly(c3, 4, an);
      s = std::exp(poly(c4, 4, an));
      pw = 1.0 - normal_cdf((yg - m) / s);
    } else {
      const double xl = std::log(an);
      m = poly(c5, 4, xl);
      s = std::exp(poly(c6, 3, xl));
      pw = 1.0 - normal_cdf((y - m) / s);
    }
  }
  return {w_clamped, pw};
}

}  // namespace stats
}  // namespace csb
