#pragma once

// Statistical primitives: proportion tests, rank-sum test, Gaussian kernel
// density, power-law MLE, log-binned histograms, Wilson intervals and the
// bootstrap.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

#include "ossmood/error.hpp"
#include "ossmood/random.hpp"

namespace ossmood::stats {

enum class Alternative { two_sided, greater, less };

inline std::string_view to_string(Alternative a) {
  switch (a) {
    case Alternative::two_sided: return "two_sided";
    case Alternative::greater: return "greater";
    case Alternative::less: return "less";
  }
  return "?";
}

inline Alternative parse_alternative(std::string_view s) {
  if (s == "two_sided" || s == "two-sided" || s == "<>") return Alternative::two_sided;
  if (s == "greater" || s == ">") return Alternative::greater;
  if (s == "less" || s == "<") return Alternative::less;
  throw ContractViolation("unknown alternative '" + std::string(s) + "'");
}

enum class Method { chi_square_yates, exact_binomial, fisher_exact, rank_sum_exact, rank_sum_normal };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::chi_square_yates: return "chi_square_yates";
    case Method::exact_binomial: return "exact_binomial";
    case Method::fisher_exact: return "fisher_exact";
    case Method::rank_sum_exact: return "rank_sum_exact";
    case Method::rank_sum_normal: return "rank_sum_normal";
  }
  return "?";
}

struct TestResult {
  double statistic = 0;
  double p_value = 1;
  Alternative alternative = Alternative::two_sided;
  double estimate = 0;
  Method method = Method::chi_square_yates;
};

/// Chi-square cells with an expected count below this use an exact test instead.
inline constexpr double kExactFallbackExpected = 8.0;

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Upper tail of the chi-square distribution with one degree of freedom.
inline double chi2_1_sf(double x) { return x <= 0 ? 1.0 : std::erfc(std::sqrt(x / 2.0)); }

inline double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

// ---------------------------------------------------------------------------
// Binomial and hypergeometric helpers

inline double log_choose(std::uint64_t n, std::uint64_t k) {
  return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
         std::lgamma(static_cast<double>(n - k) + 1);
}

inline double binomial_pmf(std::uint64_t k, std::uint64_t n, double p) {
  if (k > n) return 0;
  if (p <= 0) return k == 0 ? 1 : 0;
  if (p >= 1) return k == n ? 1 : 0;
  return std::exp(log_choose(n, k) + static_cast<double>(k) * std::log(p) +
                  static_cast<double>(n - k) * std::log1p(-p));
}

/// P[X >= k] for X ~ Bin(n, p).
inline double binomial_upper(std::uint64_t k, std::uint64_t n, double p) {
  if (k == 0) return 1;
  double s = 0;
  for (auto i = k; i <= n; ++i) s += binomial_pmf(i, n, p);
  return clamp01(s);
}

/// P[X <= k] for X ~ Bin(n, p).
inline double binomial_lower(std::uint64_t k, std::uint64_t n, double p) {
  if (k >= n) return 1;
  double s = 0;
  for (std::uint64_t i = 0; i <= k; ++i) s += binomial_pmf(i, n, p);
  return clamp01(s);
}

inline double hypergeometric_pmf(std::uint64_t x, std::uint64_t population,
                                 std::uint64_t successes, std::uint64_t draws) {
  if (x > successes || x > draws || draws - x > population - successes) return 0;
  return std::exp(log_choose(successes, x) + log_choose(population - successes, draws - x) -
                  log_choose(population, draws));
}

// ---------------------------------------------------------------------------

/// Tests an observed proportion successes/trials against p0. Chi-square with
/// Yates correction, or the exact binomial test when an expected count is
/// below kExactFallbackExpected. Two-sided exact p-values double the smaller tail.
inline TestResult one_proportion_test(std::uint64_t successes, std::uint64_t trials, double p0,
                                      Alternative alt = Alternative::two_sided) {
  if (trials == 0) throw UndefinedError("one_proportion_test: zero trials");
  if (successes > trials) throw ContractViolation("one_proportion_test: successes > trials");
  if (!(p0 > 0 && p0 < 1)) throw ContractViolation("one_proportion_test: p0 outside (0,1)");
  const double n = static_cast<double>(trials);
  const double k = static_cast<double>(successes);
  TestResult r;
  r.alternative = alt;
  r.estimate = k / n - p0;
  if (std::min(n * p0, n * (1 - p0)) < kExactFallbackExpected) {
    r.method = Method::exact_binomial;
    r.statistic = k;
    const double up = binomial_upper(successes, trials, p0);
    const double lo = binomial_lower(successes, trials, p0);
    r.p_value = alt == Alternative::greater ? up
              : alt == Alternative::less   ? lo
                                           : std::min(1.0, 2 * std::min(up, lo));
    return r;
  }
  r.method = Method::chi_square_yates;
  const double d = k - n * p0;
  const double corr = std::min(0.5, std::abs(d));
  r.statistic = (std::abs(d) - corr) * (std::abs(d) - corr) / (n * p0 * (1 - p0));
  const double z = (d < 0 ? -1.0 : 1.0) * std::sqrt(r.statistic);
  r.p_value = alt == Alternative::greater ? normal_sf(z)
            : alt == Alternative::less   ? normal_cdf(z)
                                         : chi2_1_sf(r.statistic);
  return r;
}

/// Pooled test of k1/n1 == k2/n2. Chi-square with Yates correction on the
/// 2x2 table; Fisher's exact test when an expected cell is small. The
/// estimate is |k1/n1 - k2/n2|; "greater" means the first proportion is larger.
inline TestResult two_proportion_test(std::uint64_t k1, std::uint64_t n1, std::uint64_t k2,
                                      std::uint64_t n2, Alternative alt = Alternative::two_sided) {
  if (n1 == 0 || n2 == 0) throw UndefinedError("two_proportion_test: empty sample");
  if (k1 > n1 || k2 > n2) throw ContractViolation("two_proportion_test: successes > trials");
  const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
  TestResult r;
  r.alternative = alt;
  r.estimate = std::abs(p1 - p2);
  const double total = static_cast<double>(n1 + n2);
  const double pooled = static_cast<double>(k1 + k2) / total;
  if (pooled <= 0 || pooled >= 1) {
    r.p_value = 1;
    return r;
  }
  const double e[4] = {n1 * pooled, n1 * (1 - pooled), n2 * pooled, n2 * (1 - pooled)};
  if (*std::min_element(std::begin(e), std::end(e)) < kExactFallbackExpected) {
    r.method = Method::fisher_exact;
    r.statistic = static_cast<double>(k1);
    const auto K = k1 + k2, N = n1 + n2;
    const auto x_lo = K > n2 ? K - n2 : 0;
    const auto x_hi = std::min<std::uint64_t>(K, n1);
    const double observed = hypergeometric_pmf(k1, N, K, n1);
    double up = 0, lo = 0, two = 0;
    for (auto x = x_lo; x <= x_hi; ++x) {
      const double q = hypergeometric_pmf(x, N, K, n1);
      if (x >= k1) up += q;
      if (x <= k1) lo += q;
      if (q <= observed * (1 + 1e-7)) two += q;
    }
    r.p_value = clamp01(alt == Alternative::greater ? up : alt == Alternative::less ? lo : two);
    return r;
  }
  r.method = Method::chi_square_yates;
  const double delta = p1 - p2;
  const double yates = std::min(0.5, std::abs(delta) / (1.0 / n1 + 1.0 / n2));
  const double dev = std::abs(static_cast<double>(k1) - e[0]);
  double stat = 0;
  for (double ei : e) stat += (dev - yates) * (dev - yates) / ei;
  r.statistic = stat;
  const double z = (delta < 0 ? -1.0 : 1.0) * std::sqrt(stat);
  r.p_value = alt == Alternative::greater ? normal_sf(z)
            : alt == Alternative::less   ? normal_cdf(z)
                                         : chi2_1_sf(stat);
  return r;
}

// ---------------------------------------------------------------------------

namespace detail {

// Midranks (1-based) of the concatenation a ++ b; also returns sum of (t^3 - t) over ties.
inline std::vector<double> midranks(std::span<const double> a, std::span<const double> b,
                                    double& tie_term) {
  const auto n = a.size() + b.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto value = [&](std::size_t i) { return i < a.size() ? a[i] : b[i - a.size()]; };
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return value(x) < value(y); });
  std::vector<double> rank(n);
  tie_term = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && value(order[j + 1]) == value(order[i])) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (auto k = i; k <= j; ++k) rank[order[k]] = r;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  return rank;
}

}  // namespace detail

/// Largest combined sample size handled by exact enumeration.
inline constexpr std::size_t kRankSumExactMax = 12;

/// Wilcoxon rank-sum (Mann-Whitney) test of a against b. Exact enumeration
/// over all rank assignments when |a|+|b| <= 12, otherwise the normal
/// approximation with tie and continuity corrections. statistic = U of a,
/// estimate = U / (|a| |b|), the probability that a draw from a exceeds one from b.
inline TestResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b,
                                    Alternative alt = Alternative::two_sided) {
  if (a.empty() || b.empty()) throw UndefinedError("wilcoxon_rank_sum: empty sample");
  for (auto s : {a, b})
    for (double v : s)
      if (!std::isfinite(v)) throw ContractViolation("wilcoxon_rank_sum: non-finite value");
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  double tie_term = 0;
  const auto rank = detail::midranks(a, b, tie_term);
  double w = 0;
  for (std::size_t i = 0; i < a.size(); ++i) w += rank[i];
  TestResult r;
  r.alternative = alt;
  r.statistic = w - n1 * (n1 + 1) / 2;
  r.estimate = r.statistic / (n1 * n2);
  const std::size_t N = a.size() + b.size();
  if (N <= kRankSumExactMax) {
    r.method = Method::rank_sum_exact;
    const double expected = n1 * (static_cast<double>(N) + 1) / 2;
    const double eps = 1e-9;
    std::size_t total = 0, ge = 0, le = 0, extreme = 0;
    // Enumerate every subset of size |a| of the N positions.
    for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) != a.size()) continue;
      double s = 0;
      for (std::size_t i = 0; i < N; ++i)
        if (mask & (1u << i)) s += rank[i];
      ++total;
      if (s >= w - eps) ++ge;
      if (s <= w + eps) ++le;
      if (std::abs(s - expected) >= std::abs(w - expected) - eps) ++extreme;
    }
    const double t = static_cast<double>(total);
    r.p_value = alt == Alternative::greater ? ge / t
              : alt == Alternative::less   ? le / t
                                           : extreme / t;
    return r;
  }
  r.method = Method::rank_sum_normal;
  const double Nd = static_cast<double>(N);
  const double var = n1 * n2 / 12.0 * ((Nd + 1) - tie_term / (Nd * (Nd - 1)));
  const double diff = r.statistic - n1 * n2 / 2;
  if (var <= 0) {
    r.p_value = 1;
    return r;
  }
  const double sd = std::sqrt(var);
  switch (alt) {
    case Alternative::two_sided: {
      const double c = diff > 0 ? 0.5 : diff < 0 ? -0.5 : 0.0;
      r.p_value = clamp01(2 * normal_sf(std::abs((diff - c) / sd)));
      break;
    }
    case Alternative::greater: r.p_value = normal_sf((diff - 0.5) / sd); break;
    case Alternative::less: r.p_value = normal_cdf((diff + 0.5) / sd); break;
  }
  return r;
}

// ---------------------------------------------------------------------------

struct Grid {
  double lo = 1.0;
  double hi = 5.0;
  double step = 0.01;
};

inline std::vector<double> grid_points(const Grid& g) {
  if (!(g.lo < g.hi) || !(g.step > 0)) throw ContractViolation("grid requires lo < hi and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((g.hi - g.lo) / g.step + 1e-9)) + 1;
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = g.lo + static_cast<double>(i) * g.step;
  return xs;
}

struct Density {
  std::vector<double> grid;
  std::vector<double> values;

  /// Trapezoidal integral over the grid.
  double integral() const {
    double s = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
      s += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
    return s;
  }

  std::size_t argmax() const {
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  }
};

/// Mean of Gaussian kernels (sigma = bandwidth) centred on the samples,
/// evaluated at xs. Not renormalized.
inline std::vector<double> kde_mixture(std::span<const double> samples, double bandwidth,
                                       std::span<const double> xs) {
  const double norm = 1.0 / (std::sqrt(2 * M_PI) * bandwidth * static_cast<double>(samples.size()));
  std::vector<double> out(xs.size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double s = 0;
    for (double c : samples) {
      const double u = (xs[i] - c) / bandwidth;
      s += std::exp(-0.5 * u * u);
    }
    out[i] = s * norm;
  }
  return out;
}

/// Gaussian kernel density on a regular grid, renormalized so its
/// trapezoidal integral over the grid is 1.
inline Density gaussian_kde(std::span<const double> samples, double bandwidth, const Grid& grid) {
  if (samples.empty()) throw UndefinedError("gaussian_kde: no samples");
  if (!(bandwidth > 0)) throw ContractViolation("gaussian_kde: bandwidth must be > 0");
  Density d;
  d.grid = grid_points(grid);
  d.values = kde_mixture(samples, bandwidth, d.grid);
  const double area = d.integral();
  if (!(area > 0) || !std::isfinite(area))
    throw UndefinedError("gaussian_kde: no density mass on the grid");
  for (auto& v : d.values) v /= area;
  return d;
}

// ---------------------------------------------------------------------------

struct PowerLawFit {
  double alpha = 0;
  std::size_t n_used = 0;
  double xmin = 0;
  double xmax = std::numeric_limits<double>::infinity();
};

inline constexpr std::size_t kPowerLawMinSamples = 10;

/// Continuous power-law MLE over samples >= xmin:
/// alpha = 1 + n / sum(ln(x / xmin)).
inline PowerLawFit powerlaw_mle(std::span<const double> samples, double xmin,
                                std::size_t min_count = kPowerLawMinSamples) {
  if (!(xmin > 0)) throw ContractViolation("powerlaw_mle: xmin must be > 0");
  double sum_log = 0;
  std::size_t n = 0;
  for (double x : samples) {
    if (x >= xmin) {
      sum_log += std::log(x / xmin);
      ++n;
    }
  }
  if (n < min_count || n == 0)
    throw InsufficientDataError("powerlaw_mle: " + std::to_string(n) + " samples >= xmin, need " +
                                std::to_string(std::max<std::size_t>(min_count, 1)));
  if (sum_log <= 0) throw DivergentEstimateError("powerlaw_mle: all samples equal xmin");
  return {1.0 + static_cast<double>(n) / sum_log, n, xmin};
}

namespace detail {

// Mean of ln(x/xmin) under a power law with exponent beta+1 truncated to
// [xmin, r*xmin]; lr = ln r. Decreasing in beta.
inline double truncated_mean_log(double beta, double lr) {
  const double bl = beta * lr;
  if (std::abs(bl) < 1e-6) return lr / 2 - beta * lr * lr / 12;
  return 1.0 / beta - lr / std::expm1(bl);
}

}  // namespace detail

/// Power-law MLE over samples in [xmin, xmax], accounting for the upper
/// truncation. Solves mean(ln(x/xmin)) = E[ln(x/xmin)] for alpha by bisection.
inline PowerLawFit powerlaw_mle_truncated(std::span<const double> samples, double xmin,
                                          double xmax,
                                          std::size_t min_count = kPowerLawMinSamples) {
  if (!(xmin > 0) || !(xmax > xmin)) throw ContractViolation("powerlaw_mle_truncated: need 0 < xmin < xmax");
  if (std::isinf(xmax)) return powerlaw_mle(samples, xmin, min_count);
  double sum_log = 0;
  std::size_t n = 0;
  double first = std::numeric_limits<double>::quiet_NaN();
  bool all_equal = true;
  for (double x : samples) {
    if (x < xmin || x > xmax) continue;
    if (n == 0) first = x;
    else if (x != first) all_equal = false;
    sum_log += std::log(x / xmin);
    ++n;
  }
  if (n < min_count || n == 0)
    throw InsufficientDataError("powerlaw_mle_truncated: " + std::to_string(n) +
                                " samples in range, need " + std::to_string(min_count));
  if (all_equal) throw DivergentEstimateError("powerlaw_mle_truncated: all samples identical");
  const double target = sum_log / static_cast<double>(n);
  const double lr = std::log(xmax / xmin);
  double lo = -50, hi = 50;  // beta = alpha - 1
  if (target >= detail::truncated_mean_log(lo, lr) || target <= detail::truncated_mean_log(hi, lr))
    throw DivergentEstimateError("powerlaw_mle_truncated: estimate outside alpha in [-49, 51]");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (detail::truncated_mean_log(mid, lr) > target) lo = mid;
    else hi = mid;
  }
  return {1.0 + 0.5 * (lo + hi), n, xmin, xmax};
}

/// Density of the fitted power law at x (normalized over [xmin, xmax]).
inline double powerlaw_pdf(const PowerLawFit& fit, double x) {
  if (x < fit.xmin) return 0;
  const double beta = fit.alpha - 1;
  const double u = x / fit.xmin;
  double norm;  // integral of u^-alpha over [1, r]
  if (std::isinf(fit.xmax)) norm = 1.0 / beta;
  else {
    const double lr = std::log(fit.xmax / fit.xmin);
    norm = std::abs(beta * lr) < 1e-12 ? lr : -std::expm1(-beta * lr) / beta;
  }
  return std::pow(u, -fit.alpha) / (norm * fit.xmin);
}

// ---------------------------------------------------------------------------

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  std::vector<double> densities;  // counts / (width * total)
  std::uint64_t total = 0;

  double width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }
  double center(std::size_t i) const { return std::sqrt(bin_edges[i] * bin_edges[i + 1]); }
};

/// Histogram with geometric bins [lo*10^(k/b), lo*10^((k+1)/b)) starting at
/// the smallest sample and extending past the largest.
inline Histogram log_binned_histogram(std::span<const double> samples, unsigned bins_per_decade) {
  if (samples.empty()) throw UndefinedError("log_binned_histogram: no samples");
  if (bins_per_decade < 1) throw ContractViolation("log_binned_histogram: bins_per_decade >= 1");
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *mn, hi = *mx;
  if (!(lo > 0) || !std::isfinite(hi)) throw ContractViolation("log_binned_histogram: samples must be positive and finite");
  const double b = bins_per_decade;
  auto edge = [&](std::size_t k) { return lo * std::pow(10.0, static_cast<double>(k) / b); };
  Histogram h;
  h.bin_edges.push_back(lo);
  for (std::size_t k = 1;; ++k) {
    h.bin_edges.push_back(edge(k));
    if (h.bin_edges.back() > hi) break;
  }
  const std::size_t bins = h.bin_edges.size() - 1;
  h.counts.assign(bins, 0);
  for (double x : samples) {
    auto i = static_cast<std::ptrdiff_t>(std::floor(std::log10(x / lo) * b));
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    while (i + 1 < static_cast<std::ptrdiff_t>(bins) && x >= h.bin_edges[static_cast<std::size_t>(i) + 1]) ++i;
    while (i > 0 && x < h.bin_edges[static_cast<std::size_t>(i)]) --i;
    ++h.counts[static_cast<std::size_t>(i)];
  }
  h.total = samples.size();
  h.densities.resize(bins);
  for (std::size_t i = 0; i < bins; ++i)
    h.densities[i] = static_cast<double>(h.counts[i]) / (h.width(i) * static_cast<double>(h.total));
  return h;
}

// ---------------------------------------------------------------------------

struct Interval {
  double lo = 0;
  double hi = 0;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for k successes out of n.
inline Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = kZ95) {
  if (n == 0) throw UndefinedError("wilson_interval: n = 0");
  const double nd = static_cast<double>(n);
  const double p = static_cast<double>(k) / nd;
  const double z2 = z * z;
  const double denom = 1 + z2 / nd;
  const double centre = (p + z2 / (2 * nd)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / nd + z2 / (4 * nd * nd));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct MeanStd {
  double mean = 0;
  double std = 0;  // sample standard deviation (n - 1)
  std::size_t n = 0;
};

inline MeanStd mean_std(std::span<const double> xs) {
  MeanStd r;
  r.n = xs.size();
  if (xs.empty()) return r;
  // Shifted by the first value so constant input gives an exact mean and zero spread.
  const double shift = xs.front();
  double sum = 0;
  for (double x : xs) sum += x - shift;
  const double offset = sum / static_cast<double>(xs.size());
  r.mean = shift + offset;
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - shift - offset) * (x - shift - offset);
    r.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return r;
}

/// Indices of one bootstrap resample of size n for replicate `rep`, seeded
/// with seed + rep so replicates do not depend on evaluation order.
inline std::vector<std::size_t> bootstrap_sample(std::size_t n, std::uint64_t seed, std::size_t rep) {
  Rng rng(seed + rep);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = static_cast<std::size_t>(rng.below(n));
  return idx;
}

/// Mean and sample standard deviation of `metric` over `reps` resamples with
/// replacement. Replicates are spread over `jobs` threads.
template <typename T, typename Metric>
MeanStd bootstrap_metric(std::span<const T> data, Metric&& metric, std::size_t reps,
                         std::uint64_t seed, unsigned jobs = 1) {
  if (data.empty()) throw ContractViolation("bootstrap_metric: empty data");
  if (reps < 2) throw ContractViolation("bootstrap_metric: reps must be >= 2");
  std::vector<double> values(reps);
  auto run = [&](std::size_t begin, std::size_t step) {
    std::vector<T> sample;
    sample.reserve(data.size());
    for (auto r = begin; r < reps; r += step) {
      sample.clear();
      for (auto i : bootstrap_sample(data.size(), seed, r)) sample.push_back(data[i]);
      values[r] = metric(std::span<const T>(sample));
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(reps)));
  if (jobs == 1) run(0, 1);
  else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(run, j, jobs);
  }
  return mean_std(values);
}

}  // namespace ossmood::stats
