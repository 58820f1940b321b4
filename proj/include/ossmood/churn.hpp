#pragma once

// Emotion features per labeled interval, conditional densities, the binned
// inactivity posterior, threshold predictors and bootstrap evaluation.

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "ossmood/activity.hpp"
#include "ossmood/corpus.hpp"
#include "ossmood/stats.hpp"

namespace ossmood {

inline constexpr int kLookbackDays = 5;
inline constexpr double kBandwidth = 0.35;
inline constexpr std::size_t kPosteriorBins = 5;
inline constexpr double kThetaAbsolute = 1.9;
inline constexpr double kThetaDeviation = 0.8;
inline constexpr std::size_t kBootstrapReps = 20;
inline constexpr std::uint64_t kBootstrapSeed = 7;

enum class BaselineMode { causal, global };

inline BaselineMode parse_baseline_mode(std::string_view s) {
  if (s == "causal") return BaselineMode::causal;
  if (s == "global") return BaselineMode::global;
  throw ValidationError("unknown baseline mode '" + std::string(s) + "'");
}

inline std::string_view to_string(BaselineMode m) { return m == BaselineMode::causal ? "causal" : "global"; }

struct FeatureVector {
  LabeledInterval interval;
  double P = 1;   // mean positivity over the lookback window, in [1, 5]
  double N = -1;  // mean negativity over the lookback window, in [-5, -1]
  std::optional<double> baseline_P;
  std::optional<double> baseline_N;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

namespace detail {

struct AuthorScores {
  std::vector<Timestamp> ts;
  std::vector<std::int64_t> cum_p{0};  // prefix sums, cum[i] = sum of the first i scores
  std::vector<std::int64_t> cum_n{0};
};

inline std::map<std::string, AuthorScores> scores_by_author(const Corpus& corpus) {
  std::map<std::string, AuthorScores> out;
  for (const auto& m : corpus.messages()) {
    auto& a = out[m.author];
    a.ts.push_back(m.ts);
    a.cum_p.push_back(a.cum_p.back() + m.score->p);
    a.cum_n.push_back(a.cum_n.back() + m.score->n);
  }
  return out;
}

inline double range_mean(const std::vector<std::int64_t>& cum, std::size_t lo, std::size_t hi) {
  return static_cast<double>(cum[hi] - cum[lo]) / static_cast<double>(hi - lo);
}

}  // namespace detail

/// For each interval opened at time t by author u: means of p and n over u's
/// messages with timestamps in [t - lookback_days, t], and the baselines
/// (means over u's messages up to t, or over all of u's messages in global mode).
inline std::vector<FeatureVector> extract_features(const Corpus& corpus,
                                                   const std::vector<LabeledInterval>& intervals,
                                                   int lookback_days = kLookbackDays,
                                                   BaselineMode baseline = BaselineMode::causal) {
  corpus.require_scored("extract_features");
  if (lookback_days < 0) throw ContractViolation("extract_features: lookback_days must be >= 0");
  const auto by_author = detail::scores_by_author(corpus);
  const Timestamp lookback = static_cast<Timestamp>(lookback_days) * kDay;
  std::vector<FeatureVector> out;
  out.reserve(intervals.size());
  for (const auto& iv : intervals) {
    auto it = by_author.find(iv.author);
    if (it == by_author.end()) throw ContractViolation("extract_features: unknown author '" + iv.author + "'");
    const auto& a = it->second;
    const auto end = static_cast<std::size_t>(std::upper_bound(a.ts.begin(), a.ts.end(), iv.start_time) - a.ts.begin());
    const auto begin = static_cast<std::size_t>(
        std::lower_bound(a.ts.begin(), a.ts.end(), iv.start_time - lookback) - a.ts.begin());
    if (end == 0 || a.ts[end - 1] != iv.start_time)
      throw ContractViolation("extract_features: no message of '" + iv.author + "' at interval start");
    FeatureVector f{iv, detail::range_mean(a.cum_p, begin, end), detail::range_mean(a.cum_n, begin, end), {}, {}};
    const std::size_t upto = baseline == BaselineMode::causal ? end : a.ts.size();
    f.baseline_P = detail::range_mean(a.cum_p, 0, upto);
    f.baseline_N = detail::range_mean(a.cum_n, 0, upto);
    out.push_back(std::move(f));
  }
  return out;
}

inline nlohmann::ordered_json feature_to_json(const FeatureVector& f) {
  auto j = interval_to_json(f.interval);
  j["P"] = f.P;
  j["N"] = f.N;
  if (f.baseline_P) j["P_bar"] = *f.baseline_P;
  if (f.baseline_N) j["N_bar"] = *f.baseline_N;
  return j;
}

inline FeatureVector feature_from_json(const nlohmann::json& j) {
  FeatureVector f{interval_from_json(j), j.at("P").get<double>(), j.at("N").get<double>(), {}, {}};
  if (j.contains("P_bar")) f.baseline_P = j["P_bar"].get<double>();
  if (j.contains("N_bar")) f.baseline_N = j["N_bar"].get<double>();
  if (f.P < 1 || f.P > 5 || f.N < -5 || f.N > -1) throw ValidationError("feature values out of range");
  return f;
}

inline void write_features_jsonl(std::ostream& out, const std::vector<FeatureVector>& fs) {
  for (const auto& f : fs) out << feature_to_json(f).dump() << '\n';
}

inline std::vector<FeatureVector> read_features_jsonl(std::istream& in) {
  std::vector<FeatureVector> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(feature_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw ValidationError("features line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

enum class Feature { positivity, negativity };

inline std::string_view to_string(Feature f) { return f == Feature::positivity ? "P" : "N"; }

inline double feature_value(const FeatureVector& f, Feature which) {
  return which == Feature::positivity ? f.P : f.N;
}

inline const stats::Grid kPositivityGrid{1.0, 5.0, 0.01};
inline const stats::Grid kNegativityGrid{-5.0, -1.0, 0.01};

inline std::vector<double> feature_values(const std::vector<FeatureVector>& fs, Feature which,
                                          std::optional<ActivityLabel> label = std::nullopt) {
  std::vector<double> out;
  for (const auto& f : fs)
    if (!label || f.interval.label == *label) out.push_back(feature_value(f, which));
  return out;
}

struct ConditionalDensities {
  stats::Density P_act, P_ina, N_act, N_ina;
};

inline ConditionalDensities conditional_densities(const std::vector<FeatureVector>& fs,
                                                  double bandwidth = kBandwidth) {
  auto kde = [&](Feature which, ActivityLabel label) {
    const auto xs = feature_values(fs, which, label);
    if (xs.empty())
      throw UndefinedError("conditional_densities: no " + std::string(to_string(label)) + " intervals");
    return stats::gaussian_kde(xs, bandwidth, which == Feature::positivity ? kPositivityGrid : kNegativityGrid);
  };
  return {kde(Feature::positivity, ActivityLabel::ACT), kde(Feature::positivity, ActivityLabel::INA),
          kde(Feature::negativity, ActivityLabel::ACT), kde(Feature::negativity, ActivityLabel::INA)};
}

struct ConditionalTests {
  stats::TestResult P;
  stats::TestResult N;
};

/// Rank-sum test of ACT against INA feature values, two-sided.
inline ConditionalTests wilcoxon_conditionals(const std::vector<FeatureVector>& fs) {
  auto test = [&](Feature which) {
    const auto act = feature_values(fs, which, ActivityLabel::ACT);
    const auto ina = feature_values(fs, which, ActivityLabel::INA);
    if (act.empty() || ina.empty()) throw UndefinedError("wilcoxon_conditionals: both labels must be present");
    return stats::wilcoxon_rank_sum(act, ina, stats::Alternative::two_sided);
  };
  return {test(Feature::positivity), test(Feature::negativity)};
}

// ---------------------------------------------------------------------------

struct PosteriorBin {
  double lo = 0;  // magnitude range [lo, hi), last bin closed
  double hi = 0;
  std::uint64_t total = 0;
  std::uint64_t inactive = 0;
  std::optional<double> estimate;  // empty when the bin has no support
  std::optional<stats::Interval> ci;

  bool supported() const { return total > 0; }
};

struct FeaturePosterior {
  Feature feature = Feature::negativity;
  std::vector<PosteriorBin> bins;
};

/// Bin index of a feature magnitude in [1, 5] split into `bins` equal bins.
inline std::size_t magnitude_bin(double value, std::size_t bins) {
  const double m = std::clamp(std::abs(value), 1.0, 5.0);
  const auto i = static_cast<std::size_t>(std::floor((m - 1.0) / 4.0 * static_cast<double>(bins)));
  return std::min(i, bins - 1);
}

/// Empirical P(INA | feature magnitude in bin) with 95% Wilson intervals.
inline FeaturePosterior posterior_for(const std::vector<FeatureVector>& fs, Feature which,
                                      std::size_t bins = kPosteriorBins) {
  if (bins < 2) throw ContractViolation("posterior: bins must be >= 2");
  if (fs.empty()) throw UndefinedError("posterior: no features");
  FeaturePosterior post{which, {}};
  for (std::size_t i = 0; i < bins; ++i) {
    PosteriorBin b;
    b.lo = 1.0 + 4.0 * static_cast<double>(i) / static_cast<double>(bins);
    b.hi = 1.0 + 4.0 * static_cast<double>(i + 1) / static_cast<double>(bins);
    post.bins.push_back(b);
  }
  for (const auto& f : fs) {
    auto& b = post.bins[magnitude_bin(feature_value(f, which), bins)];
    ++b.total;
    if (f.interval.label == ActivityLabel::INA) ++b.inactive;
  }
  for (auto& b : post.bins) {
    if (!b.supported()) continue;
    b.estimate = static_cast<double>(b.inactive) / static_cast<double>(b.total);
    b.ci = stats::wilson_interval(b.inactive, b.total);
  }
  return post;
}

struct PosteriorPair {
  FeaturePosterior P;
  FeaturePosterior N;
};

inline PosteriorPair posterior_inactive(const std::vector<FeatureVector>& fs, std::size_t bins = kPosteriorBins) {
  return {posterior_for(fs, Feature::positivity, bins), posterior_for(fs, Feature::negativity, bins)};
}

/// Support-weighted mean of the bin estimates; equals the INA prior.
inline double posterior_total_probability(const FeaturePosterior& post) {
  double num = 0, den = 0;
  for (const auto& b : post.bins) {
    if (!b.supported()) continue;
    num += static_cast<double>(b.total) * *b.estimate;
    den += static_cast<double>(b.total);
  }
  if (den == 0) throw UndefinedError("posterior_total_probability: no supported bins");
  return num / den;
}

// ---------------------------------------------------------------------------

enum class PredictMode { absolute, deviation };

inline std::string_view to_string(PredictMode m) { return m == PredictMode::absolute ? "absolute" : "deviation"; }

inline PredictMode parse_predict_mode(std::string_view s) {
  if (s == "absolute") return PredictMode::absolute;
  if (s == "deviation") return PredictMode::deviation;
  throw ValidationError("unknown predict mode '" + std::string(s) + "'");
}

inline double default_theta(PredictMode m) { return m == PredictMode::absolute ? kThetaAbsolute : kThetaDeviation; }

/// absolute: INA iff |N| > theta or |P| > theta.
/// deviation: INA iff |N - N_bar| > theta or |P - P_bar| > theta.
inline ActivityLabel predict_one(const FeatureVector& f, PredictMode mode, double theta) {
  if (mode == PredictMode::absolute)
    return std::abs(f.N) > theta || std::abs(f.P) > theta ? ActivityLabel::INA : ActivityLabel::ACT;
  if (!f.baseline_P || !f.baseline_N) throw ContractViolation("predict: deviation mode requires baselines");
  return std::abs(f.N - *f.baseline_N) > theta || std::abs(f.P - *f.baseline_P) > theta ? ActivityLabel::INA
                                                                                       : ActivityLabel::ACT;
}

inline std::vector<ActivityLabel> predict(const std::vector<FeatureVector>& fs, PredictMode mode, double theta) {
  std::vector<ActivityLabel> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(predict_one(f, mode, theta));
  return out;
}

struct ChurnModel {
  PredictMode mode = PredictMode::absolute;
  double theta = kThetaAbsolute;
  int lookback_days = kLookbackDays;
  double bandwidth = kBandwidth;
  double prior_ina = 0;
  std::size_t n_features = 0;
  ConditionalDensities densities;
  PosteriorPair posterior;
};

/// Fits densities and posteriors. Requires both labels to be present.
inline ChurnModel fit_model(const std::vector<FeatureVector>& fs, PredictMode mode, double theta,
                            double bandwidth = kBandwidth, std::size_t bins = kPosteriorBins,
                            int lookback_days = kLookbackDays) {
  if (fs.empty()) throw UndefinedError("fit_model: no features");
  ChurnModel m;
  m.mode = mode;
  m.theta = theta;
  m.lookback_days = lookback_days;
  m.bandwidth = bandwidth;
  m.n_features = fs.size();
  const auto ina = std::count_if(fs.begin(), fs.end(),
                                 [](const FeatureVector& f) { return f.interval.label == ActivityLabel::INA; });
  m.prior_ina = static_cast<double>(ina) / static_cast<double>(fs.size());
  m.densities = conditional_densities(fs, bandwidth);
  m.posterior = posterior_inactive(fs, bins);
  return m;
}

/// Posterior estimate for a feature value; empty for unsupported bins.
inline std::optional<double> posterior_lookup(const FeaturePosterior& post, double value) {
  return post.bins[magnitude_bin(value, post.bins.size())].estimate;
}

namespace detail {

inline nlohmann::ordered_json density_json(const stats::Density& d, const stats::Grid& g) {
  nlohmann::ordered_json j;
  j["lo"] = g.lo;
  j["hi"] = g.hi;
  j["step"] = g.step;
  j["values"] = d.values;
  return j;
}

inline stats::Density density_from(const nlohmann::json& j) {
  stats::Density d;
  d.grid = stats::grid_points({j.at("lo").get<double>(), j.at("hi").get<double>(), j.at("step").get<double>()});
  d.values = j.at("values").get<std::vector<double>>();
  if (d.values.size() != d.grid.size()) throw ValidationError("density: grid and values differ in length");
  return d;
}

inline nlohmann::ordered_json posterior_json(const FeaturePosterior& p) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& b : p.bins) {
    nlohmann::ordered_json j;
    j["lo"] = b.lo;
    j["hi"] = b.hi;
    j["total"] = b.total;
    j["inactive"] = b.inactive;
    if (b.supported()) {
      j["estimate"] = *b.estimate;
      j["ci_lo"] = b.ci->lo;
      j["ci_hi"] = b.ci->hi;
    } else {
      j["unsupported"] = true;
    }
    arr.push_back(j);
  }
  return arr;
}

inline FeaturePosterior posterior_from(const nlohmann::json& arr, Feature f) {
  FeaturePosterior p{f, {}};
  for (const auto& j : arr) {
    PosteriorBin b;
    b.lo = j.at("lo").get<double>();
    b.hi = j.at("hi").get<double>();
    b.total = j.at("total").get<std::uint64_t>();
    b.inactive = j.at("inactive").get<std::uint64_t>();
    if (b.inactive > b.total) throw ValidationError("posterior bin: inactive > total");
    if (b.supported()) {
      b.estimate = j.at("estimate").get<double>();
      b.ci = stats::Interval{j.at("ci_lo").get<double>(), j.at("ci_hi").get<double>()};
    }
    p.bins.push_back(b);
  }
  if (p.bins.size() < 2) throw ValidationError("posterior: fewer than 2 bins");
  return p;
}

}  // namespace detail

inline nlohmann::ordered_json model_to_json(const ChurnModel& m) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(m.mode);
  j["theta"] = m.theta;
  j["lookback_days"] = m.lookback_days;
  j["bandwidth"] = m.bandwidth;
  j["prior_ina"] = m.prior_ina;
  j["n_features"] = m.n_features;
  j["posterior"]["P"] = detail::posterior_json(m.posterior.P);
  j["posterior"]["N"] = detail::posterior_json(m.posterior.N);
  auto& d = j["densities"];
  d["P_ACT"] = detail::density_json(m.densities.P_act, kPositivityGrid);
  d["P_INA"] = detail::density_json(m.densities.P_ina, kPositivityGrid);
  d["N_ACT"] = detail::density_json(m.densities.N_act, kNegativityGrid);
  d["N_INA"] = detail::density_json(m.densities.N_ina, kNegativityGrid);
  return j;
}

inline ChurnModel model_from_json(const nlohmann::json& j) {
  try {
    ChurnModel m;
    m.mode = parse_predict_mode(j.at("mode").get<std::string>());
    m.theta = j.at("theta").get<double>();
    m.lookback_days = j.value("lookback_days", kLookbackDays);
    m.bandwidth = j.value("bandwidth", kBandwidth);
    m.prior_ina = j.at("prior_ina").get<double>();
    m.n_features = j.value("n_features", std::size_t{0});
    m.posterior.P = detail::posterior_from(j.at("posterior").at("P"), Feature::positivity);
    m.posterior.N = detail::posterior_from(j.at("posterior").at("N"), Feature::negativity);
    if (j.contains("densities")) {
      const auto& d = j["densities"];
      m.densities = {detail::density_from(d.at("P_ACT")), detail::density_from(d.at("P_INA")),
                     detail::density_from(d.at("N_ACT")), detail::density_from(d.at("N_INA"))};
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

struct ClassCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0;

  std::optional<double> precision() const {
    if (tp + fp == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  std::optional<double> recall() const {
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
};

/// Confusion counts for `cls` over the pairs selected by `idx`.
inline ClassCounts confusion(const std::vector<ActivityLabel>& pred, const std::vector<ActivityLabel>& truth,
                             ActivityLabel cls, const std::vector<std::size_t>& idx) {
  ClassCounts c;
  for (auto i : idx) {
    const bool p = pred[i] == cls, t = truth[i] == cls;
    c.tp += p && t;
    c.fp += p && !t;
    c.fn += !p && t;
  }
  return c;
}

struct ClassReport {
  ActivityLabel label = ActivityLabel::ACT;
  double prior = 0;
  stats::MeanStd precision;
  stats::MeanStd recall;
  std::size_t precision_excluded = 0;  // replicates where the class was never predicted
  std::size_t recall_excluded = 0;     // replicates where the class never occurred
};

struct PrecisionRecallReport {
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  ClassReport act;
  ClassReport ina;
};

/// Precision and recall per class over explicit resamples of (pred, truth) pairs.
inline PrecisionRecallReport evaluate_resamples(const std::vector<ActivityLabel>& pred,
                                                const std::vector<ActivityLabel>& truth,
                                                const std::vector<std::vector<std::size_t>>& resamples) {
  if (pred.size() != truth.size()) throw ContractViolation("evaluate: predicted and truth lengths differ");
  if (truth.empty()) throw ContractViolation("evaluate: no pairs");
  PrecisionRecallReport r;
  r.reps = resamples.size();
  const auto ina = std::count(truth.begin(), truth.end(), ActivityLabel::INA);
  const double prior_ina = static_cast<double>(ina) / static_cast<double>(truth.size());
  auto one = [&](ActivityLabel cls, double prior) {
    ClassReport cr;
    cr.label = cls;
    cr.prior = prior;
    std::vector<double> ps, rs;
    for (const auto& idx : resamples) {
      const auto c = confusion(pred, truth, cls, idx);
      if (auto p = c.precision()) ps.push_back(*p);
      else ++cr.precision_excluded;
      if (auto q = c.recall()) rs.push_back(*q);
      else ++cr.recall_excluded;
    }
    cr.precision = stats::mean_std(ps);
    cr.recall = stats::mean_std(rs);
    return cr;
  };
  r.act = one(ActivityLabel::ACT, 1 - prior_ina);
  r.ina = one(ActivityLabel::INA, prior_ina);
  return r;
}

/// Bootstrap evaluation: `reps` resamples with replacement, replicate r seeded with seed + r.
inline PrecisionRecallReport evaluate(const std::vector<ActivityLabel>& pred, const std::vector<ActivityLabel>& truth,
                                      std::size_t reps = kBootstrapReps, std::uint64_t seed = kBootstrapSeed,
                                      unsigned jobs = 1) {
  if (pred.size() != truth.size()) throw ContractViolation("evaluate: predicted and truth lengths differ");
  if (truth.empty()) throw ContractViolation("evaluate: no pairs");
  if (reps < 1) throw ContractViolation("evaluate: reps must be >= 1");
  std::vector<std::vector<std::size_t>> resamples(reps);
  auto run = [&](std::size_t begin, std::size_t step) {
    for (auto r = begin; r < reps; r += step) resamples[r] = stats::bootstrap_sample(truth.size(), seed, r);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(reps)));
  if (jobs == 1) run(0, 1);
  else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(run, j, jobs);
  }
  auto rep = evaluate_resamples(pred, truth, resamples);
  rep.seed = seed;
  return rep;
}

inline nlohmann::ordered_json report_to_json(const PrecisionRecallReport& r) {
  nlohmann::ordered_json j;
  j["reps"] = r.reps;
  j["seed"] = r.seed;
  for (const auto* c : {&r.act, &r.ina}) {
    auto& k = j["classes"][std::string(to_string(c->label))];
    k["prior"] = c->prior;
    k["precision_mean"] = c->precision.mean;
    k["precision_std"] = c->precision.std;
    k["recall_mean"] = c->recall.mean;
    k["recall_std"] = c->recall.std;
    k["precision_excluded"] = c->precision_excluded;
    k["recall_excluded"] = c->recall_excluded;
  }
  return j;
}

struct SweepPoint {
  double theta = 0;
  std::optional<double> precision_ina;
  std::optional<double> recall_ina;
};

/// INA precision and recall over the full sample for each threshold. Selects nothing.
inline std::vector<SweepPoint> sweep_thresholds(const std::vector<FeatureVector>& fs, PredictMode mode,
                                                const std::vector<double>& thetas) {
  std::vector<ActivityLabel> truth;
  truth.reserve(fs.size());
  for (const auto& f : fs) truth.push_back(f.interval.label);
  std::vector<std::size_t> all(fs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<SweepPoint> out;
  for (double th : thetas) {
    const auto c = confusion(predict(fs, mode, th), truth, ActivityLabel::INA, all);
    out.push_back({th, c.precision(), c.recall()});
  }
  return out;
}

// ---------------------------------------------------------------------------

struct Prediction {
  std::string author;
  Timestamp t = 0;
  ActivityLabel label = ActivityLabel::ACT;
};

inline void write_predictions_jsonl(std::ostream& out, const std::vector<FeatureVector>& fs,
                                    const std::vector<ActivityLabel>& labels) {
  for (std::size_t i = 0; i < fs.size(); ++i) {
    nlohmann::ordered_json j;
    j["author"] = fs[i].interval.author;
    j["t"] = fs[i].interval.start_time;
    j["predicted"] = to_string(labels[i]);
    out << j.dump() << '\n';
  }
}

inline std::vector<Prediction> read_predictions_jsonl(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("author").get<std::string>(), j.at("t").get<Timestamp>(),
                     parse_activity_label(j.at("predicted").get<std::string>())});
    } catch (const std::exception& e) {
      throw ValidationError("predictions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

/// Pairs predictions with truth intervals by (author, start time).
inline std::pair<std::vector<ActivityLabel>, std::vector<ActivityLabel>> align_predictions(
    const std::vector<Prediction>& preds, const std::vector<LabeledInterval>& truth) {
  std::map<std::pair<std::string, Timestamp>, ActivityLabel> by_key;
  for (const auto& iv : truth) by_key[{iv.author, iv.start_time}] = iv.label;
  std::pair<std::vector<ActivityLabel>, std::vector<ActivityLabel>> out;
  for (const auto& p : preds) {
    auto it = by_key.find({p.author, p.t});
    if (it == by_key.end())
      throw ContractViolation("evaluate: no truth interval for " + p.author + " at " + std::to_string(p.t));
    out.first.push_back(p.label);
    out.second.push_back(it->second);
  }
  if (out.first.size() != truth.size()) throw ContractViolation("evaluate: predicted and truth lengths differ");
  return out;
}

}  // namespace ossmood
