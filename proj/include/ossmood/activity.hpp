#pragma once

// Per-contributor activity: timelines, interevent times, the distribution of
// maximum interevent times and ACT/INA interval labeling.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "ossmood/corpus.hpp"
#include "ossmood/stats.hpp"

namespace ossmood {

struct ContributorTimeline {
  std::string author;
  std::vector<Timestamp> times;  // strictly increasing
  Channel channel = Channel::bug_tracker;
};

/// One timeline per author, sorted by author. Identical timestamps of one
/// author collapse into a single event.
inline std::vector<ContributorTimeline> build_timelines(const Corpus& corpus) {
  std::map<std::string, std::vector<Timestamp>> by_author;
  for (const auto& m : corpus.messages()) by_author[m.author].push_back(m.ts);
  std::vector<ContributorTimeline> out;
  out.reserve(by_author.size());
  for (auto& [author, times] : by_author) {
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    out.push_back({author, std::move(times), corpus.channel()});
  }
  return out;
}

/// Gaps between consecutive events in days; empty optional marks a one-time
/// contributor.
inline std::optional<std::vector<double>> interevent_times(const ContributorTimeline& t) {
  if (t.times.size() < 2) return std::nullopt;
  std::vector<double> gaps;
  gaps.reserve(t.times.size() - 1);
  for (std::size_t i = 1; i < t.times.size(); ++i) gaps.push_back(seconds_to_days(t.times[i] - t.times[i - 1]));
  return gaps;
}

enum class ActivityLabel { ACT, INA };

inline std::string_view to_string(ActivityLabel l) { return l == ActivityLabel::ACT ? "ACT" : "INA"; }

inline ActivityLabel parse_activity_label(std::string_view s) {
  if (s == "ACT") return ActivityLabel::ACT;
  if (s == "INA") return ActivityLabel::INA;
  throw ValidationError("unknown interval label '" + std::string(s) + "'");
}

inline constexpr int kInactivityDays = 30;

struct LabeledInterval {
  std::string author;
  Timestamp start_time = 0;  // time of the message opening the interval
  double gap_days = 0;
  ActivityLabel label = ActivityLabel::ACT;

  friend bool operator==(const LabeledInterval&, const LabeledInterval&) = default;
};

/// One interval per event except the last: ACT when the gap to the next
/// event is shorter than threshold_days, INA otherwise.
inline std::vector<LabeledInterval> label_intervals(const ContributorTimeline& t,
                                                    int threshold_days = kInactivityDays) {
  if (t.times.size() < 2) throw ContractViolation("label_intervals: one-time contributor '" + t.author + "'");
  if (threshold_days < 1) throw ContractViolation("label_intervals: threshold_days must be >= 1");
  const Timestamp threshold = static_cast<Timestamp>(threshold_days) * kDay;
  std::vector<LabeledInterval> out;
  out.reserve(t.times.size() - 1);
  for (std::size_t i = 0; i + 1 < t.times.size(); ++i) {
    const Timestamp gap = t.times[i + 1] - t.times[i];
    out.push_back({t.author, t.times[i], seconds_to_days(gap),
                   gap < threshold ? ActivityLabel::ACT : ActivityLabel::INA});
  }
  return out;
}

struct LabeledCorpus {
  std::vector<LabeledInterval> intervals;  // grouped by author, chronological within author
  std::size_t one_time_contributors = 0;
};

/// Labels the intervals of every contributor, discarding one-time contributors.
inline LabeledCorpus label_corpus(const Corpus& corpus, int threshold_days = kInactivityDays) {
  LabeledCorpus out;
  for (const auto& t : build_timelines(corpus)) {
    if (t.times.size() < 2) {
      ++out.one_time_contributors;
      continue;
    }
    auto iv = label_intervals(t, threshold_days);
    out.intervals.insert(out.intervals.end(), iv.begin(), iv.end());
  }
  return out;
}

inline double ina_prior(const std::vector<LabeledInterval>& intervals) {
  if (intervals.empty()) throw UndefinedError("ina_prior: no intervals");
  const auto ina = std::count_if(intervals.begin(), intervals.end(),
                                 [](const LabeledInterval& i) { return i.label == ActivityLabel::INA; });
  return static_cast<double>(ina) / static_cast<double>(intervals.size());
}

inline nlohmann::ordered_json interval_to_json(const LabeledInterval& iv) {
  nlohmann::ordered_json j;
  j["author"] = iv.author;
  j["t"] = iv.start_time;
  j["gap_days"] = iv.gap_days;
  j["label"] = to_string(iv.label);
  return j;
}

inline LabeledInterval interval_from_json(const nlohmann::json& j) {
  return {j.at("author").get<std::string>(), j.at("t").get<Timestamp>(),
          j.at("gap_days").get<double>(), parse_activity_label(j.at("label").get<std::string>())};
}

inline void write_intervals_jsonl(std::ostream& out, const std::vector<LabeledInterval>& intervals) {
  for (const auto& iv : intervals) out << interval_to_json(iv).dump() << '\n';
}

inline std::vector<LabeledInterval> read_intervals_jsonl(std::istream& in) {
  std::vector<LabeledInterval> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(interval_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw ValidationError("intervals line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

inline constexpr unsigned kBinsPerDecade = 5;

struct MaxIntereventAnalysis {
  std::vector<double> tau_max;  // days, one per contributor with >= 2 events
  stats::Histogram histogram;
  stats::PowerLawFit fit;       // truncated MLE on [xmin, boundary_hint]
  double fit_weight = 0;        // share of tau_max samples used by the fit
  double boundary_days = 0;
  bool boundary_detected = false;
};

/// Fitted power-law density averaged over [a, b], scaled by the fit's share of samples.
inline double fitted_bin_density(const MaxIntereventAnalysis& a, double lo, double hi) {
  constexpr int kSteps = 16;
  double s = 0;
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < kSteps; ++i) {
    const double x = std::exp(llo + (lhi - llo) * (i + 0.5) / kSteps);
    // Integrate pdf(x) dx in log space: pdf(x) * x d(ln x).
    s += stats::powerlaw_pdf(a.fit, x) * x * (lhi - llo) / kSteps;
  }
  return a.fit_weight * s / (hi - lo);
}

/// Distribution of each contributor's longest gap: log-binned histogram, a
/// power-law fit on [xmin, boundary_hint], and the boundary between the
/// bursty head and the fast-decaying tail. The boundary is the lower edge of
/// the first bin at or above xmin from which the empirical density stays
/// below half the fitted density; boundary_hint when no such bin exists.
inline MaxIntereventAnalysis max_interevent_analysis(const std::vector<ContributorTimeline>& timelines,
                                                     double xmin_days, double boundary_hint_days,
                                                     unsigned bins_per_decade = kBinsPerDecade) {
  MaxIntereventAnalysis a;
  for (const auto& t : timelines) {
    if (auto gaps = interevent_times(t)) a.tau_max.push_back(*std::max_element(gaps->begin(), gaps->end()));
  }
  if (a.tau_max.size() < 10)
    throw InsufficientDataError("max_interevent_analysis: need >= 10 contributors with >= 2 events, have " +
                                std::to_string(a.tau_max.size()));
  a.histogram = stats::log_binned_histogram(a.tau_max, bins_per_decade);
  a.fit = stats::powerlaw_mle_truncated(a.tau_max, xmin_days, boundary_hint_days);
  a.fit_weight = static_cast<double>(a.fit.n_used) / static_cast<double>(a.tau_max.size());
  a.boundary_days = boundary_hint_days;
  const auto& h = a.histogram;
  std::optional<std::size_t> start;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    if (h.bin_edges[i] < xmin_days) continue;
    const bool below = h.densities[i] < 0.5 * fitted_bin_density(a, h.bin_edges[i], h.bin_edges[i + 1]);
    if (below && !start) start = i;
    if (!below) start.reset();
  }
  if (start) {
    a.boundary_days = h.bin_edges[*start];
    a.boundary_detected = true;
  }
  return a;
}

inline void write_histogram_csv(std::ostream& out, const stats::Histogram& h) {
  out << "bin_lo,bin_hi,count,density\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << fmt::format("{:.6g},{:.6g},{},{:.6g}\n", h.bin_edges[i], h.bin_edges[i + 1], h.counts[i], h.densities[i]);
}

inline nlohmann::ordered_json activity_sidecar(const MaxIntereventAnalysis& a, const LabeledCorpus& lc) {
  nlohmann::ordered_json j;
  j["contributors_with_gaps"] = a.tau_max.size();
  j["one_time_contributors"] = lc.one_time_contributors;
  j["alpha"] = a.fit.alpha;
  j["fit_xmin_days"] = a.fit.xmin;
  j["fit_xmax_days"] = a.fit.xmax;
  j["fit_n_used"] = a.fit.n_used;
  j["boundary_days"] = a.boundary_days;
  j["boundary_detected"] = a.boundary_detected;
  j["intervals"] = lc.intervals.size();
  j["ina_prior"] = lc.intervals.empty() ? 0.0 : ina_prior(lc.intervals);
  return j;
}

}  // namespace ossmood
