#pragma once

// Collective emotions of discussions: community baselines, ratio/ternary
// coordinates, the three-test discussion classifier, the moving-average
// emotion series and cross-partition proportion comparisons.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "ossmood/corpus.hpp"
#include "ossmood/stats.hpp"

namespace ossmood {

enum class EmotionClass { neutral, underemotional, positive, negative, bipolar, undetermined };

inline constexpr std::array kEmotionClasses = {
    EmotionClass::neutral,  EmotionClass::underemotional, EmotionClass::positive,
    EmotionClass::negative, EmotionClass::bipolar,        EmotionClass::undetermined};

inline std::string_view to_string(EmotionClass c) {
  switch (c) {
    case EmotionClass::neutral: return "neutral";
    case EmotionClass::underemotional: return "underemotional";
    case EmotionClass::positive: return "positive";
    case EmotionClass::negative: return "negative";
    case EmotionClass::bipolar: return "bipolar";
    case EmotionClass::undetermined: return "undetermined";
  }
  return "?";
}

inline EmotionClass parse_emotion_class(std::string_view s) {
  for (auto c : kEmotionClasses)
    if (to_string(c) == s) return c;
  throw ValidationError("unknown emotion class '" + std::string(s) + "'");
}

struct PolarityCounts {
  std::uint64_t positive = 0;
  std::uint64_t negative = 0;
  std::uint64_t neutral = 0;

  std::uint64_t total() const { return positive + negative + neutral; }

  /// Counts one scored message; discarded polarity is ignored.
  void add(Polarity p) {
    if (p == Polarity::positive) ++positive;
    else if (p == Polarity::negative) ++negative;
    else if (p == Polarity::neutral) ++neutral;
  }

  friend bool operator==(const PolarityCounts&, const PolarityCounts&) = default;
};

struct BaselineRatios {
  double positive = 0;
  double negative = 0;
  double neutral = 0;
};

/// Overall message ratios per polarity for the channel.
inline BaselineRatios compute_baseline(const Corpus& corpus) {
  corpus.require_scored("compute_baseline");
  PolarityCounts c;
  for (const auto& m : corpus.messages()) c.add(m.score->polarity);
  if (c.total() == 0) throw UndefinedError("compute_baseline: no non-discarded messages");
  const double t = static_cast<double>(c.total());
  return {c.positive / t, c.negative / t, c.neutral / t};
}

struct Discussion {
  std::string id;
  std::vector<Message> messages;  // scored, discarded polarity excluded
  PolarityCounts counts;
};

/// Groups a scored corpus by discussion id (sorted by id), dropping discarded messages.
inline std::vector<Discussion> group_discussions(const Corpus& corpus) {
  corpus.require_scored("group_discussions");
  std::map<std::string, Discussion> by_id;
  for (const auto& m : corpus.messages()) {
    if (m.score->polarity == Polarity::discarded) continue;
    auto& d = by_id[m.discussion];
    d.id = m.discussion;
    d.messages.push_back(m);
    d.counts.add(m.score->polarity);
  }
  std::vector<Discussion> out;
  out.reserve(by_id.size());
  for (auto& [id, d] : by_id) out.push_back(std::move(d));
  return out;
}

struct DiscussionRatios {
  double positive = 0;  // P_d
  double negative = 0;  // N_d
  double neutral = 0;   // U_d
  double x = 0;         // ternary plot coordinates
  double y = 0;
};

/// Ratios and barycentric embedding: positive corner (0,0), negative corner
/// (1,0), neutral corner (1/2, sqrt(3)/2).
inline DiscussionRatios discussion_ratios(const PolarityCounts& c) {
  if (c.total() == 0) throw UndefinedError("discussion_ratios: empty discussion");
  const double t = static_cast<double>(c.total());
  DiscussionRatios r{c.positive / t, c.negative / t, c.neutral / t, 0, 0};
  r.x = r.negative + r.neutral / 2;
  r.y = std::sqrt(3.0) / 2 * r.neutral;
  return r;
}

inline DiscussionRatios discussion_ratios(const Discussion& d) { return discussion_ratios(d.counts); }

inline constexpr double kDefaultAlpha = 0.05;
inline constexpr std::size_t kDefaultMinMessages = 20;

struct ProportionCheck {
  stats::TestResult test;  // two-sided
  double directional_p = 1;  // half the two-sided p, reported with the observed direction
  bool rejected = false;
  bool above = false;  // observed ratio > baseline
};

struct Classification {
  std::optional<EmotionClass> label;
  std::string skip_reason;  // set when label is empty
  std::optional<ProportionCheck> neutral_test, positive_test, negative_test;
};

namespace detail {

inline ProportionCheck check_proportion(std::uint64_t k, std::uint64_t n, double p0, double alpha) {
  ProportionCheck c;
  const double observed = static_cast<double>(k) / static_cast<double>(n);
  c.above = observed > p0;
  if (p0 <= 0 || p0 >= 1) {
    // Degenerate baseline: any deviation is impossible under the null.
    c.test.estimate = observed - p0;
    c.test.p_value = observed == p0 ? 1.0 : 0.0;
  } else {
    c.test = stats::one_proportion_test(k, n, p0, stats::Alternative::two_sided);
  }
  c.directional_p = c.test.p_value / 2;
  c.rejected = c.test.p_value < alpha;
  return c;
}

}  // namespace detail

/// Three-test procedure against the baseline. Test 1 (neutral ratio): not
/// rejected -> neutral; rejected above -> underemotional; rejected below ->
/// Tests 2 and 3 decide positive / negative / bipolar / undetermined.
inline Classification classify_discussion(const PolarityCounts& counts, const BaselineRatios& base,
                                          double alpha = kDefaultAlpha,
                                          std::size_t min_messages = kDefaultMinMessages) {
  Classification out;
  const auto n = counts.total();
  if (n == 0 || n < min_messages) {
    out.skip_reason = fmt::format("fewer than {} messages ({})", std::max<std::size_t>(min_messages, 1), n);
    return out;
  }
  out.neutral_test = detail::check_proportion(counts.neutral, n, base.neutral, alpha);
  if (!out.neutral_test->rejected) {
    out.label = EmotionClass::neutral;
    return out;
  }
  if (out.neutral_test->above) {
    out.label = EmotionClass::underemotional;
    return out;
  }
  out.positive_test = detail::check_proportion(counts.positive, n, base.positive, alpha);
  out.negative_test = detail::check_proportion(counts.negative, n, base.negative, alpha);
  const bool pos = out.positive_test->rejected && out.positive_test->above;
  const bool neg = out.negative_test->rejected && out.negative_test->above;
  out.label = pos && neg ? EmotionClass::bipolar
            : pos        ? EmotionClass::positive
            : neg        ? EmotionClass::negative
                         : EmotionClass::undetermined;
  return out;
}

inline Classification classify_discussion(const Discussion& d, const BaselineRatios& base,
                                          double alpha = kDefaultAlpha,
                                          std::size_t min_messages = kDefaultMinMessages) {
  return classify_discussion(d.counts, base, alpha, min_messages);
}

struct DiscussionResult {
  std::string id;
  PolarityCounts counts;
  DiscussionRatios ratios;
  Classification classification;
};

struct CorpusClassification {
  std::vector<DiscussionResult> discussions;  // every discussion, classified or skipped
  std::map<EmotionClass, std::size_t> frequencies;
  std::size_t classified = 0;
  std::size_t skipped = 0;
};

inline CorpusClassification classify_corpus(const Corpus& corpus, const BaselineRatios& base,
                                            double alpha = kDefaultAlpha,
                                            std::size_t min_messages = kDefaultMinMessages) {
  CorpusClassification out;
  for (auto& d : group_discussions(corpus)) {
    DiscussionResult r{d.id, d.counts, discussion_ratios(d.counts), classify_discussion(d.counts, base, alpha, min_messages)};
    if (r.classification.label) {
      ++out.frequencies[*r.classification.label];
      ++out.classified;
    } else {
      ++out.skipped;
    }
    out.discussions.push_back(std::move(r));
  }
  return out;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += "\"\"";
    else q.push_back(c);
  }
  q += '"';
  return q;
}

/// Splits one CSV record, undoing csv_field quoting.
inline std::vector<std::string> parse_csv_line(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back().push_back(c);
    }
  }
  return out;
}

inline void write_classes_csv(std::ostream& out, const CorpusClassification& cc) {
  out << "discussion_id,messages,n_pos,n_neg,n_neu,P,N,U,class,p_neutral,p_positive,p_negative,skip_reason\n";
  auto p = [](const std::optional<ProportionCheck>& c) {
    return c ? fmt::format("{:.6g}", c->test.p_value) : std::string();
  };
  for (const auto& d : cc.discussions) {
    const auto& c = d.classification;
    out << fmt::format("{},{},{},{},{},{:.6f},{:.6f},{:.6f},{},{},{},{},{}\n", csv_field(d.id),
                       d.counts.total(), d.counts.positive, d.counts.negative, d.counts.neutral,
                       d.ratios.positive, d.ratios.negative, d.ratios.neutral,
                       c.label ? to_string(*c.label) : "skipped", p(c.neutral_test),
                       p(c.positive_test), p(c.negative_test), csv_field(c.skip_reason));
  }
}

/// Plot data for classified discussions only.
inline void write_ternary_csv(std::ostream& out, const CorpusClassification& cc) {
  out << "discussion_id,x,y,size,class\n";
  for (const auto& d : cc.discussions) {
    if (!d.classification.label) continue;
    out << fmt::format("{},{:.6f},{:.6f},{},{}\n", csv_field(d.id), d.ratios.x, d.ratios.y,
                       d.counts.total(), to_string(*d.classification.label));
  }
}

// ---------------------------------------------------------------------------

struct EmotionPoint {
  Timestamp day = 0;  // UTC midnight of the last day in the window
  double p = 0;       // mean positivity
  double n = 0;       // mean negativity, sign-flipped to [1, 5]
  double s = 0;       // mean polarity in [-1, 1]
  std::size_t count = 0;
};

struct EmotionSeries {
  int window_days = 30;
  std::vector<EmotionPoint> points;
};

/// Moving averages on the UTC day grid. The point for day d averages the
/// non-discarded messages of days d-T+1 .. d; days with empty windows emit
/// no point.
inline EmotionSeries emotion_timeseries(const Corpus& corpus, int window_days) {
  if (window_days < 1) throw ContractViolation("emotion_timeseries: window_days must be >= 1");
  corpus.require_scored("emotion_timeseries");
  EmotionSeries series;
  series.window_days = window_days;
  std::map<std::int64_t, std::array<std::int64_t, 4>> per_day;  // sum p, sum n, sum s, count
  for (const auto& m : corpus.messages()) {
    if (m.score->polarity == Polarity::discarded) continue;
    auto& acc = per_day[day_index(m.ts)];
    acc[0] += m.score->p;
    acc[1] += m.score->n;
    acc[2] += m.score->sign();
    acc[3] += 1;
  }
  if (per_day.empty()) return series;
  const auto first = per_day.begin()->first;
  const auto last = per_day.rbegin()->first + window_days - 1;
  std::array<std::int64_t, 4> acc{};
  auto lead = per_day.begin(), trail = per_day.begin();
  for (auto d = first; d <= last; ++d) {
    while (lead != per_day.end() && lead->first <= d) {
      for (int i = 0; i < 4; ++i) acc[i] += lead->second[i];
      ++lead;
    }
    while (trail != lead && trail->first <= d - window_days) {
      for (int i = 0; i < 4; ++i) acc[i] -= trail->second[i];
      ++trail;
    }
    if (acc[3] == 0) {
      // Skip the empty stretch up to the next message day.
      if (lead == per_day.end()) break;
      d = lead->first - 1;
      continue;
    }
    const double c = static_cast<double>(acc[3]);
    series.points.push_back({d * kDay, acc[0] / c, -acc[1] / c, acc[2] / c, static_cast<std::size_t>(acc[3])});
  }
  return series;
}

inline void write_series_csv(std::ostream& out, const EmotionSeries& series) {
  out << "date,p,n,s\n";
  for (const auto& pt : series.points)
    out << fmt::format("{},{:.6f},{:.6f},{:.6f}\n", format_date(pt.day), pt.p, pt.n, pt.s);
}

// ---------------------------------------------------------------------------

struct PeriodSide {
  std::string name;
  std::vector<TimeWindow> ranges;  // [start, end) in epoch seconds

  bool contains(Timestamp ts) const {
    return std::any_of(ranges.begin(), ranges.end(),
                       [&](const TimeWindow& w) { return ts >= w.first && ts < w.second; });
  }
};

struct PeriodSplit {
  PeriodSide first, second;
};

/// Discussions containing at least one message of `author` versus the rest,
/// optionally restricted to messages inside `within`.
struct AuthorSplit {
  std::string author;
  std::optional<TimeWindow> within;
};

using PartitionRule = std::variant<PeriodSplit, AuthorSplit>;

/// Parses periods.json: an array of two objects, each {"name", "start", "end"}
/// (dates "YYYY-MM-DD" or epoch seconds, end exclusive) or {"name", "ranges": [[start, end], ...]}.
inline PeriodSplit parse_periods(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("periods: expected an array of two sides");
  auto ts = [](const nlohmann::json& v) -> Timestamp {
    if (v.is_number_integer()) return v.get<Timestamp>();
    auto t = parse_iso8601(v.get<std::string>());
    if (!t) throw ValidationError("periods: bad date '" + v.get<std::string>() + "'");
    return *t;
  };
  auto side = [&](const nlohmann::json& s) {
    PeriodSide p;
    p.name = s.at("name").get<std::string>();
    if (s.contains("ranges")) {
      for (const auto& r : s["ranges"]) p.ranges.emplace_back(ts(r.at(0)), ts(r.at(1)));
    } else {
      p.ranges.emplace_back(ts(s.at("start")), ts(s.at("end")));
    }
    for (const auto& r : p.ranges)
      if (r.second <= r.first) throw ValidationError("periods: empty range in '" + p.name + "'");
    return p;
  };
  return {side(j[0]), side(j[1])};
}

/// Significance level below which a comparison is reported with a one-sided
/// alternative in the observed direction; otherwise two-sided ("<>").
inline constexpr double kDirectionAlpha = 0.01;

struct ComparisonRow {
  char polarity = 'N';  // 'N', 'U' or 'P'
  std::uint64_t k1 = 0, n1 = 0, k2 = 0, n2 = 0;
  stats::TestResult test;

  /// e.g. "N_{P1-P2} > N_{P3}"
  std::string hypothesis(const std::string& first, const std::string& second) const {
    const char* op = test.alternative == stats::Alternative::greater ? ">"
                   : test.alternative == stats::Alternative::less    ? "<"
                                                                     : "<>";
    return fmt::format("{}_{{{}}} {} {}_{{{}}}", polarity, first, op, polarity, second);
  }
};

struct ComparisonTable {
  std::string first_name, second_name;
  std::vector<ComparisonRow> rows;  // N, U, P
};

namespace detail {

inline std::uint64_t count_of(const PolarityCounts& c, char polarity) {
  return polarity == 'N' ? c.negative : polarity == 'U' ? c.neutral : c.positive;
}

}  // namespace detail

/// Proportions of negative, neutral and positive messages on the two sides of
/// a partition, each compared with two_proportion_test. Rows whose two-sided
/// p-value is below direction_alpha carry the one-sided alternative supported
/// by the data.
inline ComparisonTable compare_partitions(const Corpus& corpus, const PartitionRule& rule,
                                          double direction_alpha = kDirectionAlpha) {
  corpus.require_scored("compare_partitions");
  ComparisonTable table;
  PolarityCounts a, b;
  if (const auto* ps = std::get_if<PeriodSplit>(&rule)) {
    table.first_name = ps->first.name;
    table.second_name = ps->second.name;
    for (const auto& m : corpus.messages()) {
      if (ps->first.contains(m.ts)) a.add(m.score->polarity);
      if (ps->second.contains(m.ts)) b.add(m.score->polarity);
    }
  } else {
    const auto& as = std::get<AuthorSplit>(rule);
    table.first_name = "without " + as.author;
    table.second_name = "with " + as.author;
    auto inside = [&](const Message& m) {
      return !as.within || (m.ts >= as.within->first && m.ts < as.within->second);
    };
    std::map<std::string, std::pair<PolarityCounts, bool>> per_discussion;
    for (const auto& m : corpus.messages()) {
      if (!inside(m)) continue;
      auto& [counts, has_author] = per_discussion[m.discussion];
      counts.add(m.score->polarity);
      if (m.author == as.author) has_author = true;
    }
    for (const auto& [id, entry] : per_discussion) {
      auto& side = entry.second ? b : a;
      side.positive += entry.first.positive;
      side.negative += entry.first.negative;
      side.neutral += entry.first.neutral;
    }
  }
  if (a.total() == 0 || b.total() == 0)
    throw UndefinedError("compare_partitions: empty partition side");
  for (char pol : {'N', 'U', 'P'}) {
    ComparisonRow row{pol, detail::count_of(a, pol), a.total(), detail::count_of(b, pol), b.total(), {}};
    row.test = stats::two_proportion_test(row.k1, row.n1, row.k2, row.n2);
    if (row.test.p_value < direction_alpha) {
      const double pa = static_cast<double>(row.k1) / static_cast<double>(row.n1);
      const double pb = static_cast<double>(row.k2) / static_cast<double>(row.n2);
      row.test = stats::two_proportion_test(row.k1, row.n1, row.k2, row.n2,
                                            pa > pb ? stats::Alternative::greater : stats::Alternative::less);
    }
    table.rows.push_back(row);
  }
  return table;
}

inline void write_comparison_csv(std::ostream& out, const ComparisonTable& t) {
  out << "p_value,alternative,estimate,k1,n1,k2,n2\n";
  for (const auto& r : t.rows)
    out << fmt::format("{:.3e},{},{:.3f},{},{},{},{}\n", r.test.p_value,
                       csv_field(r.hypothesis(t.first_name, t.second_name)), r.test.estimate, r.k1,
                       r.n1, r.k2, r.n2);
}

}  // namespace ossmood
