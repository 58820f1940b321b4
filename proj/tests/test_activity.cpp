#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "ossmood/activity.hpp"
#include "ossmood/random.hpp"

using namespace ossmood;

namespace {

Message at(std::string author, Timestamp ts, std::string id = "") {
  if (id.empty()) id = author + "@" + std::to_string(ts);
  return Message{std::move(id), std::move(author), ts, "d", Channel::bug_tracker, "", std::nullopt};
}

ContributorTimeline days(std::initializer_list<double> ds) {
  ContributorTimeline t{"u", {}, Channel::bug_tracker};
  for (double d : ds) t.times.push_back(static_cast<Timestamp>(std::llround(d * kSecondsPerDay)));
  return t;
}

// Contributors whose longest gap follows a truncated power law below 30 days
// with a light exponential tail above.
std::vector<ContributorTimeline> mixture_timelines(std::size_t n, std::uint64_t seed, Timestamp shift = 0) {
  Rng rng(seed);
  std::vector<ContributorTimeline> out;
  const double alpha = 1.8, lo = 0.1, hi = 30;
  const double a = std::pow(lo, 1 - alpha), b = std::pow(hi, 1 - alpha);
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = rng.bernoulli(0.95) ? std::pow(a + rng.uniform() * (b - a), 1 / (1 - alpha))
                                           : hi + rng.exponential(2.0);
    const auto gap = static_cast<Timestamp>(std::llround(tau * kSecondsPerDay));
    out.push_back({"u" + std::to_string(i), {shift, shift + gap}, Channel::bug_tracker});
  }
  return out;
}

}  // namespace

TEST(Timelines, Examples) {
  const auto ts = build_timelines(Corpus::build(
      {at("b", 1), at("a", 5), at("a", 1), at("b", 9), at("a", 3), at("a", 3, "dup")}, Channel::bug_tracker));
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(ts[0].author, "a");
  EXPECT_EQ(ts[0].times, (std::vector<Timestamp>{1, 3, 5}));
  EXPECT_EQ(ts[1].times.size(), 2u);
  EXPECT_TRUE(build_timelines(Corpus{}).empty());
}

TEST(Interevent, Examples) {
  EXPECT_EQ(*interevent_times(days({0, 10, 55})), (std::vector<double>{10, 45}));
  EXPECT_FALSE(interevent_times(days({3})).has_value());
  EXPECT_EQ(*interevent_times(days({0, 0.5})), (std::vector<double>{0.5}));
}

TEST(LabelIntervals, Fixture) {
  const auto iv = label_intervals(days({0, 10, 55, 60}));
  ASSERT_EQ(iv.size(), 3u);
  EXPECT_EQ(iv[0].start_time, 0);
  EXPECT_EQ(iv[0].label, ActivityLabel::ACT);
  EXPECT_DOUBLE_EQ(iv[0].gap_days, 10);
  EXPECT_EQ(iv[1].start_time, 10 * kDay);
  EXPECT_EQ(iv[1].label, ActivityLabel::INA);
  EXPECT_DOUBLE_EQ(iv[1].gap_days, 45);
  EXPECT_EQ(iv[2].label, ActivityLabel::ACT);
  EXPECT_DOUBLE_EQ(iv[2].gap_days, 5);
}

TEST(LabelIntervals, ThirtyDayBoundary) {
  EXPECT_EQ(label_intervals(days({0, 30}))[0].label, ActivityLabel::INA);
  const auto just_under = label_intervals(ContributorTimeline{"u", {0, 30 * kDay - 1}, Channel::bug_tracker});
  EXPECT_EQ(just_under[0].label, ActivityLabel::ACT);
  for (const auto& i : label_intervals(days({0, 1, 5, 20, 49, 78.9}))) EXPECT_EQ(i.label, ActivityLabel::ACT);
  EXPECT_EQ(label_intervals(days({0, 10}), 10)[0].label, ActivityLabel::INA);
  EXPECT_THROW(label_intervals(days({0})), ContractViolation);
}

TEST(LabelCorpus, DiscardsOneTimeContributorsAndCountsIntervals) {
  Rng rng(2);
  std::vector<Message> ms;
  std::map<std::string, std::set<Timestamp>> per_author;
  for (int i = 0; i < 500; ++i) {
    const auto author = "u" + std::to_string(rng.below(60));
    const auto ts = static_cast<Timestamp>(rng.below(400 * kDay));
    ms.push_back(at(author, ts, std::to_string(i)));
    per_author[author].insert(ts);
  }
  ms.push_back(at("once", 5));
  const auto lc = label_corpus(Corpus::build(ms, Channel::bug_tracker));
  std::size_t expected = 0, one_time = 1;
  for (const auto& [a, times] : per_author) {
    if (times.size() < 2) ++one_time;
    else expected += times.size() - 1;
  }
  EXPECT_EQ(lc.intervals.size(), expected);
  EXPECT_EQ(lc.one_time_contributors, one_time);
  for (const auto& iv : lc.intervals) {
    EXPECT_GT(iv.gap_days, 0);
    EXPECT_EQ(iv.label == ActivityLabel::INA, iv.gap_days >= 30);
    EXPECT_NE(iv.author, "once");
  }
}

TEST(LabelCorpus, TranslationInvariant) {
  Rng rng(3);
  std::vector<Message> ms, shifted;
  for (int i = 0; i < 400; ++i) {
    const auto author = "u" + std::to_string(rng.below(30));
    const auto ts = static_cast<Timestamp>(rng.below(300 * kDay));
    ms.push_back(at(author, ts, std::to_string(i)));
    shifted.push_back(at(author, ts + 12345 * kDay + 777, std::to_string(i)));
  }
  const auto a = label_corpus(Corpus::build(ms, Channel::bug_tracker));
  const auto b = label_corpus(Corpus::build(shifted, Channel::bug_tracker));
  ASSERT_EQ(a.intervals.size(), b.intervals.size());
  for (std::size_t i = 0; i < a.intervals.size(); ++i) {
    EXPECT_EQ(a.intervals[i].label, b.intervals[i].label);
    EXPECT_DOUBLE_EQ(a.intervals[i].gap_days, b.intervals[i].gap_days);
  }
}

TEST(LabelCorpus, IntervalsJsonlRoundTrip) {
  const auto iv = label_intervals(days({0, 10, 55, 60.25}));
  std::stringstream buf;
  write_intervals_jsonl(buf, iv);
  EXPECT_EQ(read_intervals_jsonl(buf), iv);
  std::istringstream bad("{\"author\":\"u\",\"t\":0,\"gap_days\":1,\"label\":\"MAYBE\"}\n");
  EXPECT_THROW(read_intervals_jsonl(bad), ValidationError);
  EXPECT_DOUBLE_EQ(ina_prior(iv), 1.0 / 3);
  EXPECT_THROW(ina_prior({}), UndefinedError);
}

TEST(MaxInterevent, DegenerateSampleSurfacesFitError) {
  std::vector<ContributorTimeline> ts;
  for (int i = 0; i < 20; ++i) ts.push_back({"u" + std::to_string(i), {0, 5 * kDay}, Channel::bug_tracker});
  EXPECT_THROW(max_interevent_analysis(ts, 1, 30), DivergentEstimateError);
}

TEST(MaxInterevent, TooFewContributors) {
  auto ts = mixture_timelines(9, 1);
  ts.push_back({"once", {0}, Channel::bug_tracker});
  EXPECT_THROW(max_interevent_analysis(ts, 1, 30), InsufficientDataError);
}

TEST(MaxInterevent, SyntheticMixtureBoundaryAndExponent) {
  const auto a = max_interevent_analysis(mixture_timelines(10000, 5), 1, 30);
  EXPECT_EQ(a.tau_max.size(), 10000u);
  EXPECT_TRUE(a.boundary_detected);
  EXPECT_GE(a.boundary_days, 15);
  EXPECT_LE(a.boundary_days, 60);
  EXPECT_GE(a.fit.alpha, 1.6);
  EXPECT_LE(a.fit.alpha, 2.0);
  std::ostringstream csv;
  write_histogram_csv(csv, a.histogram);
  EXPECT_EQ(csv.str().rfind("bin_lo,bin_hi,count,density\n", 0), 0u);
  const auto side = activity_sidecar(a, LabeledCorpus{});
  EXPECT_DOUBLE_EQ(side["alpha"].get<double>(), a.fit.alpha);
}

TEST(MaxInterevent, TranslationInvariantExponent) {
  const auto a = max_interevent_analysis(mixture_timelines(2000, 6), 1, 30);
  const auto b = max_interevent_analysis(mixture_timelines(2000, 6, 98765 * kDay), 1, 30);
  EXPECT_DOUBLE_EQ(a.fit.alpha, b.fit.alpha);
  EXPECT_EQ(a.boundary_days, b.boundary_days);
}
