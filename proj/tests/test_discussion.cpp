#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ossmood/discussion.hpp"
#include "ossmood/random.hpp"
#include "ossmood/synth.hpp"

using namespace ossmood;

namespace {

const BaselineRatios kBugs{0.28, 0.16, 0.56};

SentimentScore score_for(Polarity p) {
  switch (p) {
    case Polarity::positive: return SentimentScore::from(3, -1);
    case Polarity::negative: return SentimentScore::from(1, -3);
    case Polarity::neutral: return SentimentScore::from(1, -1);
    case Polarity::discarded: return SentimentScore::from(5, -5);
  }
  return {};
}

Message scored(std::string id, std::string author, Timestamp ts, std::string disc, SentimentScore s) {
  return Message{std::move(id), std::move(author), ts, std::move(disc), Channel::bug_tracker, "", s};
}

// Messages for one discussion with the given counts, one per minute from `start`.
void append_discussion(std::vector<Message>& out, const std::string& disc, std::size_t pos, std::size_t neg,
                       std::size_t neu, Timestamp start = 0) {
  std::size_t i = 0;
  auto add = [&](Polarity p, std::size_t k) {
    for (std::size_t j = 0; j < k; ++j, ++i)
      out.push_back(scored(disc + "-" + std::to_string(i), "u" + std::to_string(i % 7),
                           start + static_cast<Timestamp>(i) * 60, disc, score_for(p)));
  };
  add(Polarity::positive, pos);
  add(Polarity::negative, neg);
  add(Polarity::neutral, neu);
}

Corpus corpus_of(std::vector<Message> ms) { return Corpus::build(std::move(ms), Channel::bug_tracker); }

// Independent exact binomial: Pascal row times powers.
double exact_two_sided(std::uint64_t k, std::uint64_t n, double p) {
  std::vector<double> row{1.0};
  for (std::uint64_t i = 0; i < n; ++i) {
    std::vector<double> next(row.size() + 1, 0.0);
    for (std::size_t j = 0; j < row.size(); ++j) {
      next[j] += row[j];
      next[j + 1] += row[j];
    }
    row = std::move(next);
  }
  double lower = 0, upper = 0;
  for (std::uint64_t j = 0; j <= n; ++j) {
    const double pmf = row[j] * std::pow(p, static_cast<double>(j)) * std::pow(1 - p, static_cast<double>(n - j));
    if (j <= k) lower += pmf;
    if (j >= k) upper += pmf;
  }
  return std::min(1.0, 2 * std::min(lower, upper));
}

bool in_band(double p) { return p > 0.04 && p < 0.06; }

// Brute-force decision procedure; empty when any p-value falls in the band.
std::optional<EmotionClass> oracle_class(std::uint64_t pos, std::uint64_t neg, std::uint64_t neu,
                                         const BaselineRatios& b) {
  const auto n = pos + neg + neu;
  const double pu = exact_two_sided(neu, n, b.neutral);
  if (in_band(pu)) return std::nullopt;
  if (pu >= 0.05) return EmotionClass::neutral;
  const double u = static_cast<double>(neu) / static_cast<double>(n);
  if (u > b.neutral) return EmotionClass::underemotional;
  const double pp = exact_two_sided(pos, n, b.positive);
  const double pn = exact_two_sided(neg, n, b.negative);
  if (in_band(pp) || in_band(pn)) return std::nullopt;
  const bool P = pp < 0.05 && static_cast<double>(pos) / static_cast<double>(n) > b.positive;
  const bool N = pn < 0.05 && static_cast<double>(neg) / static_cast<double>(n) > b.negative;
  return P && N ? EmotionClass::bipolar : P ? EmotionClass::positive : N ? EmotionClass::negative
                                                                         : EmotionClass::undetermined;
}

PolarityCounts counts(std::uint64_t pos, std::uint64_t neg, std::uint64_t neu) {
  PolarityCounts c;
  c.positive = pos;
  c.negative = neg;
  c.neutral = neu;
  return c;
}

}  // namespace

TEST(Baseline, SmallCorpus) {
  std::vector<Message> ms;
  append_discussion(ms, "d", 1, 1, 2);
  const auto b = compute_baseline(corpus_of(ms));
  EXPECT_DOUBLE_EQ(b.positive, 0.25);
  EXPECT_DOUBLE_EQ(b.negative, 0.25);
  EXPECT_DOUBLE_EQ(b.neutral, 0.5);
}

TEST(Baseline, DiscardedExcludedAndEmptyUndefined) {
  std::vector<Message> ms;
  append_discussion(ms, "d", 1, 0, 1);
  ms.push_back(scored("x", "u", 999, "d", score_for(Polarity::discarded)));
  const auto b = compute_baseline(corpus_of(ms));
  EXPECT_DOUBLE_EQ(b.positive, 0.5);
  EXPECT_DOUBLE_EQ(b.positive + b.negative + b.neutral, 1.0);
  EXPECT_THROW(compute_baseline(corpus_of({scored("x", "u", 1, "d", score_for(Polarity::discarded))})),
               UndefinedError);
}

TEST(Ratios, Examples) {
  const auto corner = discussion_ratios(counts(5, 0, 0));
  EXPECT_DOUBLE_EQ(corner.positive, 1);
  EXPECT_DOUBLE_EQ(corner.x, 0);
  EXPECT_DOUBLE_EQ(corner.y, 0);
  const auto centroid = discussion_ratios(counts(4, 4, 4));
  EXPECT_NEAR(centroid.x, 0.5, 1e-12);
  EXPECT_NEAR(centroid.y, std::sqrt(3.0) / 6, 1e-12);
  const auto r = discussion_ratios(counts(3, 1, 4));
  EXPECT_DOUBLE_EQ(r.positive, 0.375);
  EXPECT_DOUBLE_EQ(r.negative, 0.125);
  EXPECT_DOUBLE_EQ(r.neutral, 0.5);
  EXPECT_THROW(discussion_ratios(counts(0, 0, 0)), UndefinedError);
}

TEST(Ratios, SumToOne) {
  for (std::uint64_t a = 0; a < 12; ++a)
    for (std::uint64_t b = 0; b < 12; ++b)
      for (std::uint64_t c = 0; c < 12; ++c) {
        if (a + b + c == 0) continue;
        const auto r = discussion_ratios(counts(a, b, c));
        EXPECT_NEAR(r.positive + r.negative + r.neutral, 1.0, 1e-9);
      }
}

TEST(Classify, EqualToBaselineIsNeutral) {
  const auto c = classify_discussion(counts(28, 16, 56), kBugs);
  ASSERT_TRUE(c.label);
  EXPECT_EQ(*c.label, EmotionClass::neutral);
  EXPECT_GT(c.neutral_test->test.p_value, 0.9);
}

TEST(Classify, AllPositiveIsPositive) {
  const auto c = classify_discussion(counts(30, 0, 0), kBugs);
  ASSERT_TRUE(c.label);
  EXPECT_EQ(*c.label, EmotionClass::positive);
  EXPECT_LT(c.neutral_test->test.p_value, 1e-6);
  EXPECT_FALSE(c.negative_test->rejected && c.negative_test->above);
}

TEST(Classify, HalfPositiveHalfNegativeIsBipolar) {
  const auto c = classify_discussion(counts(20, 20, 0), kBugs);
  ASSERT_TRUE(c.label);
  EXPECT_EQ(*c.label, EmotionClass::bipolar);
  EXPECT_TRUE(c.neutral_test->rejected && c.positive_test->rejected && c.negative_test->rejected);
}

TEST(Classify, OtherBranches) {
  EXPECT_EQ(*classify_discussion(counts(1, 1, 38), kBugs).label, EmotionClass::underemotional);
  EXPECT_EQ(*classify_discussion(counts(2, 30, 8), kBugs).label, EmotionClass::negative);
  // Neutral share too low, positive and negative shares not separately significant.
  EXPECT_EQ(*classify_discussion(counts(68, 42, 90), kBugs).label, EmotionClass::undetermined);
}

TEST(Classify, BelowMinimumIsSkippedWithReason) {
  const auto c = classify_discussion(counts(19, 0, 0), kBugs);
  EXPECT_FALSE(c.label);
  EXPECT_FALSE(c.skip_reason.empty());
  EXPECT_TRUE(classify_discussion(counts(19, 0, 0), kBugs, 0.05, 19).label);
  EXPECT_FALSE(classify_discussion(counts(0, 0, 0), kBugs, 0.05, 0).label);
}

TEST(Classify, AgreesWithExactOracle) {
  std::size_t compared = 0;
  for (const auto& base : {kBugs, BaselineRatios{0.28, 0.23, 0.49}}) {
    for (std::uint64_t n = 20; n <= 50; ++n)
      for (std::uint64_t pos = 0; pos <= n; ++pos)
        for (std::uint64_t neg = 0; pos + neg <= n; ++neg) {
          const auto neu = n - pos - neg;
          const auto expected = oracle_class(pos, neg, neu, base);
          if (!expected) continue;
          ++compared;
          const auto got = classify_discussion(counts(pos, neg, neu), base);
          ASSERT_TRUE(got.label);
          ASSERT_EQ(*got.label, *expected) << pos << "/" << neg << "/" << neu;
        }
  }
  EXPECT_GT(compared, 30000u);
}

TEST(Classify, PositiveNeverTurnsNeutralAsNeutralShiftsToPositive) {
  for (std::uint64_t n = 20; n <= 80; n += 3)
    for (std::uint64_t neg = 0; neg <= n; neg += 2) {
      bool seen_positive = false;
      for (std::uint64_t pos = 0; pos + neg <= n; ++pos) {
        const auto label = *classify_discussion(counts(pos, neg, n - pos - neg), kBugs).label;
        if (seen_positive) { EXPECT_NE(label, EmotionClass::neutral) << n << " " << neg << " " << pos; }
        seen_positive = seen_positive || label == EmotionClass::positive;
      }
    }
}

TEST(ClassifyCorpus, OneQualifyingDiscussion) {
  std::vector<Message> ms;
  append_discussion(ms, "big", 30, 0, 0);
  append_discussion(ms, "small", 2, 1, 1, 10000);
  const auto cc = classify_corpus(corpus_of(ms), kBugs);
  EXPECT_EQ(cc.classified, 1u);
  EXPECT_EQ(cc.skipped, 1u);
  EXPECT_EQ(cc.discussions.size(), 2u);
  EXPECT_EQ(cc.frequencies.at(EmotionClass::positive), 1u);
  for (const auto& d : cc.discussions) EXPECT_NE(d.classification.label.has_value(), !d.classification.skip_reason.empty());
}

TEST(ClassifyCorpus, AllSkipped) {
  std::vector<Message> ms;
  append_discussion(ms, "a", 3, 3, 3);
  append_discussion(ms, "b", 1, 0, 4, 5000);
  const auto cc = classify_corpus(corpus_of(ms), kBugs);
  EXPECT_EQ(cc.classified, 0u);
  EXPECT_EQ(cc.skipped, 2u);
  EXPECT_TRUE(cc.frequencies.empty());
}

TEST(ClassifyCorpus, ReorderInvariant) {
  std::vector<Message> ms;
  Rng rng(4);
  for (int d = 0; d < 30; ++d)
    append_discussion(ms, "d" + std::to_string(d), rng.below(20), rng.below(20), rng.below(30), d * 100000);
  // Several messages share a timestamp in each discussion.
  for (auto& m : ms) m.ts -= m.ts % 180;
  const auto ref = classify_corpus(corpus_of(ms), kBugs);
  for (int k = 0; k < 5; ++k) {
    for (std::size_t i = ms.size(); i > 1; --i) std::swap(ms[i - 1], ms[rng.below(i)]);
    const auto again = classify_corpus(corpus_of(ms), kBugs);
    ASSERT_EQ(again.discussions.size(), ref.discussions.size());
    for (std::size_t i = 0; i < ref.discussions.size(); ++i)
      EXPECT_EQ(again.discussions[i].classification.label, ref.discussions[i].classification.label);
  }
}

TEST(ClassifyCorpus, RecoversPlantedMixture) {
  SynthConfig c;
  c.contributors = 5000;
  c.discussions = 500;
  c.messages_min = 10;
  c.messages_max = 30;
  c.class_mix = {{EmotionClass::neutral, 0.4},
                 {EmotionClass::underemotional, 0.1},
                 {EmotionClass::positive, 0.2},
                 {EmotionClass::negative, 0.2},
                 {EmotionClass::bipolar, 0.1}};
  const auto r = generate_synthetic_corpus(c, 21);
  // Classified against the emission law of neutral discussions, which is the
  // community norm the generator plants.
  const auto& e = c.class_emissions.at(EmotionClass::neutral);
  const auto cc = classify_corpus(r.corpus, BaselineRatios{e[0], e[1], e[2]}, 0.01);
  ASSERT_EQ(cc.classified, 500u);
  std::map<EmotionClass, double> planted;
  for (const auto& [id, cls] : r.discussion_classes) planted[cls] += 1;
  for (auto cls : kEmotionClasses) {
    const double got = cc.frequencies.count(cls) ? static_cast<double>(cc.frequencies.at(cls)) : 0.0;
    EXPECT_NEAR(got / 500, planted[cls] / 500, 0.03) << to_string(cls);
  }
}

TEST(ClassifyCorpus, CsvExports) {
  std::vector<Message> ms;
  append_discussion(ms, "with,comma", 30, 0, 0);
  append_discussion(ms, "tiny", 1, 0, 0, 9000);
  const auto cc = classify_corpus(corpus_of(ms), kBugs);
  std::ostringstream classes, ternary;
  write_classes_csv(classes, cc);
  write_ternary_csv(ternary, cc);
  std::istringstream in(classes.str());
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(parse_csv_line(header).size(), 13u);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) rows.push_back(parse_csv_line(line));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "tiny");
  EXPECT_EQ(rows[0][8], "skipped");
  EXPECT_EQ(rows[1][0], "with,comma");
  EXPECT_EQ(rows[1][8], "positive");
  EXPECT_EQ(rows[1][1], "30");
  EXPECT_EQ(ternary.str(), "discussion_id,x,y,size,class\n\"with,comma\",0.000000,0.000000,30,positive\n");
}

TEST(Csv, ParseUndoesQuoting) {
  for (std::string s : {"", "plain", "a,b", "say \"hi\"", "line\nbreak", "\"", ",,"}) {
    const auto fields = parse_csv_line(csv_field(s) + "," + csv_field("x"));
    ASSERT_EQ(fields.size(), 2u) << s;
    EXPECT_EQ(fields[0], s);
    EXPECT_EQ(fields[1], "x");
  }
}

TEST(Timeseries, SingleMessage) {
  const auto series = emotion_timeseries(corpus_of({scored("1", "a", 5 * kDay + 100, "d", SentimentScore::from(3, -2))}), 30);
  ASSERT_EQ(series.points.size(), 30u);
  EXPECT_EQ(series.points.front().day, 5 * kDay);
  EXPECT_EQ(series.points.back().day, 34 * kDay);
  for (const auto& pt : series.points) {
    EXPECT_DOUBLE_EQ(pt.p, 3);
    EXPECT_DOUBLE_EQ(pt.n, 2);
    EXPECT_DOUBLE_EQ(pt.s, 1);
  }
}

TEST(Timeseries, OpposingMessagesCancel) {
  const auto series = emotion_timeseries(
      corpus_of({scored("1", "a", 100, "d", SentimentScore::from(3, -1)), scored("2", "b", 200, "d", SentimentScore::from(1, -3))}), 1);
  ASSERT_EQ(series.points.size(), 1u);
  EXPECT_DOUBLE_EQ(series.points[0].s, 0);
  EXPECT_DOUBLE_EQ(series.points[0].p, 2);
  EXPECT_DOUBLE_EQ(series.points[0].n, 2);
}

TEST(Timeseries, GapsEmitNoPointsAndWindowDropsOldDays) {
  const auto series = emotion_timeseries(
      corpus_of({scored("1", "a", 0, "d", SentimentScore::from(3, -1)), scored("2", "a", 10 * kDay, "d", SentimentScore::from(1, -3))}), 3);
  std::vector<Timestamp> days;
  for (const auto& pt : series.points) days.push_back(pt.day / kDay);
  EXPECT_EQ(days, (std::vector<Timestamp>{0, 1, 2, 10, 11, 12}));
  EXPECT_DOUBLE_EQ(series.points[3].s, -1);
  EXPECT_THROW(emotion_timeseries(Corpus{}, 0), ContractViolation);
}

TEST(Timeseries, BoundsAndDiscardedExcluded) {
  Rng rng(9);
  std::vector<Message> ms;
  for (int i = 0; i < 2000; ++i)
    ms.push_back(scored("m" + std::to_string(i), "a", static_cast<Timestamp>(rng.below(200 * kDay)), "d",
                        SentimentScore::from(static_cast<int>(rng.between(1, 5)), -static_cast<int>(rng.between(1, 5)))));
  const auto corpus = corpus_of(ms);
  for (const auto& pt : emotion_timeseries(corpus, 7).points) {
    EXPECT_GE(pt.p, 1);
    EXPECT_LE(pt.p, 5);
    EXPECT_GE(pt.n, 1);
    EXPECT_LE(pt.n, 5);
    EXPECT_GE(pt.s, -1);
    EXPECT_LE(pt.s, 1);
  }
  std::ostringstream a, b;
  write_series_csv(a, emotion_timeseries(corpus, 7));
  write_series_csv(b, emotion_timeseries(corpus.without_discarded(), 7));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Timeseries, StationaryStreamConvergesToMean) {
  // p uniform on {1, 2, 3} with weights giving mean 2.2: P(1)=0.2, P(2)=0.4, P(3)=0.4.
  Rng rng(12);
  const double weights[] = {0.2, 0.4, 0.4};
  std::vector<Message> ms;
  for (int day = 0; day < 120; ++day)
    for (int i = 0; i < 100; ++i) {
      const int p = 1 + static_cast<int>(rng.categorical(weights));
      ms.push_back(scored(fmt::format("{}-{}", day, i), "a", day * kDay + i * 60, "d", SentimentScore::from(p, -1)));
    }
  const auto series = emotion_timeseries(corpus_of(ms), 30);
  std::size_t full = 0;
  for (const auto& pt : series.points) {
    if (pt.count != 3000) continue;
    ++full;
    EXPECT_NEAR(pt.p, 2.2, 0.05);
  }
  EXPECT_EQ(full, 91u);
}

TEST(Timeseries, ConcatenationOfSeparatedCorpora) {
  Rng rng(14);
  auto make = [&](Timestamp offset, const std::string& prefix) {
    std::vector<Message> ms;
    for (int i = 0; i < 300; ++i)
      ms.push_back(scored(prefix + std::to_string(i), "a", offset + static_cast<Timestamp>(rng.below(60 * kDay)), "d",
                          SentimentScore::from(static_cast<int>(rng.between(1, 3)), -static_cast<int>(rng.between(1, 3)))));
    return ms;
  };
  const auto first = make(0, "a"), second = make(200 * kDay, "b");
  auto both = first;
  both.insert(both.end(), second.begin(), second.end());
  std::ostringstream joined, parts;
  write_series_csv(joined, emotion_timeseries(corpus_of(both), 30));
  write_series_csv(parts, emotion_timeseries(corpus_of(first), 30));
  std::ostringstream tail;
  write_series_csv(tail, emotion_timeseries(corpus_of(second), 30));
  parts << tail.str().substr(tail.str().find('\n') + 1);
  EXPECT_EQ(joined.str(), parts.str());
}

TEST(Compare, IdenticalHalves) {
  std::vector<Message> ms;
  append_discussion(ms, "a", 10, 5, 20, 0);
  append_discussion(ms, "b", 10, 5, 20, 100 * kDay);
  const PeriodSplit split{{"early", {{0, 50 * kDay}}}, {"late", {{50 * kDay, 200 * kDay}}}};
  const auto t = compare_partitions(corpus_of(ms), split);
  ASSERT_EQ(t.rows.size(), 3u);
  for (const auto& r : t.rows) {
    EXPECT_DOUBLE_EQ(r.test.estimate, 0);
    EXPECT_GT(r.test.p_value, 0.99);
    EXPECT_EQ(r.test.alternative, stats::Alternative::two_sided);
  }
  EXPECT_EQ(t.rows[0].hypothesis(t.first_name, t.second_name), "N_{early} <> N_{late}");
}

TEST(Compare, PlantedNegativityShift) {
  Rng rng(15);
  std::vector<Message> ms;
  for (int side = 0; side < 2; ++side) {
    const double neg = side == 0 ? 0.16 : 0.21;
    const double weights[] = {0.28, neg, 1 - 0.28 - neg};
    for (int i = 0; i < 10000; ++i) {
      const auto k = rng.categorical(weights);
      const auto pol = k == 0 ? Polarity::positive : k == 1 ? Polarity::negative : Polarity::neutral;
      ms.push_back(scored(fmt::format("{}-{}", side, i), "a", side * 100 * kDay + i, "d" + std::to_string(i % 50), score_for(pol)));
    }
  }
  const PeriodSplit split{{"base", {{0, 50 * kDay}}}, {"shifted", {{50 * kDay, 200 * kDay}}}};
  const auto t = compare_partitions(corpus_of(ms), split);
  const auto& n = t.rows[0];
  EXPECT_EQ(n.polarity, 'N');
  EXPECT_EQ(n.n1, 10000u);
  EXPECT_LT(n.test.p_value, 0.01);
  EXPECT_EQ(n.test.alternative, stats::Alternative::less);
  EXPECT_NEAR(std::abs(n.test.estimate), 0.05, 0.015);
}

TEST(Compare, AuthorSplitAndEmptySide) {
  std::vector<Message> ms;
  append_discussion(ms, "x", 5, 5, 5);
  append_discussion(ms, "y", 1, 9, 5, 100000);
  ms.push_back(scored("alice-1", "alice", 100000 + 5000, "y", score_for(Polarity::negative)));
  const auto t = compare_partitions(corpus_of(ms), AuthorSplit{"alice", std::nullopt});
  EXPECT_EQ(t.first_name, "without alice");
  EXPECT_EQ(t.rows[0].n1, 15u);
  EXPECT_EQ(t.rows[0].n2, 16u);
  EXPECT_EQ(t.rows[0].k2, 10u);
  EXPECT_THROW(compare_partitions(corpus_of(ms), AuthorSplit{"nobody", std::nullopt}), UndefinedError);
}

TEST(Compare, PeriodsJson) {
  const auto s = parse_periods(nlohmann::json::parse(
      R"([{"name": "P1-P2", "ranges": [["2005-01-01", "2005-02-01"], [0, 10]]}, {"name": "P3", "start": "2006-01-01", "end": "2006-06-01"}])"));
  EXPECT_EQ(s.first.ranges.size(), 2u);
  EXPECT_TRUE(s.first.contains(1104537600));
  EXPECT_FALSE(s.first.contains(10));
  EXPECT_EQ(s.second.name, "P3");
  EXPECT_THROW(parse_periods(nlohmann::json::parse(R"([{"name": "a", "start": 5, "end": 5}, {"name": "b", "start": 1, "end": 2}])")),
               ValidationError);
  EXPECT_THROW(parse_periods(nlohmann::json::parse("[]")), ValidationError);
}
