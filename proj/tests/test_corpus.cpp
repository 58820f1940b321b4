#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ossmood/corpus.hpp"
#include "ossmood/random.hpp"

using namespace ossmood;

namespace {

Message msg(std::string id, std::string author, Timestamp ts, std::string disc, std::string text = "",
            Channel ch = Channel::bug_tracker) {
  return Message{std::move(id), std::move(author), ts, std::move(disc), ch, std::move(text), std::nullopt};
}

std::string random_text(Rng& rng) {
  static const char* pieces[] = {"a", "> q", " > q2", "b c", "", "  ", ">", "x>y", "\t> t", "plain"};
  std::string s;
  const auto lines = rng.between(0, 6);
  for (std::int64_t i = 0; i < lines; ++i) {
    if (i) s += '\n';
    s += pieces[rng.below(10)];
  }
  return s;
}

}  // namespace

TEST(StripQuoted, Examples) {
  EXPECT_EQ(strip_quoted_lines("> a\nb"), "b");
  EXPECT_EQ(strip_quoted_lines("a\nb"), "a\nb");
  EXPECT_EQ(strip_quoted_lines(">a\n > b\nc"), "c");
  EXPECT_EQ(strip_quoted_lines("> old text\nnew text"), "new text");
  EXPECT_EQ(strip_quoted_lines(""), "");
  EXPECT_EQ(strip_quoted_lines("keep > this\n\n  indented"), "keep > this\n\n  indented");
}

TEST(StripQuoted, Idempotent) {
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const auto x = random_text(rng);
    const auto once = strip_quoted_lines(x);
    EXPECT_EQ(strip_quoted_lines(once), once);
    std::istringstream lines(once);
    std::string line;
    while (std::getline(lines, line)) {
      const auto nb = line.find_first_not_of(" \t\r\f\v");
      EXPECT_FALSE(nb != std::string::npos && line[nb] == '>') << line;
    }
  }
}

TEST(Corpus, BuildSortsAndStripsQuotes) {
  auto c = Corpus::build({msg("b", "u1", 20, "d1", "> quoted\nreply"), msg("a", "u2", 10, "d1")}, Channel::bug_tracker);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.messages()[0].id, "a");
  EXPECT_EQ(c.messages()[1].text, "reply");
  EXPECT_EQ(c.window(), (TimeWindow{10, 20}));
}

TEST(Corpus, InvalidRecordsAreCollected) {
  std::vector<RecordIssue> issues;
  auto c = Corpus::build({msg("a", "", 1, "d"), msg("b", "u", 1, ""), msg("c", "u", -1, "d"), msg("d", "u", 1, "d"),
                          msg("d", "u", 2, "d"), msg("e", "u", 3, "d", "", Channel::mailing_list)},
                         Channel::bug_tracker, &issues);
  EXPECT_EQ(c.size(), 1u);
  EXPECT_EQ(issues.size(), 5u);
  EXPECT_THROW(Corpus::build({msg("a", "", 1, "d")}, Channel::bug_tracker), ValidationError);
}

TEST(Corpus, ObservationWindowIsEnforced) {
  std::vector<RecordIssue> issues;
  auto c = Corpus::build({msg("a", "u", 5, "d"), msg("b", "u", 50, "d")}, Channel::bug_tracker, &issues,
                         TimeWindow{0, 10});
  EXPECT_EQ(c.size(), 1u);
  EXPECT_EQ(issues.size(), 1u);
  EXPECT_EQ(c.window(), (TimeWindow{0, 10}));
}

TEST(Corpus, JsonlRoundTrip) {
  std::vector<Message> ms;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    auto m = msg("m" + std::to_string(i), "user \"" + std::to_string(rng.below(7)) + "\"",
                 static_cast<Timestamp>(rng.below(1000000)), "d" + std::to_string(rng.below(30)),
                 "line one\nünïcode\ttab");
    if (i % 3) m.score = SentimentScore::from(static_cast<int>(rng.between(1, 5)), -static_cast<int>(rng.between(1, 5)));
    ms.push_back(std::move(m));
  }
  const auto c = Corpus::build(ms, Channel::bug_tracker);
  std::stringstream buf;
  write_corpus_jsonl(buf, c);
  const auto back = read_corpus_jsonl(buf);
  EXPECT_EQ(back, c);
  std::stringstream again;
  write_corpus_jsonl(again, back);
  std::stringstream first;
  write_corpus_jsonl(first, c);
  EXPECT_EQ(again.str(), first.str());
}

TEST(Corpus, JsonlSchema) {
  auto m = msg("x", "alice", 1234, "17", "hi");
  m.score = SentimentScore::from(3, -2);
  const auto j = message_to_json(m);
  EXPECT_EQ(j.dump(), R"({"id":"x","author":"alice","ts":1234,"disc":"17","chan":"bug","text":"hi","p":3,"n":-2})");
}

TEST(Corpus, MalformedJsonlLinesBecomeIssues) {
  std::istringstream in(
      "{\"id\":\"a\",\"author\":\"u\",\"ts\":1,\"disc\":\"d\",\"chan\":\"ml\",\"text\":\"\"}\n"
      "not json\n"
      "{\"id\":\"b\",\"author\":\"u\",\"ts\":2,\"disc\":\"d\",\"chan\":\"ml\",\"p\":9,\"n\":-1}\n"
      "\n");
  std::vector<RecordIssue> issues;
  const auto c = read_corpus_jsonl(in, &issues);
  EXPECT_EQ(c.size(), 1u);
  EXPECT_EQ(c.channel(), Channel::mailing_list);
  ASSERT_EQ(issues.size(), 2u);
  EXPECT_EQ(issues[0].record, "line 2");
  EXPECT_EQ(issues[1].record, "line 3");
}

TEST(Summary, Examples) {
  const auto empty = corpus_summary(Corpus{});
  EXPECT_EQ(empty.message_count, 0u);
  EXPECT_EQ(empty.discussion_count, 0u);
  EXPECT_EQ(empty.contributor_count, 0u);
  EXPECT_FALSE(empty.window.has_value());
  const auto c = Corpus::build({msg("1", "a", 5, "d1"), msg("2", "b", 9, "d1"), msg("3", "a", 7, "d2")},
                               Channel::bug_tracker);
  const auto s = corpus_summary(c);
  EXPECT_EQ(s.message_count, 3u);
  EXPECT_EQ(s.discussion_count, 2u);
  EXPECT_EQ(s.contributor_count, 2u);
  EXPECT_EQ(s.window, (TimeWindow{5, 9}));
}

TEST(Summary, PermutationInvariantAndBounded) {
  Rng rng(5);
  std::vector<Message> ms;
  for (int i = 0; i < 300; ++i)
    ms.push_back(msg("m" + std::to_string(i), "u" + std::to_string(rng.below(40)),
                     static_cast<Timestamp>(rng.below(100000)), "d" + std::to_string(rng.below(60))));
  const auto ref = corpus_summary(Corpus::build(ms, Channel::bug_tracker));
  EXPECT_LE(ref.discussion_count, ref.message_count);
  EXPECT_LE(ref.contributor_count, ref.message_count);
  for (int k = 0; k < 10; ++k) {
    for (std::size_t i = ms.size(); i > 1; --i) std::swap(ms[i - 1], ms[rng.below(i)]);
    EXPECT_EQ(corpus_summary(Corpus::build(ms, Channel::bug_tracker)), ref);
  }
}

TEST(ResponseMetrics, FirstReplyDelay) {
  const auto c = Corpus::build({msg("1", "a", 0, "b1"), msg("2", "b", 2 * kDay, "b1")}, Channel::bug_tracker);
  const auto series = bug_response_metrics(c, 30);
  ASSERT_FALSE(series.empty());
  ASSERT_TRUE(series.back().median_first_reply_days);
  EXPECT_DOUBLE_EQ(*series.back().median_first_reply_days, 2.0);
}

TEST(ResponseMetrics, TwoBugsSameDay) {
  const auto c = Corpus::build({msg("1", "a", 100, "b1"), msg("2", "b", 200, "b2")}, Channel::bug_tracker);
  const auto series = bug_response_metrics(c, 1);
  ASSERT_EQ(series.size(), 1u);
  EXPECT_DOUBLE_EQ(series[0].opened_per_day, 2.0);
  EXPECT_FALSE(series[0].median_first_reply_days.has_value());
}

TEST(ResponseMetrics, ExponentialDelaysHaveLogTwoMedian) {
  Rng rng(77);
  const double rate = 0.5;  // per day
  std::vector<Message> ms;
  for (int i = 0; i < 20000; ++i) {
    const auto open = static_cast<Timestamp>(rng.below(10 * kDay));
    const auto reply = open + static_cast<Timestamp>(std::llround(rng.exponential(1 / rate) * kSecondsPerDay));
    ms.push_back(msg("o" + std::to_string(i), "a", open, "bug" + std::to_string(i)));
    ms.push_back(msg("r" + std::to_string(i), "b", reply, "bug" + std::to_string(i)));
  }
  const auto series = bug_response_metrics(Corpus::build(ms, Channel::bug_tracker), 10);
  const auto& pt = series[9];
  ASSERT_TRUE(pt.median_first_reply_days);
  EXPECT_NEAR(*pt.median_first_reply_days, std::log(2.0) / rate, 0.05 * std::log(2.0) / rate);
  EXPECT_NEAR(pt.opened_per_day, 2000, 1e-9);
}

TEST(ResponseMetrics, MailingListRejected) {
  const auto c = Corpus::build({msg("1", "a", 0, "s", "", Channel::mailing_list)}, Channel::mailing_list);
  EXPECT_THROW(bug_response_metrics(c, 30), ChannelError);
}
