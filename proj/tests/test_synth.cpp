#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ossmood/churn.hpp"
#include "ossmood/synth.hpp"

using namespace ossmood;

namespace {

std::string dump(const SynthResult& r) {
  std::ostringstream out;
  write_corpus_jsonl(out, r.corpus);
  write_truth_jsonl(out, r.truth);
  return out.str();
}

SynthConfig small(std::size_t contributors = 200) {
  SynthConfig c;
  c.contributors = contributors;
  c.discussions = 40;
  return c;
}

}  // namespace

TEST(Synth, DeterministicForConfigAndSeed) {
  auto c = small();
  c.rule = PlantedRule::negativity;
  c.discarded_prob = 0.05;
  c.label_noise = 0.1;
  EXPECT_EQ(dump(generate_synthetic_corpus(c, 5)), dump(generate_synthetic_corpus(c, 5)));
  EXPECT_NE(dump(generate_synthetic_corpus(c, 5)), dump(generate_synthetic_corpus(c, 6)));
}

TEST(Synth, DegenerateSingleMessage) {
  SynthConfig c;
  c.contributors = 1;
  c.discussions = 1;
  c.messages_min = c.messages_max = 1;
  const auto r = generate_synthetic_corpus(c, 1);
  EXPECT_EQ(r.corpus.size(), 1u);
  EXPECT_EQ(r.stats.intervals, 0u);
}

TEST(Synth, InfeasibleConfigsRejected) {
  auto c = small();
  c.target_prior = 1.2;
  EXPECT_THROW(generate_synthetic_corpus(c, 1), ValidationError);
  c = small();
  c.messages_min = 5;
  c.messages_max = 2;
  EXPECT_THROW(validate(c), ValidationError);
  c = small();
  c.class_mix = {{EmotionClass::positive, 0.0}};
  EXPECT_THROW(validate(c), ValidationError);
  c = small();
  c.act_min_days = 40;
  EXPECT_THROW(validate(c), ValidationError);
  EXPECT_THROW(synth_config_from_json(nlohmann::json::parse(R"({"inactivity": {"rule": "sometimes"}})")),
               ValidationError);
}

TEST(Synth, ConfigFromJson) {
  const auto c = synth_config_from_json(nlohmann::json::parse(R"({
    "channel": "ml", "contributors": 12, "discussions": 3,
    "messages_per_contributor": {"min": 2, "max": 4},
    "class_mix": {"bipolar": 1, "neutral": 3},
    "class_emissions": {"bipolar": {"positive": 0.5, "negative": 0.5, "neutral": 0}},
    "inactivity": {"rule": "deviation", "threshold": 0.8, "target_prior": 0.075, "label_noise": 0.1},
    "gaps": {"act_alpha": 1.5}})"));
  EXPECT_EQ(c.channel, Channel::mailing_list);
  EXPECT_EQ(c.contributors, 12u);
  EXPECT_EQ(c.messages_max, 4u);
  EXPECT_EQ(c.class_mix.size(), 2u);
  EXPECT_EQ(c.class_emissions.at(EmotionClass::bipolar)[2], 0.0);
  EXPECT_EQ(c.rule, PlantedRule::deviation);
  EXPECT_DOUBLE_EQ(c.target_prior, 0.075);
  EXPECT_DOUBLE_EQ(c.act_alpha, 1.5);
}

TEST(Synth, TextScoresBackToStoredScores) {
  auto c = small(100);
  c.discarded_prob = 0.1;
  const auto r = generate_synthetic_corpus(c, 2);
  const auto lex = synthetic_lexicon();
  for (const auto& m : r.corpus.messages()) EXPECT_EQ(score_message(lex, m.text), *m.score) << m.text;
}

TEST(Synth, TruthMatchesCorpusAndLabels) {
  auto c = small(300);
  c.rule = PlantedRule::absolute;
  c.discarded_prob = 0.1;
  const auto r = generate_synthetic_corpus(c, 3);
  ASSERT_EQ(r.truth.size(), r.corpus.size());
  for (std::size_t i = 0; i < r.truth.size(); ++i) {
    EXPECT_EQ(r.truth[i].id, r.corpus.messages()[i].id);
    EXPECT_EQ(r.truth[i].p, r.corpus.messages()[i].score->p);
  }
  const auto labeled = label_corpus(r.corpus.without_discarded());
  EXPECT_EQ(labeled.intervals, truth_intervals(r));
  EXPECT_EQ(labeled.intervals.size(), r.stats.intervals);
}

TEST(Synth, EmpiricalPriorNearTarget) {
  SynthConfig c;
  c.contributors = 6000;
  c.target_prior = 0.088;
  const auto r = generate_synthetic_corpus(c, 11);
  ASSERT_GE(r.stats.intervals, 50000u);
  const double prior = ina_prior(label_corpus(r.corpus).intervals);
  EXPECT_GE(prior, 0.078);
  EXPECT_LE(prior, 0.098);
}

TEST(Synth, PlantedNegativityRuleHoldsExactly) {
  auto c = small(1500);
  c.rule = PlantedRule::negativity;
  c.class_mix = {{EmotionClass::neutral, 1}, {EmotionClass::negative, 1}};
  const auto r = generate_synthetic_corpus(c, 4);
  const auto scored = r.corpus.without_discarded();
  const auto fs = extract_features(scored, label_corpus(scored).intervals, c.lookback_days);
  std::size_t ina = 0;
  for (const auto& f : fs) {
    const bool rule = std::abs(f.N) > c.threshold;
    EXPECT_EQ(f.interval.label == ActivityLabel::INA, rule);
    ina += rule;
  }
  EXPECT_NEAR(static_cast<double>(ina) / static_cast<double>(fs.size()), c.target_prior, 0.01);
  EXPECT_EQ(r.stats.unpaid_debt, 0u);
}

TEST(Synth, PolarityFrequenciesFitEmissions) {
  SynthConfig c;
  c.contributors = 1000;
  c.messages_min = c.messages_max = 10;
  const auto r = generate_synthetic_corpus(c, 8);
  ASSERT_EQ(r.corpus.size(), 10000u);
  double counts[3] = {0, 0, 0};
  for (const auto& m : r.corpus.messages()) {
    const auto p = m.score->polarity;
    counts[p == Polarity::positive ? 0 : p == Polarity::negative ? 1 : 2] += 1;
  }
  const auto& e = c.class_emissions.at(EmotionClass::neutral);
  double chi = 0;
  for (int i = 0; i < 3; ++i) {
    const double expected = 10000 * e[static_cast<std::size_t>(i)];
    chi += (counts[i] - expected) * (counts[i] - expected) / expected;
  }
  // Chi-square with two degrees of freedom: survival function exp(-x/2).
  EXPECT_GT(std::exp(-chi / 2), 0.01) << "chi2=" << chi;
}

TEST(Synth, LabelNoiseRate) {
  SynthConfig c;
  c.contributors = 3000;
  c.label_noise = 0.1;
  const auto r = generate_synthetic_corpus(c, 9);
  EXPECT_NEAR(static_cast<double>(r.stats.noisy) / static_cast<double>(r.stats.intervals), 0.1, 0.01);
}

TEST(Synth, GapsRespectTheirModes) {
  auto c = small(500);
  const auto r = generate_synthetic_corpus(c, 10);
  for (const auto& iv : truth_intervals(r)) {
    if (iv.label == ActivityLabel::ACT) EXPECT_LT(iv.gap_days, c.inactivity_days);
    else EXPECT_GE(iv.gap_days, c.inactivity_days);
  }
}

TEST(Synth, SyntheticLexiconFilesLoad) {
  const auto dir = std::filesystem::temp_directory_path() / "ossmood_synth_lexicon";
  std::filesystem::remove_all(dir);
  write_synthetic_lexicon(dir);
  const auto lex = load_lexicon_dir(dir);
  EXPECT_EQ(lex.term_count(), 8u);
  EXPECT_EQ(lex.negator_count(), 3u);
  EXPECT_EQ(lex.booster_count(), 4u);
}
