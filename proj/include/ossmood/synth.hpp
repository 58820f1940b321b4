#pragma once

// Synthetic corpora with planted structure: discussion emotion classes, a
// planted inactivity rule over lookback emotion features, ACT/INA gaps and a
// parallel ground-truth record per message.

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "ossmood/activity.hpp"
#include "ossmood/corpus.hpp"
#include "ossmood/discussion.hpp"
#include "ossmood/random.hpp"

namespace ossmood {

enum class PlantedRule { none, negativity, absolute, deviation };

inline PlantedRule parse_planted_rule(std::string_view s) {
  if (s == "none") return PlantedRule::none;
  if (s == "negativity") return PlantedRule::negativity;
  if (s == "absolute") return PlantedRule::absolute;
  if (s == "deviation") return PlantedRule::deviation;
  throw ValidationError("unknown planted rule '" + std::string(s) + "'");
}

inline std::string_view to_string(PlantedRule r) {
  switch (r) {
    case PlantedRule::none: return "none";
    case PlantedRule::negativity: return "negativity";
    case PlantedRule::absolute: return "absolute";
    case PlantedRule::deviation: return "deviation";
  }
  return "?";
}

/// Polarity mix (positive, negative, neutral) of messages in a discussion.
using PolarityMix = std::array<double, 3>;

struct SynthConfig {
  Channel channel = Channel::bug_tracker;
  std::size_t contributors = 1000;
  std::size_t discussions = 200;
  Timestamp start = 1'104'537'600;  // 2005-01-01
  double span_days = 365;           // first messages are spread over this range
  std::size_t messages_min = 1;
  std::size_t messages_max = 20;

  std::map<EmotionClass, double> class_mix{{EmotionClass::neutral, 1.0}};
  std::map<EmotionClass, PolarityMix> class_emissions{
      {EmotionClass::neutral, {0.28, 0.16, 0.56}},     {EmotionClass::underemotional, {0.08, 0.04, 0.88}},
      {EmotionClass::positive, {0.70, 0.05, 0.25}},    {EmotionClass::negative, {0.05, 0.60, 0.35}},
      {EmotionClass::bipolar, {0.48, 0.42, 0.10}},     {EmotionClass::undetermined, {0.33, 0.20, 0.47}}};
  // Relative weight of strengths 1..5 when drawing p and |n| within a polarity.
  std::array<double, 5> positive_weights{1.0, 0.8, 0.5, 0.25, 0.1};
  std::array<double, 5> negative_weights{1.0, 0.8, 0.5, 0.25, 0.1};
  double discarded_prob = 0;  // chance of an extra discarded-polarity message one second later

  PlantedRule rule = PlantedRule::none;
  double threshold = 1.9;
  double target_prior = 0.088;
  double label_noise = 0;
  int lookback_days = 5;
  int inactivity_days = 30;
  double act_min_days = 0.05;  // ACT gaps: power law on [act_min_days, inactivity_days)
  double act_alpha = 1.8;
  double ina_extra_mean_days = 60;  // INA gaps: inactivity_days + exponential
};


inline void validate(const SynthConfig& c) {
  auto fail = [](const std::string& m) { throw ValidationError("synth config: " + m); };
  if (c.contributors < 1) fail("contributors must be >= 1");
  if (c.discussions < 1) fail("discussions must be >= 1");
  if (c.messages_min < 1 || c.messages_max < c.messages_min) fail("need 1 <= messages.min <= messages.max");
  if (c.start < 0) fail("start must be >= 0");
  if (!(c.span_days >= 0)) fail("span_days must be >= 0");
  if (!(c.target_prior >= 0 && c.target_prior <= 1)) fail("target_prior must be in [0, 1]");
  if (!(c.label_noise >= 0 && c.label_noise <= 1)) fail("label_noise must be in [0, 1]");
  if (!(c.discarded_prob >= 0 && c.discarded_prob <= 1)) fail("discarded_prob must be in [0, 1]");
  if (c.lookback_days < 0) fail("lookback_days must be >= 0");
  if (c.inactivity_days < 1) fail("inactivity_days must be >= 1");
  if (!(c.act_min_days * kDay >= 2) || !(c.act_min_days < c.inactivity_days))
    fail("act_min_days must be >= 2 seconds and below inactivity_days");
  if (!(c.act_alpha > 0)) fail("act_alpha must be > 0");
  if (!(c.ina_extra_mean_days >= 0)) fail("ina_extra_mean_days must be >= 0");
  double mix = 0;
  for (const auto& [cls, w] : c.class_mix) {
    if (!(w >= 0)) fail("class_mix weights must be >= 0");
    mix += w;
    if (w > 0 && !c.class_emissions.count(cls)) fail("no emissions for class " + std::string(to_string(cls)));
  }
  if (!(mix > 0)) fail("class_mix must have positive total weight");
  for (const auto& [cls, e] : c.class_emissions) {
    if (e[0] < 0 || e[1] < 0 || e[2] < 0 || !(e[0] + e[1] + e[2] > 0))
      fail("emissions for " + std::string(to_string(cls)) + " must be non-negative with positive sum");
  }
  auto weights = [&](const std::array<double, 5>& w, const char* name) {
    for (double x : w)
      if (!(x >= 0)) fail(std::string(name) + " weights must be >= 0");
  };
  weights(c.positive_weights, "positive");
  weights(c.negative_weights, "negative");
}

inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig c;
  try {
    if (j.contains("channel")) c.channel = parse_channel(j["channel"].get<std::string>());
    detail::read_if(j, "contributors", c.contributors);
    detail::read_if(j, "discussions", c.discussions);
    detail::read_if(j, "start", c.start);
    detail::read_if(j, "span_days", c.span_days);
    if (const auto& m = detail::opt(j, "messages_per_contributor"); m.is_object()) {
      detail::read_if(m, "min", c.messages_min);
      detail::read_if(m, "max", c.messages_max);
    }
    if (const auto& m = detail::opt(j, "class_mix"); m.is_object()) {
      c.class_mix.clear();
      for (const auto& [k, v] : m.items()) c.class_mix[parse_emotion_class(k)] = v.get<double>();
    }
    if (const auto& m = detail::opt(j, "class_emissions"); m.is_object()) {
      for (const auto& [k, v] : m.items()) {
        PolarityMix e{v.at("positive").get<double>(), v.at("negative").get<double>(),
                      v.at("neutral").get<double>()};
        c.class_emissions[parse_emotion_class(k)] = e;
      }
    }
    if (const auto& m = detail::opt(j, "strength_weights"); m.is_object()) {
      detail::read_if(m, "positive", c.positive_weights);
      detail::read_if(m, "negative", c.negative_weights);
    }
    detail::read_if(j, "discarded_prob", c.discarded_prob);
    if (const auto& r = detail::opt(j, "inactivity"); r.is_object()) {
      if (r.contains("rule")) c.rule = parse_planted_rule(r["rule"].get<std::string>());
      detail::read_if(r, "threshold", c.threshold);
      detail::read_if(r, "target_prior", c.target_prior);
      detail::read_if(r, "label_noise", c.label_noise);
      detail::read_if(r, "lookback_days", c.lookback_days);
      detail::read_if(r, "inactivity_days", c.inactivity_days);
    }
    if (const auto& g = detail::opt(j, "gaps"); g.is_object()) {
      detail::read_if(g, "act_min_days", c.act_min_days);
      detail::read_if(g, "act_alpha", c.act_alpha);
      detail::read_if(g, "ina_extra_mean_days", c.ina_extra_mean_days);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("synth config: ") + e.what());
  }
  validate(c);
  return c;
}

// ---------------------------------------------------------------------------
// Vocabulary of the synthetic lexicon. Rendering a score with it and scoring
// the text back with `synthetic_lexicon()` reproduces the score.

namespace synth_vocab {

inline constexpr std::array<const char*, 4> kPositive{"thanks", "great", "excellent", "brilliant"};    // 2..5
inline constexpr std::array<const char*, 4> kNegative{"annoying", "awful", "horrible", "disastrous"};  // -2..-5
inline constexpr std::array<const char*, 3> kNegators{"not", "never", "no"};
inline constexpr std::array<const char*, 2> kUp{"very", "really"};
inline constexpr std::array<const char*, 2> kDown{"slightly", "somewhat"};
inline constexpr std::array<const char*, 20> kFiller{
    "the",     "patch",   "build",  "release", "ebuild",  "maintainer", "version",
    "upstream", "update", "package", "keyword", "profile", "commit",     "tree",
    "stable",  "testing", "bump",   "herd",    "overlay", "arch"};

}  // namespace synth_vocab

inline Lexicon synthetic_lexicon() {
  Lexicon lex;
  for (int s = 2; s <= 5; ++s) {
    lex.add_term(synth_vocab::kPositive[static_cast<std::size_t>(s - 2)], s);
    lex.add_term(synth_vocab::kNegative[static_cast<std::size_t>(s - 2)], -s);
  }
  for (auto w : synth_vocab::kNegators) lex.add_negator(w);
  for (auto w : synth_vocab::kUp) lex.add_booster(w, 1);
  for (auto w : synth_vocab::kDown) lex.add_booster(w, -1);
  return lex;
}

/// Writes terms.tsv, negators.txt and boosters.tsv for the synthetic lexicon.
inline void write_synthetic_lexicon(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream terms(dir / "terms.tsv"), neg(dir / "negators.txt"), boost(dir / "boosters.tsv");
  terms << "# term\tstrength\n";
  for (int s = 2; s <= 5; ++s) terms << synth_vocab::kPositive[static_cast<std::size_t>(s - 2)] << '\t' << s << '\n';
  for (int s = 2; s <= 5; ++s) terms << synth_vocab::kNegative[static_cast<std::size_t>(s - 2)] << '\t' << -s << '\n';
  for (auto w : synth_vocab::kNegators) neg << w << '\n';
  for (auto w : synth_vocab::kUp) boost << w << "\t1\n";
  for (auto w : synth_vocab::kDown) boost << w << "\t-1\n";
  if (!terms || !neg || !boost) throw Error("cannot write lexicon to " + dir.string());
}

namespace detail {

// One lexical piece expressing `strength` (sign gives polarity, |strength| in 2..5).
inline std::string render_piece(int strength, Rng& rng) {
  using namespace synth_vocab;
  const int mag = std::abs(strength);
  const auto& same = strength > 0 ? kPositive : kNegative;
  const auto& opposite = strength > 0 ? kNegative : kPositive;
  auto word = [](const std::array<const char*, 4>& v, int m) { return std::string(v[static_cast<std::size_t>(m - 2)]); };
  switch (rng.below(4)) {
    case 1:
      if (mag >= 3) return std::string(kUp[rng.below(kUp.size())]) + " " + word(same, mag - 1);
      break;
    case 2:
      if (mag <= 4) return std::string(kDown[rng.below(kDown.size())]) + " " + word(same, mag + 1);
      break;
    case 3:
      return std::string(kNegators[rng.below(kNegators.size())]) + " " + word(opposite, mag);
    default:
      break;
  }
  return word(same, mag);
}

inline void append_filler(std::string& out, Rng& rng, std::size_t lo, std::size_t hi) {
  const auto k = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
  for (std::size_t i = 0; i < k; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += synth_vocab::kFiller[rng.below(synth_vocab::kFiller.size())];
  }
}

}  // namespace detail

/// Message text whose score under synthetic_lexicon() is exactly (p, n).
/// Pieces are separated by at least two filler words so negators and
/// boosters only reach their own term.
inline std::string render_text(int p, int n, Rng& rng) {
  std::vector<std::string> pieces;
  if (p > 1) pieces.push_back(detail::render_piece(p, rng));
  if (n < -1) pieces.push_back(detail::render_piece(n, rng));
  if (pieces.size() == 2 && rng.bernoulli(0.5)) std::swap(pieces[0], pieces[1]);
  std::string out;
  detail::append_filler(out, rng, 2, 4);
  for (const auto& piece : pieces) {
    out += ' ';
    out += piece;
    detail::append_filler(out, rng, 2, 4);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct TruthRecord {
  std::string id;
  std::string author;
  Timestamp ts = 0;
  std::string discussion;
  EmotionClass discussion_class = EmotionClass::neutral;
  int p = 1, n = -1;
  bool extra_discarded = false;
  std::optional<ActivityLabel> intended;  // empty for a contributor's last message
  std::optional<ActivityLabel> label;     // realized interval label
  bool noisy = false;                     // label resampled by label noise
};

struct SynthStats {
  std::size_t messages = 0;
  std::size_t intervals = 0;
  std::size_t inactive = 0;
  std::size_t infeasible = 0;       // intervals whose intended label the rule could not realize
  std::size_t unpaid_debt = 0;      // infeasible labels never compensated later
  std::size_t noisy = 0;
  double empirical_prior() const { return intervals ? static_cast<double>(inactive) / static_cast<double>(intervals) : 0; }
};

struct SynthResult {
  Corpus corpus;  // scored
  std::vector<TruthRecord> truth;
  std::map<std::string, EmotionClass> discussion_classes;
  SynthStats stats;
};

inline nlohmann::ordered_json truth_to_json(const TruthRecord& t) {
  nlohmann::ordered_json j;
  j["id"] = t.id;
  j["author"] = t.author;
  j["ts"] = t.ts;
  j["disc"] = t.discussion;
  j["class"] = to_string(t.discussion_class);
  j["p"] = t.p;
  j["n"] = t.n;
  j["discarded_extra"] = t.extra_discarded;
  j["intended"] = t.intended ? nlohmann::ordered_json(to_string(*t.intended)) : nlohmann::ordered_json(nullptr);
  j["label"] = t.label ? nlohmann::ordered_json(to_string(*t.label)) : nlohmann::ordered_json(nullptr);
  j["noisy"] = t.noisy;
  return j;
}

inline void write_truth_jsonl(std::ostream& out, const std::vector<TruthRecord>& truth) {
  for (const auto& t : truth) out << truth_to_json(t).dump() << '\n';
}

/// Labeled intervals implied by the ground truth, in the order of label_corpus.
inline std::vector<LabeledInterval> truth_intervals(const SynthResult& r) {
  std::vector<LabeledInterval> out;
  std::map<std::string, std::vector<const TruthRecord*>> by_author;
  for (const auto& t : r.truth)
    if (!t.extra_discarded) by_author[t.author].push_back(&t);
  for (const auto& [author, recs] : by_author) {
    for (std::size_t i = 0; i + 1 < recs.size(); ++i)
      out.push_back({author, recs[i]->ts, seconds_to_days(recs[i + 1]->ts - recs[i]->ts), *recs[i]->label});
  }
  return out;
}

namespace detail {

struct Cell {
  int p, n;
  Polarity polarity;
};

inline const std::array<Cell, 25>& score_cells() {
  static const auto cells = [] {
    std::array<Cell, 25> c{};
    std::size_t i = 0;
    for (int p = 1; p <= 5; ++p)
      for (int n = -1; n >= -5; --n) c[i++] = {p, n, classify_polarity(p, n)};
    return c;
  }();
  return cells;
}

// Probability of each of the 25 cells for a polarity mix; discarded cells get 0.
inline std::array<double, 25> cell_weights(const PolarityMix& mix, const SynthConfig& c) {
  const auto& cells = score_cells();
  std::array<double, 25> w{};
  std::array<double, 3> totals{};
  auto slot = [](Polarity p) { return p == Polarity::positive ? 0 : p == Polarity::negative ? 1 : 2; };
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].polarity == Polarity::discarded) continue;
    w[i] = c.positive_weights[static_cast<std::size_t>(cells[i].p - 1)] *
           c.negative_weights[static_cast<std::size_t>(-cells[i].n - 1)];
    totals[static_cast<std::size_t>(slot(cells[i].polarity))] += w[i];
  }
  const double mix_total = mix[0] + mix[1] + mix[2];
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (w[i] == 0) continue;
    const auto s = static_cast<std::size_t>(slot(cells[i].polarity));
    w[i] = mix[s] / mix_total * w[i] / totals[s];
  }
  for (std::size_t s = 0; s < 3; ++s)
    if (mix[s] > 0 && totals[s] == 0)
      throw ValidationError("synth config: strength weights leave no cell for a polarity with positive mix");
  return w;
}

struct AuthorHistory {
  std::vector<Timestamp> ts;
  std::vector<std::int64_t> cum_p{0}, cum_n{0};
};

// Planted rule outcome if the author's next message at `t` had score (p, n).
inline ActivityLabel rule_outcome(const SynthConfig& c, const AuthorHistory& h, Timestamp t, int p, int n) {
  const Timestamp horizon = t - static_cast<Timestamp>(c.lookback_days) * kDay;
  const auto begin = static_cast<std::size_t>(std::lower_bound(h.ts.begin(), h.ts.end(), horizon) - h.ts.begin());
  const auto k = h.ts.size();
  const double w = static_cast<double>(k - begin + 1);
  const double P = static_cast<double>(h.cum_p[k] - h.cum_p[begin] + p) / w;
  const double N = static_cast<double>(h.cum_n[k] - h.cum_n[begin] + n) / w;
  const double all = static_cast<double>(k + 1);
  const double Pbar = static_cast<double>(h.cum_p[k] + p) / all;
  const double Nbar = static_cast<double>(h.cum_n[k] + n) / all;
  bool ina = false;
  switch (c.rule) {
    case PlantedRule::none: break;
    case PlantedRule::negativity: ina = std::abs(N) > c.threshold; break;
    case PlantedRule::absolute: ina = std::abs(N) > c.threshold || std::abs(P) > c.threshold; break;
    case PlantedRule::deviation: ina = std::abs(N - Nbar) > c.threshold || std::abs(P - Pbar) > c.threshold; break;
  }
  return ina ? ActivityLabel::INA : ActivityLabel::ACT;
}

inline double truncated_pareto(Rng& rng, double lo, double hi, double alpha) {
  const double u = rng.uniform();
  if (std::abs(alpha - 1) < 1e-12) return lo * std::pow(hi / lo, u);
  const double a = std::pow(lo, 1 - alpha), b = std::pow(hi, 1 - alpha);
  return std::pow(a + u * (b - a), 1 / (1 - alpha));
}

}  // namespace detail

/// Deterministic for a fixed (config, seed). Contributors are generated one
/// after another. Each non-final message carries an intended interval label
/// drawn from the target prior; its score is drawn from its discussion's
/// emissions restricted to cells for which the planted rule yields that
/// label. When no cell does, the other label is used and the miss is repaid
/// by the next interval that can realize it. Label noise then replaces the
/// label with a fresh draw from the prior, and the gap to the next message
/// is drawn from the ACT or INA gap law.
inline SynthResult generate_synthetic_corpus(const SynthConfig& c, std::uint64_t seed) {
  validate(c);
  Rng rng(seed);
  SynthResult r;

  std::vector<EmotionClass> classes;
  std::vector<double> mix;
  for (const auto& [cls, w] : c.class_mix) {
    classes.push_back(cls);
    mix.push_back(w);
  }
  std::map<EmotionClass, std::array<double, 25>> weights;
  for (auto cls : classes) weights[cls] = detail::cell_weights(c.class_emissions.at(cls), c);
  const int width = static_cast<int>(std::to_string(c.discussions).size());
  std::vector<EmotionClass> disc_class(c.discussions);
  std::vector<std::string> disc_id(c.discussions);
  for (std::size_t d = 0; d < c.discussions; ++d) {
    disc_class[d] = classes[rng.categorical(mix)];
    disc_id[d] = fmt::format("d{:0{}}", d, width);
    r.discussion_classes[disc_id[d]] = disc_class[d];
  }

  const auto& cells = detail::score_cells();
  const int uwidth = static_cast<int>(std::to_string(c.contributors).size());
  const Timestamp threshold = static_cast<Timestamp>(c.inactivity_days) * kDay;
  std::array<std::size_t, 2> debt{};  // indexed by ActivityLabel
  std::vector<Message> messages;

  for (std::size_t u = 0; u < c.contributors; ++u) {
    const std::string author = fmt::format("u{:0{}}", u, uwidth);
    const auto count = static_cast<std::size_t>(
        rng.between(static_cast<std::int64_t>(c.messages_min), static_cast<std::int64_t>(c.messages_max)));
    Timestamp t = c.start + static_cast<Timestamp>(std::floor(rng.uniform() * c.span_days * kDay));
    detail::AuthorHistory hist;
    for (std::size_t i = 0; i < count; ++i) {
      const bool last = i + 1 == count;
      const auto d = static_cast<std::size_t>(rng.below(c.discussions));
      const auto& w = weights.at(disc_class[d]);
      TruthRecord rec;
      rec.id = fmt::format("{}-m{}", author, i);
      rec.author = author;
      rec.ts = t;
      rec.discussion = disc_id[d];
      rec.discussion_class = disc_class[d];

      std::size_t cell = 0;
      if (last) {
        cell = rng.categorical(w);
      } else {
        auto intended = rng.bernoulli(c.target_prior) ? ActivityLabel::INA : ActivityLabel::ACT;
        if (c.rule == PlantedRule::none) {
          cell = rng.categorical(w);
        } else {
          std::array<double, 25> masked[2]{};
          std::array<double, 2> mass{};
          for (std::size_t k = 0; k < cells.size(); ++k) {
            if (w[k] == 0) continue;
            const auto o = static_cast<std::size_t>(detail::rule_outcome(c, hist, t, cells[k].p, cells[k].n));
            masked[o][k] = w[k];
            mass[o] += w[k];
          }
          const auto other = intended == ActivityLabel::ACT ? ActivityLabel::INA : ActivityLabel::ACT;
          const auto io = static_cast<std::size_t>(intended), oo = static_cast<std::size_t>(other);
          if (debt[oo] > 0 && mass[oo] > 0) {
            --debt[oo];
            intended = other;
          } else if (mass[io] == 0) {
            ++debt[io];
            ++r.stats.infeasible;
            intended = other;
          }
          cell = rng.categorical(masked[static_cast<std::size_t>(intended)]);
        }
        rec.intended = intended;
        rec.label = intended;
        if (c.label_noise > 0 && rng.bernoulli(c.label_noise)) {
          rec.label = rng.bernoulli(c.target_prior) ? ActivityLabel::INA : ActivityLabel::ACT;
          rec.noisy = true;
          ++r.stats.noisy;
        }
      }
      rec.p = cells[cell].p;
      rec.n = cells[cell].n;
      hist.ts.push_back(t);
      hist.cum_p.push_back(hist.cum_p.back() + rec.p);
      hist.cum_n.push_back(hist.cum_n.back() + rec.n);

      messages.push_back({rec.id, author, t, rec.discussion, c.channel, render_text(rec.p, rec.n, rng),
                          SentimentScore::from(rec.p, rec.n)});
      const bool extra = c.discarded_prob > 0 && rng.bernoulli(c.discarded_prob);
      const auto label = rec.label;
      r.truth.push_back(std::move(rec));
      if (extra) {
        const int s = rng.bernoulli(0.5) ? 4 : 5;
        TruthRecord x;
        x.id = fmt::format("{}-m{}x", author, i);
        x.author = author;
        x.ts = t + 1;
        x.discussion = disc_id[d];
        x.discussion_class = disc_class[d];
        x.p = s;
        x.n = -s;
        x.extra_discarded = true;
        messages.push_back({x.id, author, x.ts, x.discussion, c.channel, render_text(s, -s, rng),
                            SentimentScore::from(s, -s)});
        r.truth.push_back(std::move(x));
      }
      if (!last) {
        ++r.stats.intervals;
        Timestamp gap;
        if (*label == ActivityLabel::ACT) {
          const double days = detail::truncated_pareto(rng, c.act_min_days, c.inactivity_days, c.act_alpha);
          gap = std::clamp<Timestamp>(static_cast<Timestamp>(std::floor(days * kDay)), 2, threshold - 1);
        } else {
          ++r.stats.inactive;
          gap = threshold + static_cast<Timestamp>(std::ceil(rng.exponential(c.ina_extra_mean_days) * kDay));
        }
        t += gap;
      }
    }
  }
  r.stats.unpaid_debt = debt[0] + debt[1];
  r.stats.messages = messages.size();
  r.corpus = Corpus::build(std::move(messages), c.channel);
  std::sort(r.truth.begin(), r.truth.end(), [](const TruthRecord& a, const TruthRecord& b) {
    return a.ts != b.ts ? a.ts < b.ts : a.id < b.id;
  });
  return r;
}

}  // namespace ossmood
