#pragma once

// End-to-end pipeline: ingest, score, classify, timeseries, activity,
// features, fit and evaluate, with a content-hashed manifest and a report.

#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "ossmood/activity.hpp"
#include "ossmood/bugzilla.hpp"
#include "ossmood/churn.hpp"
#include "ossmood/corpus.hpp"
#include "ossmood/discussion.hpp"
#include "ossmood/mbox.hpp"
#include "ossmood/sentiment.hpp"

namespace ossmood {

namespace fs = std::filesystem;

inline constexpr int kExitInputError = 2;
inline constexpr int kExitStageFailure = 3;

/// Pipeline failure tagged with the stage and the process exit code.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& what, int exit_code)
      : Error(stage + ": " + what), stage_(std::move(stage)), exit_code_(exit_code) {}
  const std::string& stage() const noexcept { return stage_; }
  int exit_code() const noexcept { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

enum class InputFormat { bugzilla_json, bugzilla_xml, mbox, jsonl };

inline InputFormat parse_input_format(std::string_view s) {
  if (s == "bugzilla-json") return InputFormat::bugzilla_json;
  if (s == "bugzilla-xml") return InputFormat::bugzilla_xml;
  if (s == "mbox") return InputFormat::mbox;
  if (s == "jsonl") return InputFormat::jsonl;
  throw ValidationError("unknown input format '" + std::string(s) + "'");
}

inline std::string_view to_string(InputFormat f) {
  switch (f) {
    case InputFormat::bugzilla_json: return "bugzilla-json";
    case InputFormat::bugzilla_xml: return "bugzilla-xml";
    case InputFormat::mbox: return "mbox";
    case InputFormat::jsonl: return "jsonl";
  }
  return "?";
}

inline InputFormat guess_input_format(const fs::path& p) {
  const auto ext = Lexicon::lowercase(p.extension().string());
  if (ext == ".jsonl") return InputFormat::jsonl;
  if (ext == ".json") return InputFormat::bugzilla_json;
  if (ext == ".xml") return InputFormat::bugzilla_xml;
  return InputFormat::mbox;
}

struct InputSpec {
  fs::path path;
  InputFormat format = InputFormat::jsonl;
  bool include_subject = false;  // mbox only
};

struct PartitionSpec {
  std::optional<nlohmann::json> periods;  // parse_periods layout
  std::optional<std::string> split_author;
};

struct PipelineConfig {
  Channel channel = Channel::bug_tracker;
  fs::path lexicon_dir = "data/lexicon";
  double theta_absolute = kThetaAbsolute;
  double theta_deviation = kThetaDeviation;
  std::optional<PredictMode> mode;  // default: absolute for bug trackers, deviation for mailing lists
  int moving_average_days = 30;
  int inactivity_days = kInactivityDays;
  int lookback_days = kLookbackDays;
  double alpha = kDefaultAlpha;
  std::size_t min_messages = kDefaultMinMessages;
  std::size_t bins = kPosteriorBins;
  double bandwidth = kBandwidth;
  std::size_t reps = kBootstrapReps;
  std::uint64_t seed = kBootstrapSeed;
  BaselineMode baseline = BaselineMode::causal;
  double xmin_days = 1.0;
  double boundary_hint_days = 30.0;
  unsigned jobs = 1;
  bool include_subject = false;
  PartitionSpec partition;

  PredictMode effective_mode() const {
    return mode.value_or(channel == Channel::bug_tracker ? PredictMode::absolute : PredictMode::deviation);
  }
  double effective_theta() const {
    return effective_mode() == PredictMode::absolute ? theta_absolute : theta_deviation;
  }
};

inline void validate(const PipelineConfig& c) {
  auto fail = [](const std::string& m) { throw ValidationError("config: " + m); };
  if (c.moving_average_days < 1 || c.inactivity_days < 1 || c.lookback_days < 1) fail("all windows must be > 0");
  if (!(c.alpha > 0 && c.alpha < 1)) fail("alpha must be in (0, 1)");
  if (c.bins < 2) fail("bins must be >= 2");
  if (!(c.bandwidth > 0)) fail("bandwidth must be > 0");
  if (c.reps < 1) fail("reps must be >= 1");
  if (!(c.xmin_days > 0) || !(c.boundary_hint_days > c.xmin_days)) fail("need 0 < xmin < boundary_hint");
  if (c.partition.periods && c.partition.split_author) fail("give either periods or split_author, not both");
}

inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j, PipelineConfig c = {}) {
  static const std::set<std::string> known = {
      "channel", "lexicon_dir", "theta_absolute", "theta_deviation", "mode", "moving_average_days",
      "inactivity_days", "lookback_days", "alpha", "min_messages", "bins", "bandwidth", "reps", "seed",
      "baseline", "xmin_days", "boundary_hint_days", "jobs", "include_subject", "periods", "split_author"};
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ValidationError("config: unknown key '" + k + "'");
  try {
    if (j.contains("channel")) c.channel = parse_channel(j["channel"].get<std::string>());
    if (j.contains("lexicon_dir")) c.lexicon_dir = j["lexicon_dir"].get<std::string>();
    if (j.contains("mode")) c.mode = parse_predict_mode(j["mode"].get<std::string>());
    if (j.contains("baseline")) c.baseline = parse_baseline_mode(j["baseline"].get<std::string>());
    detail::read_if(j, "theta_absolute", c.theta_absolute);
    detail::read_if(j, "theta_deviation", c.theta_deviation);
    detail::read_if(j, "moving_average_days", c.moving_average_days);
    detail::read_if(j, "inactivity_days", c.inactivity_days);
    detail::read_if(j, "lookback_days", c.lookback_days);
    detail::read_if(j, "alpha", c.alpha);
    detail::read_if(j, "min_messages", c.min_messages);
    detail::read_if(j, "bins", c.bins);
    detail::read_if(j, "bandwidth", c.bandwidth);
    detail::read_if(j, "reps", c.reps);
    detail::read_if(j, "seed", c.seed);
    detail::read_if(j, "xmin_days", c.xmin_days);
    detail::read_if(j, "boundary_hint_days", c.boundary_hint_days);
    detail::read_if(j, "jobs", c.jobs);
    detail::read_if(j, "include_subject", c.include_subject);
    if (j.contains("periods")) c.partition.periods = j["periods"];
    if (j.contains("split_author")) c.partition.split_author = j["split_author"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

inline nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["channel"] = channel_code(c.channel);
  j["lexicon_dir"] = c.lexicon_dir.generic_string();
  j["mode"] = to_string(c.effective_mode());
  j["theta_absolute"] = c.theta_absolute;
  j["theta_deviation"] = c.theta_deviation;
  j["moving_average_days"] = c.moving_average_days;
  j["inactivity_days"] = c.inactivity_days;
  j["lookback_days"] = c.lookback_days;
  j["alpha"] = c.alpha;
  j["min_messages"] = c.min_messages;
  j["bins"] = c.bins;
  j["bandwidth"] = c.bandwidth;
  j["reps"] = c.reps;
  j["seed"] = c.seed;
  j["baseline"] = to_string(c.baseline);
  j["xmin_days"] = c.xmin_days;
  j["boundary_hint_days"] = c.boundary_hint_days;
  j["include_subject"] = c.include_subject;
  if (c.partition.periods) j["periods"] = *c.partition.periods;
  if (c.partition.split_author) j["split_author"] = *c.partition.split_author;
  return j;
}

// ---------------------------------------------------------------------------

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  std::string out;
  for (unsigned i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw LoadError(p.string(), 0, "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("cannot write " + p.string());
}

/// Parses one input file into messages.
inline ParsedMessages ingest_file(const InputSpec& in) {
  std::ifstream s(in.path, std::ios::binary);
  if (!s) throw LoadError(in.path.string(), 0, "cannot open");
  switch (in.format) {
    case InputFormat::bugzilla_json: return parse_bugzilla_export(s, BugzillaFormat::json);
    case InputFormat::bugzilla_xml: return parse_bugzilla_export(s, BugzillaFormat::xml);
    case InputFormat::mbox: return parse_mbox(s, in.include_subject);
    case InputFormat::jsonl: {
      auto batch = read_messages_jsonl(s);
      return {std::move(batch.messages), std::move(batch.issues), {}};
    }
  }
  return {};
}

/// Parses inputs concurrently (up to `jobs` at once) and merges them into one corpus.
inline Corpus ingest_inputs(const std::vector<InputSpec>& inputs, Channel channel, std::vector<RecordIssue>& issues,
                            unsigned jobs = 1) {
  std::vector<ParsedMessages> parsed(inputs.size());
  jobs = std::max(1u, jobs);
  for (std::size_t base = 0; base < inputs.size(); base += jobs) {
    std::vector<std::future<ParsedMessages>> futures;
    for (std::size_t i = base; i < std::min(inputs.size(), base + jobs); ++i)
      futures.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async, ingest_file, inputs[i]));
    for (std::size_t k = 0; k < futures.size(); ++k) parsed[base + k] = futures[k].get();
  }
  std::vector<Message> all;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const auto tag = inputs[i].path.filename().string() + ": ";
    for (auto& e : parsed[i].issues) issues.push_back({tag + e.record, e.reason});
    for (auto& e : parsed[i].warnings) issues.push_back({tag + e.record, "warning: " + e.reason});
    std::move(parsed[i].messages.begin(), parsed[i].messages.end(), std::back_inserter(all));
  }
  return Corpus::build(std::move(all), channel, &issues);
}

/// Scores every message with `lex`.
inline Corpus score_corpus(const Corpus& corpus, const Lexicon& lex, unsigned jobs = 1) {
  std::vector<Message> ms = corpus.messages();
  jobs = std::max(1u, jobs);
  auto run = [&](std::size_t begin, std::size_t step) {
    for (auto i = begin; i < ms.size(); i += step) ms[i].score = score_message(lex, ms[i].text);
  };
  if (jobs == 1) run(0, 1);
  else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(run, j, jobs);
  }
  return Corpus::build(std::move(ms), corpus.channel(), nullptr, corpus.window());
}

// ---------------------------------------------------------------------------

struct ArtifactEntry {
  std::string stage;
  std::string file;
  std::string sha256;
  std::size_t bytes = 0;
};

inline const std::vector<std::pair<std::string, std::string>>& pipeline_stages() {
  static const std::vector<std::pair<std::string, std::string>> stages = {
      {"ingest", "corpus.jsonl"},     {"score", "scored.jsonl"},      {"classify", "classes.csv"},
      {"timeseries", "series.csv"},   {"activity", "activity.json"},  {"features", "features.jsonl"},
      {"fit", "model.json"},          {"evaluate", "evaluation.json"}};
  return stages;
}

struct RunManifest {
  nlohmann::ordered_json config;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::vector<ArtifactEntry> artifacts;
  std::size_t record_issues = 0;
  bool ok = false;
  std::optional<std::string> failed_stage;
  std::optional<std::string> error;
};

inline nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["status"] = m.ok ? "ok" : "failed";
  if (m.failed_stage) j["failed_stage"] = *m.failed_stage;
  if (m.error) j["error"] = *m.error;
  j["config"] = m.config;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const auto& [p, h] : m.inputs) j["inputs"].push_back({{"path", p}, {"sha256", h}});
  j["record_issues"] = m.record_issues;
  j["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& a : m.artifacts)
    j["artifacts"].push_back({{"stage", a.stage}, {"file", a.file}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  return j;
}

namespace detail {

inline std::string classes_csv(const CorpusClassification& cc) {
  std::ostringstream s;
  write_classes_csv(s, cc);
  return s.str();
}

inline nlohmann::ordered_json test_json(const stats::TestResult& t) {
  nlohmann::ordered_json j;
  j["statistic"] = t.statistic;
  j["p_value"] = t.p_value;
  j["alternative"] = stats::to_string(t.alternative);
  j["estimate"] = t.estimate;
  j["method"] = stats::to_string(t.method);
  return j;
}

}  // namespace detail

/// Runs the eight stages into `out_dir`, writing manifest.json after every
/// stage so a failure leaves a partial manifest. Throws PipelineError.
inline RunManifest run_pipeline(const PipelineConfig& config, const std::vector<InputSpec>& inputs,
                                const fs::path& out_dir) {
  RunManifest man;
  man.config = config_to_json(config);
  fs::create_directories(out_dir);
  auto save_manifest = [&] { write_file(out_dir / "manifest.json", manifest_to_json(man).dump(2) + "\n"); };
  auto emit = [&](std::size_t stage, const std::string& data) {
    const auto& [name, file] = pipeline_stages()[stage];
    write_file(out_dir / file, data);
    man.artifacts.push_back({name, file, sha256_hex(data), data.size()});
    save_manifest();
  };
  std::string current = "ingest";
  auto fail = [&](const std::string& what, int code) -> PipelineError {
    man.failed_stage = current;
    man.error = what;
    save_manifest();
    return PipelineError(current, what, code);
  };

  Corpus corpus;
  try {
    validate(config);
    if (inputs.empty()) throw ValidationError("no inputs");
    for (const auto& in : inputs) man.inputs.emplace_back(in.path.generic_string(), sha256_hex(read_file(in.path)));
    std::vector<RecordIssue> issues;
    auto specs = inputs;
    for (auto& in : specs) in.include_subject = in.include_subject || config.include_subject;
    corpus = ingest_inputs(specs, config.channel, issues, config.jobs);
    man.record_issues = issues.size();
    if (corpus.empty()) throw ValidationError("inputs contain no valid messages");
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw fail(e.what(), kExitInputError);
  }

  try {
    std::ostringstream s;
    write_corpus_jsonl(s, corpus);
    emit(0, s.str());

    current = "score";
    const auto lex = load_lexicon_dir(config.lexicon_dir);
    const auto scored = score_corpus(corpus, lex, config.jobs);
    s.str("");
    write_corpus_jsonl(s, scored);
    emit(1, s.str());
    const auto kept = scored.without_discarded();

    current = "classify";
    const auto base = compute_baseline(kept);
    const auto cc = classify_corpus(kept, base, config.alpha, config.min_messages);
    emit(2, detail::classes_csv(cc));

    current = "timeseries";
    s.str("");
    write_series_csv(s, emotion_timeseries(kept, config.moving_average_days));
    emit(3, s.str());

    current = "activity";
    const auto labeled = label_corpus(kept, config.inactivity_days);
    nlohmann::ordered_json act;
    try {
      const auto a = max_interevent_analysis(build_timelines(kept), config.xmin_days, config.boundary_hint_days);
      act = activity_sidecar(a, labeled);
      auto& h = act["histogram"];
      h = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < a.histogram.counts.size(); ++i)
        h.push_back({{"bin_lo", a.histogram.bin_edges[i]},
                     {"bin_hi", a.histogram.bin_edges[i + 1]},
                     {"count", a.histogram.counts[i]},
                     {"density", a.histogram.densities[i]}});
    } catch (const Error& e) {
      act["one_time_contributors"] = labeled.one_time_contributors;
      act["intervals"] = labeled.intervals.size();
      act["ina_prior"] = labeled.intervals.empty() ? 0.0 : ina_prior(labeled.intervals);
      act["fit_error"] = e.what();
    }
    emit(4, act.dump(2) + "\n");

    current = "features";
    const auto features = extract_features(kept, labeled.intervals, config.lookback_days, config.baseline);
    s.str("");
    write_features_jsonl(s, features);
    emit(5, s.str());

    current = "fit";
    const auto mode = config.effective_mode();
    const double theta = config.effective_theta();
    const auto model = fit_model(features, mode, theta, config.bandwidth, config.bins, config.lookback_days);
    emit(6, model_to_json(model).dump(2) + "\n");

    current = "evaluate";
    std::vector<ActivityLabel> truth;
    truth.reserve(features.size());
    for (const auto& f : features) truth.push_back(f.interval.label);
    const auto pred = predict(features, mode, theta);
    const auto rep = evaluate(pred, truth, config.reps, config.seed, config.jobs);
    nlohmann::ordered_json ev;
    ev["mode"] = to_string(mode);
    ev["theta"] = theta;
    ev["report"] = report_to_json(rep);
    try {
      const auto w = wilcoxon_conditionals(features);
      ev["wilcoxon"]["P"] = detail::test_json(w.P);
      ev["wilcoxon"]["N"] = detail::test_json(w.N);
    } catch (const Error& e) {
      ev["wilcoxon_error"] = e.what();
    }
    emit(7, ev.dump(2) + "\n");
  } catch (const std::exception& e) {
    throw fail(e.what(), kExitStageFailure);
  }
  man.ok = true;
  save_manifest();
  return man;
}

// ---------------------------------------------------------------------------

struct ReportSummary {
  nlohmann::ordered_json json;
  std::string text;
};

/// Builds summary.txt and report.json from a bundle directory. Every number
/// is read or recomputed from the bundle's artifacts. Throws
/// ValidationError listing missing artifacts for an incomplete bundle.
inline ReportSummary emit_report(const fs::path& bundle) {
  std::vector<std::string> missing;
  for (const auto& [stage, file] : pipeline_stages())
    if (!fs::exists(bundle / file)) missing.push_back(file);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ValidationError("incomplete bundle, missing: " + list);
  }
  nlohmann::json cfg;
  if (fs::exists(bundle / "manifest.json")) cfg = nlohmann::json::parse(read_file(bundle / "manifest.json")).value("config", nlohmann::json::object());

  std::ifstream scored_in(bundle / "scored.jsonl");
  const auto scored = read_corpus_jsonl(scored_in);
  const auto kept = scored.without_discarded();
  const auto summary = corpus_summary(scored);

  ReportSummary r;
  auto& j = r.json;
  std::string& t = r.text;

  t += "== Corpus ==\n";
  j["corpus"]["messages"] = summary.message_count;
  j["corpus"]["discussions"] = summary.discussion_count;
  j["corpus"]["contributors"] = summary.contributor_count;
  j["corpus"]["channel"] = channel_code(scored.channel());
  t += fmt::format("channel: {}\nmessages: {}\ndiscussions: {}\ncontributors: {}\n", channel_code(scored.channel()),
                   summary.message_count, summary.discussion_count, summary.contributor_count);
  if (summary.window) {
    j["corpus"]["start"] = format_date(summary.window->first);
    j["corpus"]["end"] = format_date(summary.window->second);
    t += fmt::format("window: {} .. {}\n", format_date(summary.window->first), format_date(summary.window->second));
  }

  t += "\n== Polarity ratios ==\n";
  const auto discarded = scored.size() - kept.size();
  j["polarity"]["discarded"] = discarded;
  if (kept.empty()) {
    t += "no scored messages\n";
  } else {
    const auto base = compute_baseline(kept);
    j["polarity"]["positive"] = base.positive;
    j["polarity"]["negative"] = base.negative;
    j["polarity"]["neutral"] = base.neutral;
    t += fmt::format("positive: {:.4f}\nnegative: {:.4f}\nneutral: {:.4f}\ndiscarded messages: {}\n", base.positive,
                     base.negative, base.neutral, discarded);
  }

  t += "\n== Discussion classes ==\n";
  {
    std::ifstream in(bundle / "classes.csv");
    std::string line;
    std::getline(in, line);
    std::map<std::string, std::size_t> freq;
    std::size_t skipped = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto fields = parse_csv_line(line);
      if (fields.size() < 9) throw ValidationError("classes.csv: short record");
      if (fields[8] == "skipped") ++skipped;
      else ++freq[fields[8]];
    }
    std::size_t classified = 0;
    for (const auto& [k, v] : freq) classified += v;
    j["classes"]["classified"] = classified;
    j["classes"]["skipped"] = skipped;
    j["classes"]["frequencies"] = nlohmann::ordered_json::object();
    if (classified == 0) {
      t += "no qualifying discussions\n";
    } else {
      for (auto c : kEmotionClasses) {
        const auto n = freq.count(std::string(to_string(c))) ? freq[std::string(to_string(c))] : 0;
        j["classes"]["frequencies"][std::string(to_string(c))] = n;
        t += fmt::format("{}: {}\n", to_string(c), n);
      }
    }
    t += fmt::format("skipped (too few messages): {}\n", skipped);
  }

  t += "\n== Partition comparisons ==\n";
  {
    std::optional<PartitionRule> rule;
    if (cfg.contains("periods")) rule = parse_periods(cfg["periods"]);
    else if (cfg.contains("split_author")) rule = AuthorSplit{cfg["split_author"].get<std::string>(), std::nullopt};
    if (!rule) {
      t += "no partition configured\n";
      j["comparisons"] = nullptr;
    } else {
      try {
        const auto table = compare_partitions(kept, *rule);
        auto& rows = j["comparisons"]["rows"];
        rows = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
          rows.push_back({{"hypothesis", row.hypothesis(table.first_name, table.second_name)},
                          {"p_value", row.test.p_value},
                          {"alternative", stats::to_string(row.test.alternative)},
                          {"estimate", row.test.estimate}});
          t += fmt::format("{}  p={:.3g}  alt={}  estimate={:.3f}\n", row.hypothesis(table.first_name, table.second_name),
                           row.test.p_value, stats::to_string(row.test.alternative), row.test.estimate);
        }
      } catch (const Error& e) {
        t += fmt::format("comparison undefined: {}\n", e.what());
        j["comparisons"] = {{"error", e.what()}};
      }
    }
  }

  t += "\n== Activity ==\n";
  {
    const auto act = nlohmann::json::parse(read_file(bundle / "activity.json"));
    j["activity"]["intervals"] = act.value("intervals", 0);
    j["activity"]["ina_prior"] = act.value("ina_prior", 0.0);
    j["activity"]["one_time_contributors"] = act.value("one_time_contributors", 0);
    t += fmt::format("intervals: {}\nINA prior: {:.4f}\none-time contributors: {}\n", act.value("intervals", 0),
                     act.value("ina_prior", 0.0), act.value("one_time_contributors", 0));
    if (act.contains("alpha")) {
      j["activity"]["alpha"] = act["alpha"];
      j["activity"]["boundary_days"] = act["boundary_days"];
      j["activity"]["boundary_detected"] = act["boundary_detected"];
      t += fmt::format("max interevent power-law alpha: {:.3f}\nmode boundary: {:.1f} days ({})\n",
                       act["alpha"].get<double>(), act["boundary_days"].get<double>(),
                       act["boundary_detected"].get<bool>() ? "detected" : "default");
    } else {
      t += fmt::format("no power-law fit: {}\n", act.value("fit_error", std::string("unknown")));
    }
  }

  t += "\n== Churn prediction ==\n";
  {
    const auto ev = nlohmann::json::parse(read_file(bundle / "evaluation.json"));
    const auto& rep = ev.at("report");
    j["prediction"]["mode"] = ev.at("mode");
    j["prediction"]["theta"] = ev.at("theta");
    j["prediction"]["reps"] = rep.at("reps");
    t += fmt::format("mode: {}  theta: {}  bootstrap reps: {}\n", ev.at("mode").get<std::string>(),
                     ev.at("theta").get<double>(), rep.at("reps").get<std::size_t>());
    for (const auto* cls : {"ACT", "INA"}) {
      const auto& c = rep.at("classes").at(cls);
      j["prediction"][cls] = c;
      t += fmt::format("{}: prior {:.3f}  precision {:.3f} +- {:.3f}  recall {:.3f} +- {:.3f}\n", cls,
                       c.at("prior").get<double>(), c.at("precision_mean").get<double>(),
                       c.at("precision_std").get<double>(), c.at("recall_mean").get<double>(),
                       c.at("recall_std").get<double>());
    }
  }
  return r;
}

/// Writes summary.txt and report.json into the bundle directory.
inline ReportSummary write_report(const fs::path& bundle) {
  auto r = emit_report(bundle);
  write_file(bundle / "summary.txt", r.text);
  write_file(bundle / "report.json", r.json.dump(2) + "\n");
  return r;
}

}  // namespace ossmood
