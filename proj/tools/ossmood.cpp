// ossmood command-line front end.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "ossmood/pipeline.hpp"
#include "ossmood/stream.hpp"
#include "ossmood/synth.hpp"

using namespace ossmood;
using ojson = nlohmann::ordered_json;

namespace {

unsigned g_jobs = 1;

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw LoadError(p.string(), 0, "cannot open");
  return in;
}

std::ofstream open_out(const fs::path& p, bool append = false) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, append ? std::ios::app : std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

nlohmann::json read_json(const fs::path& p) {
  auto in = open_in(p);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(p.string(), 0, e.what());
  }
}

void report_issues(const std::vector<RecordIssue>& issues) {
  if (issues.empty()) return;
  fmt::print(stderr, "{} record issue(s)\n", issues.size());
  for (std::size_t i = 0; i < std::min<std::size_t>(issues.size(), 10); ++i)
    fmt::print(stderr, "  {}: {}\n", issues[i].record, issues[i].reason);
}

Corpus load_corpus(const fs::path& p) {
  auto in = open_in(p);
  std::vector<RecordIssue> issues;
  auto c = read_corpus_jsonl(in, &issues);
  report_issues(issues);
  return c;
}

Corpus load_scored(const fs::path& p) {
  auto c = load_corpus(p);
  if (!c.fully_scored()) throw ValidationError(p.string() + ": corpus is not scored; run `ossmood score` first");
  return c.without_discarded();
}

// Activity analysis accepts raw corpora too; discarded messages drop out when scores exist.
Corpus load_for_activity(const fs::path& p) {
  auto c = load_corpus(p);
  return c.fully_scored() ? c.without_discarded() : c;
}

std::vector<FeatureVector> load_features(const fs::path& p) {
  auto in = open_in(p);
  return read_features_jsonl(in);
}

template <typename Fn>
void with_out(const fs::path& p, Fn&& write) {
  auto out = open_out(p);
  write(out);
}

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw ValidationError("expected LOW..HIGH, got '" + s + "'");
  try {
    return {std::stoll(s.substr(0, dots)), std::stoll(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw ValidationError("expected LOW..HIGH, got '" + s + "'");
  }
}

int exit_code_for(const std::exception& e) {
  if (auto* p = dynamic_cast<const PipelineError*>(&e)) return p->exit_code();
  if (dynamic_cast<const LoadError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const ChannelError*>(&e) ||
      dynamic_cast<const ReorderError*>(&e) || dynamic_cast<const HttpError*>(&e) ||
      dynamic_cast<const ContractViolation*>(&e))
    return kExitInputError;
  return kExitStageFailure;
}

// stats --------------------------------------------------------------------

std::vector<double> doubles(const nlohmann::json& j, const char* key) { return j.at(key).get<std::vector<double>>(); }

ojson test_json(const stats::TestResult& t) {
  return {{"statistic", t.statistic},
          {"p_value", t.p_value},
          {"alternative", stats::to_string(t.alternative)},
          {"estimate", t.estimate},
          {"method", stats::to_string(t.method)}};
}

ojson run_stat(const nlohmann::json& req) {
  const auto op = req.at("op").get<std::string>();
  const auto alt = stats::parse_alternative(req.value("alternative", "two_sided"));
  ojson out;
  out["op"] = op;
  if (op == "one_proportion") {
    out["result"] = test_json(stats::one_proportion_test(req.at("k").get<std::uint64_t>(),
                                                         req.at("n").get<std::uint64_t>(), req.at("p0").get<double>(), alt));
  } else if (op == "two_proportion") {
    out["result"] = test_json(stats::two_proportion_test(req.at("k1").get<std::uint64_t>(), req.at("n1").get<std::uint64_t>(),
                                                         req.at("k2").get<std::uint64_t>(), req.at("n2").get<std::uint64_t>(), alt));
  } else if (op == "rank_sum") {
    out["result"] = test_json(stats::wilcoxon_rank_sum(doubles(req, "a"), doubles(req, "b"), alt));
  } else if (op == "kde") {
    const stats::Grid g{req.value("lo", -5.0), req.value("hi", 5.0), req.value("step", 0.01)};
    const auto d = stats::gaussian_kde(doubles(req, "samples"), req.value("bandwidth", kBandwidth), g);
    out["result"] = {{"grid", d.grid}, {"values", d.values}, {"integral", d.integral()}};
  } else if (op == "powerlaw") {
    const auto xs = doubles(req, "samples");
    const double xmin = req.value("xmin", 1.0);
    const auto fit = req.contains("xmax") ? stats::powerlaw_mle_truncated(xs, xmin, req.at("xmax").get<double>())
                                          : stats::powerlaw_mle(xs, xmin);
    out["result"] = {{"alpha", fit.alpha}, {"n_used", fit.n_used}, {"xmin", fit.xmin}};
    if (std::isfinite(fit.xmax)) out["result"]["xmax"] = fit.xmax;
  } else if (op == "histogram") {
    const auto h = stats::log_binned_histogram(doubles(req, "samples"), req.value("bins_per_decade", kBinsPerDecade));
    out["result"] = {{"bin_edges", h.bin_edges}, {"counts", h.counts}, {"densities", h.densities}};
  } else if (op == "wilson") {
    const auto ci = stats::wilson_interval(req.at("k").get<std::uint64_t>(), req.at("n").get<std::uint64_t>(),
                                           req.value("z", stats::kZ95));
    out["result"] = {{"lo", ci.lo}, {"hi", ci.hi}};
  } else if (op == "mean_std") {
    const auto m = stats::mean_std(doubles(req, "samples"));
    out["result"] = {{"mean", m.mean}, {"std", m.std}, {"n", m.n}};
  } else {
    throw ValidationError("stats: unknown op '" + op +
                          "' (one_proportion, two_proportion, rank_sum, kde, powerlaw, histogram, wilson, mean_std)");
  }
  return out;
}

void emit_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") std::cout << text;
  else open_out(out_path) << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion and churn analysis for developer communication archives"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.add_option("-j,--jobs", g_jobs, "Worker threads for parallel stages")->check(CLI::PositiveNumber);
  std::function<void()> action;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse Bugzilla exports or mbox archives into a JSONL corpus");
  std::string in_format, ingest_channel;
  std::vector<std::string> in_paths;
  std::string out_path, issues_path;
  ingest->add_option("--format", in_format, "bugzilla-json|bugzilla-xml|mbox|jsonl (guessed from the extension)");
  ingest->add_option("--in", in_paths, "Input files")->required()->expected(1, -1);
  ingest->add_option("--out", out_path, "Output corpus.jsonl")->required();
  ingest->add_option("--channel", ingest_channel, "bug|ml (defaults to ml for mbox input)");
  ingest->add_option("--issues", issues_path, "Write dropped records here as JSONL");
  bool include_subject = false;
  ingest->add_flag("--include-subject", include_subject, "Prepend mail subjects to the scored text");
  ingest->callback([&] {
    action = [&] {
      std::vector<InputSpec> specs;
      for (const auto& p : in_paths)
        specs.push_back({p, in_format.empty() ? guess_input_format(p) : parse_input_format(in_format), include_subject});
      Channel ch = specs.front().format == InputFormat::mbox ? Channel::mailing_list : Channel::bug_tracker;
      if (!ingest_channel.empty()) ch = parse_channel(ingest_channel);
      std::vector<RecordIssue> issues;
      const auto corpus = ingest_inputs(specs, ch, issues, g_jobs);
      with_out(out_path, [&](std::ostream& o) { write_corpus_jsonl(o, corpus); });
      if (!issues_path.empty()) {
        auto out = open_out(issues_path);
        for (const auto& i : issues) out << ojson{{"record", i.record}, {"reason", i.reason}}.dump() << '\n';
      }
      report_issues(issues);
      const auto s = corpus_summary(corpus);
      fmt::print("{} messages, {} discussions, {} contributors\n", s.message_count, s.discussion_count,
                 s.contributor_count);
    };
  });

  // fetch
  auto* fetch = app.add_subcommand("fetch", "Download bug comments over the Bugzilla REST API");
  std::string base_url, bug_range;
  FetchOptions fetch_opt;
  int timeout_ms = 10000;
  fetch->add_option("--base-url", base_url, "Bugzilla root, e.g. https://bugs.example.org")->required();
  fetch->add_option("--bugs", bug_range, "Inclusive bug id range LOW..HIGH")->required();
  fetch->add_option("--rps", fetch_opt.requests_per_second, "Request rate limit")->check(CLI::PositiveNumber);
  fetch->add_option("--retries", fetch_opt.max_retries, "Retries per bug")->check(CLI::NonNegativeNumber);
  fetch->add_option("--timeout-ms", timeout_ms, "Per-request timeout")->check(CLI::PositiveNumber);
  fetch->add_option("--out", out_path, "Output export (bugzilla-json)")->required();
  fetch->callback([&] {
    action = [&] {
      const auto [lo, hi] = parse_range(bug_range);
      fetch_opt.timeout = std::chrono::milliseconds(timeout_ms);
      const auto r = fetch_bugzilla(base_url, lo, hi, fetch_opt);
      open_out(out_path) << r.export_doc.dump(2) << '\n';
      report_issues(r.errors);
      fmt::print("{} bugs fetched, {} failed\n", r.export_doc["bugs"].size(), r.errors.size());
    };
  });

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scored corpus with planted structure");
  std::string synth_config, truth_path, lexicon_out;
  std::uint64_t synth_seed = 1;
  synth->add_option("--config", synth_config, "Generator settings (JSON)");
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--out", out_path, "Output corpus.jsonl")->required();
  synth->add_option("--truth", truth_path, "Write per-message ground truth JSONL");
  synth->add_option("--lexicon-out", lexicon_out, "Write a lexicon that reproduces the planted scores");
  synth->callback([&] {
    action = [&] {
      const auto cfg = synth_config.empty() ? SynthConfig{} : synth_config_from_json(read_json(synth_config));
      const auto r = generate_synthetic_corpus(cfg, synth_seed);
      with_out(out_path, [&](std::ostream& o) { write_corpus_jsonl(o, r.corpus); });
      if (!truth_path.empty()) with_out(truth_path, [&](std::ostream& o) { write_truth_jsonl(o, r.truth); });
      if (!lexicon_out.empty()) write_synthetic_lexicon(lexicon_out);
      fmt::print("{} messages, {} intervals, INA prior {:.4f}\n", r.stats.messages, r.stats.intervals,
                 r.stats.empirical_prior());
    };
  });

  // score
  auto* score = app.add_subcommand("score", "Fill positive/negative strengths using a lexicon");
  std::string corpus_path, lexicon_dir = "data/lexicon";
  score->add_option("--corpus", corpus_path, "Input corpus.jsonl")->required();
  score->add_option("--lexicon-dir", lexicon_dir, "Directory with terms.tsv, negators.txt, boosters.tsv");
  score->add_option("--out", out_path, "Output scored.jsonl")->required();
  score->callback([&] {
    action = [&] {
      const auto corpus = load_corpus(corpus_path);
      const auto lex = load_lexicon_dir(lexicon_dir);
      with_out(out_path, [&](std::ostream& o) { write_corpus_jsonl(o, score_corpus(corpus, lex, g_jobs)); });
    };
  });

  // stats
  auto* st = app.add_subcommand("stats", "Run a statistical primitive on a JSON request");
  std::string request_path;
  st->add_option("--in", request_path, "Request JSON: one object with an \"op\" key, or an array of them")->required();
  st->add_option("--out", out_path, "Output JSON (stdout by default)");
  st->callback([&] {
    action = [&] {
      const auto req = read_json(request_path);
      ojson res;
      if (req.is_array()) {
        res = ojson::array();
        for (const auto& r : req) res.push_back(run_stat(r));
      } else {
        res = run_stat(req);
      }
      emit_text(out_path, res.dump(2) + "\n");
    };
  });

  // classify
  auto* classify = app.add_subcommand("classify", "Classify discussions against the corpus baseline");
  double alpha = kDefaultAlpha;
  std::size_t min_messages = kDefaultMinMessages;
  std::string ternary_path;
  classify->add_option("--corpus", corpus_path, "Scored corpus")->required();
  classify->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  classify->add_option("--min-messages", min_messages, "Skip shorter discussions");
  classify->add_option("--out", out_path, "Output classes.csv")->required();
  classify->add_option("--ternary", ternary_path, "Output ternary-plot CSV");
  classify->callback([&] {
    action = [&] {
      const auto corpus = load_scored(corpus_path);
      const auto base = compute_baseline(corpus);
      const auto cc = classify_corpus(corpus, base, alpha, min_messages);
      with_out(out_path, [&](std::ostream& o) { write_classes_csv(o, cc); });
      if (!ternary_path.empty()) with_out(ternary_path, [&](std::ostream& o) { write_ternary_csv(o, cc); });
      fmt::print("baseline P {:.4f} N {:.4f} U {:.4f}; {} classified, {} skipped\n", base.positive, base.negative,
                 base.neutral, cc.classified, cc.skipped);
      for (const auto& [cls, n] : cc.frequencies) fmt::print("  {:<15} {}\n", to_string(cls), n);
    };
  });

  // timeseries
  auto* ts = app.add_subcommand("timeseries", "Daily moving-average polarity ratios");
  int window = 30;
  ts->add_option("--corpus", corpus_path, "Scored corpus")->required();
  ts->add_option("--window", window, "Moving-average window in days")->check(CLI::PositiveNumber);
  ts->add_option("--out", out_path, "Output series.csv")->required();
  ts->callback([&] {
    action = [&] { with_out(out_path, [&](std::ostream& o) { write_series_csv(o, emotion_timeseries(load_scored(corpus_path), window)); }); };
  });

  // compare
  auto* compare = app.add_subcommand("compare", "Compare polarity proportions between two partitions");
  std::string periods_path, split_author;
  compare->add_option("--corpus", corpus_path, "Scored corpus")->required();
  auto* periods_opt = compare->add_option("--periods", periods_path, "JSON with two named sets of date ranges");
  auto* author_opt = compare->add_option("--split-author", split_author, "Split on discussions with this author");
  periods_opt->excludes(author_opt);
  compare->add_option("--out", out_path, "Output CSV")->required();
  compare->callback([&] {
    action = [&] {
      PartitionRule rule;
      if (!periods_path.empty()) rule = parse_periods(read_json(periods_path));
      else if (!split_author.empty()) rule = AuthorSplit{split_author, std::nullopt};
      else throw ValidationError("compare: give --periods or --split-author");
      const auto t = compare_partitions(load_scored(corpus_path), rule);
      with_out(out_path, [&](std::ostream& o) { write_comparison_csv(o, t); });
      for (const auto& r : t.rows)
        fmt::print("{}: {} p={:.3g} {}\n", r.polarity, r.hypothesis(t.first_name, t.second_name), r.test.p_value,
                   to_string(r.test.method));
    };
  });

  // activity
  auto* activity = app.add_subcommand("activity", "Label intervals and fit the longest-gap distribution");
  int threshold = kInactivityDays;
  double xmin = 1, boundary_hint = 30;
  std::string hist_path;
  activity->add_option("--corpus", corpus_path, "Corpus (scored or not)")->required();
  activity->add_option("--threshold", threshold, "Inactivity threshold in days")->check(CLI::PositiveNumber);
  activity->add_option("--xmin", xmin, "Power-law lower cutoff in days")->check(CLI::PositiveNumber);
  activity->add_option("--boundary-hint", boundary_hint, "Upper cutoff of the power-law fit in days");
  activity->add_option("--out", out_path, "Output intervals.jsonl")->required();
  activity->add_option("--hist", hist_path, "Output histogram CSV; fit summary goes next to it as .json");
  activity->callback([&] {
    action = [&] {
      const auto corpus = load_for_activity(corpus_path);
      const auto lc = label_corpus(corpus, threshold);
      with_out(out_path, [&](std::ostream& o) { write_intervals_jsonl(o, lc.intervals); });
      fmt::print("{} intervals, {} one-time contributors", lc.intervals.size(), lc.one_time_contributors);
      if (!lc.intervals.empty()) fmt::print(", INA prior {:.4f}", ina_prior(lc.intervals));
      fmt::print("\n");
      if (hist_path.empty()) return;
      const auto a = max_interevent_analysis(build_timelines(corpus), xmin, boundary_hint);
      with_out(hist_path, [&](std::ostream& o) { write_histogram_csv(o, a.histogram); });
      open_out(fs::path(hist_path).replace_extension(".json")) << activity_sidecar(a, lc).dump(2) << '\n';
      fmt::print("alpha {:.3f}", a.fit.alpha);
      if (a.boundary_detected) fmt::print(", regime boundary near {:.1f} days", a.boundary_days);
      fmt::print("\n");
    };
  });

  // features
  auto* features = app.add_subcommand("features", "Per-interval emotion features");
  std::string intervals_path, baseline = "causal";
  int lookback = kLookbackDays;
  features->add_option("--corpus", corpus_path, "Scored corpus")->required();
  features->add_option("--intervals", intervals_path, "Labeled intervals (computed from the corpus if omitted)");
  features->add_option("--threshold", threshold, "Inactivity threshold when computing intervals");
  features->add_option("--lookback", lookback, "Lookback window in days")->check(CLI::PositiveNumber);
  features->add_option("--baseline", baseline, "causal|global");
  features->add_option("--out", out_path, "Output features.jsonl")->required();
  features->callback([&] {
    action = [&] {
      const auto corpus = load_scored(corpus_path);
      std::vector<LabeledInterval> iv;
      if (intervals_path.empty()) iv = label_corpus(corpus, threshold).intervals;
      else {
        auto in = open_in(intervals_path);
        iv = read_intervals_jsonl(in);
      }
      with_out(out_path, [&](std::ostream& o) { write_features_jsonl(o, extract_features(corpus, iv, lookback, parse_baseline_mode(baseline))); });
    };
  });

  // fit
  auto* fit = app.add_subcommand("fit", "Fit conditional densities and binned posteriors");
  std::string features_path, mode_name;
  double bandwidth = kBandwidth;
  std::size_t bins = kPosteriorBins;
  std::optional<double> theta;
  fit->add_option("--features", features_path, "Features JSONL")->required();
  fit->add_option("--bandwidth", bandwidth, "KDE bandwidth")->check(CLI::PositiveNumber);
  fit->add_option("--bins", bins, "Posterior bins per feature");
  fit->add_option("--mode", mode_name, "absolute|deviation (default absolute)");
  fit->add_option("--theta", theta, "Decision threshold (default by mode)");
  fit->add_option("--lookback", lookback, "Lookback the features were built with");
  fit->add_option("--out", out_path, "Output model.json")->required();
  fit->callback([&] {
    action = [&] {
      const auto mode = mode_name.empty() ? PredictMode::absolute : parse_predict_mode(mode_name);
      const auto m = fit_model(load_features(features_path), mode, theta.value_or(default_theta(mode)), bandwidth,
                               bins, lookback);
      open_out(out_path) << model_to_json(m).dump(2) << '\n';
      fmt::print("{} features, INA prior {:.4f}\n", m.n_features, m.prior_ina);
    };
  });

  // predict
  auto* pred = app.add_subcommand("predict", "Threshold rule on features");
  std::string model_path;
  pred->add_option("--features", features_path, "Features JSONL")->required();
  pred->add_option("--mode", mode_name, "absolute|deviation");
  pred->add_option("--theta", theta, "Decision threshold");
  pred->add_option("--model", model_path, "Take mode and threshold from a fitted model");
  pred->add_option("--out", out_path, "Output preds.jsonl")->required();
  pred->callback([&] {
    action = [&] {
      PredictMode mode = PredictMode::absolute;
      double th = kThetaAbsolute;
      if (!model_path.empty()) {
        const auto m = model_from_json(read_json(model_path));
        mode = m.mode;
        th = m.theta;
      }
      if (!mode_name.empty()) {
        mode = parse_predict_mode(mode_name);
        if (model_path.empty()) th = default_theta(mode);
      }
      if (theta) th = *theta;
      const auto fs = load_features(features_path);
      const auto labels = predict(fs, mode, th);
      with_out(out_path, [&](std::ostream& o) { write_predictions_jsonl(o, fs, labels); });
      fmt::print("{} predictions, {} INA\n", labels.size(), std::count(labels.begin(), labels.end(), ActivityLabel::INA));
    };
  });

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Bootstrap precision and recall");
  std::string preds_path;
  std::size_t reps = kBootstrapReps;
  std::uint64_t seed = kBootstrapSeed;
  eval->add_option("--preds", preds_path, "Predictions JSONL")->required();
  eval->add_option("--truth", truth_path, "Labeled intervals JSONL")->required();
  eval->add_option("--reps", reps, "Bootstrap resamples")->check(CLI::PositiveNumber);
  eval->add_option("--seed", seed, "Bootstrap seed");
  eval->add_option("--out", out_path, "Output report JSON");
  eval->callback([&] {
    action = [&] {
      auto pin = open_in(preds_path);
      auto tin = open_in(truth_path);
      const auto [p, t] = align_predictions(read_predictions_jsonl(pin), read_intervals_jsonl(tin));
      const auto rep = evaluate(p, t, reps, seed, g_jobs);
      const auto j = report_to_json(rep);
      if (!out_path.empty()) open_out(out_path) << j.dump(2) << '\n';
      for (const auto* c : {&rep.act, &rep.ina})
        fmt::print("{} (prior {:.3f}): precision {:.3f} +- {:.3f}, recall {:.3f} +- {:.3f}\n", to_string(c->label),
                   c->prior, c->precision.mean, c->precision.std, c->recall.mean, c->recall.std);
    };
  });

  // watch
  auto* watch = app.add_subcommand("watch", "Score a message stream and emit per-author risk alerts");
  std::string state_path, events_path, watch_lexicon;
  watch->add_option("--model", model_path, "Fitted model.json")->required();
  watch->add_option("--state", state_path, "State file, read if present and rewritten at the end");
  watch->add_option("--in", events_path, "Events JSONL in timestamp order")->required();
  watch->add_option("--out", out_path, "Alerts JSONL, appended")->required();
  watch->add_option("--lexicon-dir", watch_lexicon, "Score events that carry no p/n");
  watch->callback([&] {
    action = [&] {
      StreamPredictor sp(model_from_json(read_json(model_path)));
      if (!state_path.empty() && fs::exists(state_path)) sp.restore_state(read_json(state_path));
      auto in = open_in(events_path);
      auto batch = read_messages_jsonl(in);
      report_issues(batch.issues);
      if (!watch_lexicon.empty()) {
        const auto lex = load_lexicon_dir(watch_lexicon);
        for (auto& m : batch.messages)
          if (!m.score) m.score = score_message(lex, m.text);
      }
      const auto alerts = sp.process_all(batch.messages, g_jobs);
      auto out = open_out(out_path, true);
      std::size_t ina = 0;
      for (const auto& a : alerts) {
        out << alert_to_json(a).dump() << '\n';
        ina += a.label == ActivityLabel::INA;
      }
      if (!state_path.empty()) open_out(state_path) << sp.save_state().dump() << '\n';
      fmt::print("{} alerts, {} INA, {} authors tracked\n", alerts.size(), ina, sp.authors());
    };
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "INA precision and recall over a threshold grid");
  double from = 0.5, to = 3.0, step = 0.1;
  sweep->add_option("--features", features_path, "Features JSONL")->required();
  sweep->add_option("--mode", mode_name, "absolute|deviation");
  sweep->add_option("--from", from, "First threshold");
  sweep->add_option("--to", to, "Last threshold");
  sweep->add_option("--step", step, "Threshold step")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_path, "Output CSV (stdout by default)");
  sweep->callback([&] {
    action = [&] {
      std::vector<double> thetas;
      for (std::size_t i = 0;; ++i) {
        const double th = from + static_cast<double>(i) * step;
        if (th > to + 1e-9) break;
        thetas.push_back(th);
      }
      const auto mode = mode_name.empty() ? PredictMode::absolute : parse_predict_mode(mode_name);
      std::string csv = "theta,precision_ina,recall_ina\n";
      auto cell = [](const std::optional<double>& v) { return v ? fmt::format("{:.6f}", *v) : std::string(); };
      for (const auto& p : sweep_thresholds(load_features(features_path), mode, thetas))
        csv += fmt::format("{:.4f},{},{}\n", p.theta, cell(p.precision_ina), cell(p.recall_ina));
      emit_text(out_path, csv);
    };
  });

  // run
  auto* run = app.add_subcommand("run", "Whole pipeline into a bundle directory, then the report");
  std::string config_path, out_dir;
  std::optional<std::string> run_channel, run_lexicon, run_mode, run_baseline, run_split, run_periods;
  std::optional<double> run_alpha, run_theta, run_bandwidth;
  std::optional<std::size_t> run_min, run_bins, run_reps;
  std::optional<std::uint64_t> run_seed;
  std::optional<int> run_window, run_threshold, run_lookback;
  run->add_option("--config", config_path, "Config JSON; flags override it");
  run->add_option("--in", in_paths, "Input files")->required()->expected(1, -1);
  run->add_option("--format", in_format, "Input format for every file (guessed from the extension)");
  run->add_option("--out", out_dir, "Bundle directory")->required();
  run->add_option("--channel", run_channel, "bug|ml");
  run->add_option("--lexicon-dir", run_lexicon, "Lexicon directory");
  run->add_option("--mode", run_mode, "absolute|deviation");
  run->add_option("--theta", run_theta, "Threshold for the chosen mode");
  run->add_option("--alpha", run_alpha, "Significance level");
  run->add_option("--min-messages", run_min, "Minimum discussion length");
  run->add_option("--window", run_window, "Moving-average window in days");
  run->add_option("--threshold", run_threshold, "Inactivity threshold in days");
  run->add_option("--lookback", run_lookback, "Feature lookback in days");
  run->add_option("--bins", run_bins, "Posterior bins");
  run->add_option("--bandwidth", run_bandwidth, "KDE bandwidth");
  run->add_option("--reps", run_reps, "Bootstrap resamples");
  run->add_option("--seed", run_seed, "Bootstrap seed");
  run->add_option("--baseline", run_baseline, "causal|global");
  run->add_option("--periods", run_periods, "Partition periods JSON file");
  run->add_option("--split-author", run_split, "Partition on this author");
  auto* run_subject = run->add_flag("--include-subject", include_subject, "Prepend mail subjects to the scored text");
  run->callback([&] {
    action = [&] {
      PipelineConfig c;
      try {
        if (!config_path.empty()) c = pipeline_config_from_json(read_json(config_path));
        if (app.get_option("--jobs")->count()) c.jobs = g_jobs;
        if (run_channel) c.channel = parse_channel(*run_channel);
        if (run_lexicon) c.lexicon_dir = *run_lexicon;
        if (run_mode) c.mode = parse_predict_mode(*run_mode);
        if (run_theta) (c.effective_mode() == PredictMode::absolute ? c.theta_absolute : c.theta_deviation) = *run_theta;
        if (run_alpha) c.alpha = *run_alpha;
        if (run_min) c.min_messages = *run_min;
        if (run_window) c.moving_average_days = *run_window;
        if (run_threshold) c.inactivity_days = *run_threshold;
        if (run_lookback) c.lookback_days = *run_lookback;
        if (run_bins) c.bins = *run_bins;
        if (run_bandwidth) c.bandwidth = *run_bandwidth;
        if (run_reps) c.reps = *run_reps;
        if (run_seed) c.seed = *run_seed;
        if (run_subject->count()) c.include_subject = true;
        if (run_baseline) c.baseline = parse_baseline_mode(*run_baseline);
        if (run_periods) {
          c.partition.periods = read_json(*run_periods);
          c.partition.split_author.reset();
        }
        if (run_split) {
          c.partition.split_author = *run_split;
          c.partition.periods.reset();
        }
        validate(c);
      } catch (const std::exception& e) {
        throw PipelineError("config", e.what(), kExitInputError);
      }
      std::vector<InputSpec> specs;
      for (const auto& p : in_paths)
        specs.push_back({p, in_format.empty() ? guess_input_format(p) : parse_input_format(in_format)});
      const auto man = run_pipeline(c, specs, out_dir);
      const auto rep = write_report(out_dir);
      std::cout << rep.text;
      fmt::print(stderr, "{} artifacts in {}\n", man.artifacts.size(), out_dir);
    };
  });

  // report
  auto* report = app.add_subcommand("report", "Rebuild summary.txt and report.json from a bundle");
  std::string bundle;
  report->add_option("--bundle", bundle, "Bundle directory")->required();
  report->callback([&] { action = [&] { std::cout << write_report(bundle).text; }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInputError;
  }
  try {
    action();
  } catch (const PipelineError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return exit_code_for(e);
  }
  return 0;
}
