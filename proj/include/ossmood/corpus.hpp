#pragma once

// Normalized message corpus: the Message record, corpus construction and
// validation, JSONL persistence, summary statistics and bug response metrics.

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ossmood/error.hpp"
#include "ossmood/sentiment.hpp"
#include "ossmood/time.hpp"

namespace ossmood {

enum class Channel { bug_tracker, mailing_list };

inline std::string_view channel_code(Channel c) {
  return c == Channel::bug_tracker ? "bug" : "ml";
}

inline Channel parse_channel(std::string_view code) {
  if (code == "bug" || code == "bug_tracker") return Channel::bug_tracker;
  if (code == "ml" || code == "mailing_list") return Channel::mailing_list;
  throw ValidationError("unknown channel '" + std::string(code) + "'");
}

struct Message {
  std::string id;
  std::string author;
  Timestamp ts = 0;
  std::string discussion;
  Channel channel = Channel::bug_tracker;
  std::string text;
  std::optional<SentimentScore> score;

  friend bool operator==(const Message&, const Message&) = default;
};

/// Removes every line whose first non-blank character is '>'. Other lines
/// are kept verbatim and in order.
inline std::string strip_quoted_lines(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool first = true;
  std::size_t start = 0;
  while (start <= raw.size()) {
    auto end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    const auto line = raw.substr(start, end - start);
    const auto nb = line.find_first_not_of(" \t\r\f\v");
    const bool quoted = nb != std::string_view::npos && line[nb] == '>';
    if (!quoted) {
      if (!first) out.push_back('\n');
      out.append(line);
      first = false;
    }
    start = end + 1;
  }
  return out;
}

using TimeWindow = std::pair<Timestamp, Timestamp>;

/// Immutable, timestamp-sorted collection of messages from one channel.
class Corpus {
 public:
  Corpus() = default;

  /// Validates and sorts `messages` (by timestamp, then id). Invalid records
  /// and duplicate ids are dropped and reported in `issues` when given;
  /// without an issue sink they throw ValidationError.
  static Corpus build(std::vector<Message> messages, Channel channel,
                      std::vector<RecordIssue>* issues = nullptr,
                      std::optional<TimeWindow> window = std::nullopt) {
    auto reject = [&](const Message& m, const std::string& why) {
      if (!issues) throw ValidationError("message '" + m.id + "': " + why);
      issues->push_back({m.id, why});
    };
    std::vector<Message> kept;
    kept.reserve(messages.size());
    std::unordered_set<std::string> seen;
    for (auto& m : messages) {
      if (m.id.empty()) reject(m, "empty id");
      else if (m.author.empty()) reject(m, "empty author");
      else if (m.discussion.empty()) reject(m, "empty discussion id");
      else if (m.ts < 0) reject(m, "negative timestamp");
      else if (m.channel != channel) reject(m, "channel mismatch");
      else if (window && (m.ts < window->first || m.ts > window->second))
        reject(m, "timestamp outside observation window");
      else if (!seen.insert(m.id).second) reject(m, "duplicate id");
      else {
        m.text = strip_quoted_lines(m.text);
        kept.push_back(std::move(m));
      }
    }
    std::sort(kept.begin(), kept.end(), [](const Message& a, const Message& b) {
      return a.ts != b.ts ? a.ts < b.ts : a.id < b.id;
    });
    Corpus c;
    c.channel_ = channel;
    c.messages_ = std::move(kept);
    if (window) c.window_ = window;
    else if (!c.messages_.empty()) c.window_ = TimeWindow{c.messages_.front().ts, c.messages_.back().ts};
    return c;
  }

  const std::vector<Message>& messages() const { return messages_; }
  std::size_t size() const { return messages_.size(); }
  bool empty() const { return messages_.empty(); }
  Channel channel() const { return channel_; }
  const std::optional<TimeWindow>& window() const { return window_; }

  bool fully_scored() const {
    return std::all_of(messages_.begin(), messages_.end(),
                       [](const Message& m) { return m.score.has_value(); });
  }

  /// Messages whose polarity is not `discarded`. Requires a scored corpus.
  Corpus without_discarded() const {
    require_scored("without_discarded");
    Corpus c = *this;
    std::erase_if(c.messages_, [](const Message& m) {
      return m.score->polarity == Polarity::discarded;
    });
    return c;
  }

  void require_scored(std::string_view op) const {
    if (!fully_scored())
      throw ContractViolation(std::string(op) + ": corpus contains unscored messages");
  }

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  std::vector<Message> messages_;
  Channel channel_ = Channel::bug_tracker;
  std::optional<TimeWindow> window_;
};

// ---------------------------------------------------------------------------
// JSONL persistence:
// {"id":..,"author":..,"ts":..,"disc":..,"chan":"bug"|"ml","text":..,"p":..,"n":..}

inline nlohmann::ordered_json message_to_json(const Message& m) {
  nlohmann::ordered_json j;
  j["id"] = m.id;
  j["author"] = m.author;
  j["ts"] = m.ts;
  j["disc"] = m.discussion;
  j["chan"] = channel_code(m.channel);
  j["text"] = m.text;
  if (m.score) {
    j["p"] = m.score->p;
    j["n"] = m.score->n;
  }
  return j;
}

inline Message message_from_json(const nlohmann::json& j) {
  Message m;
  m.id = j.at("id").get<std::string>();
  m.author = j.at("author").get<std::string>();
  m.ts = j.at("ts").get<Timestamp>();
  m.discussion = j.at("disc").get<std::string>();
  m.channel = parse_channel(j.at("chan").get<std::string>());
  m.text = j.value("text", std::string());
  const bool has_p = j.contains("p") && !j["p"].is_null();
  const bool has_n = j.contains("n") && !j["n"].is_null();
  if (has_p != has_n) throw ValidationError("p and n must be given together");
  if (has_p) {
    try {
      m.score = SentimentScore::from(j["p"].get<int>(), j["n"].get<int>());
    } catch (const ContractViolation& e) {
      throw ValidationError(e.what());
    }
  }
  return m;
}

inline void write_messages_jsonl(std::ostream& out, const std::vector<Message>& messages) {
  for (const auto& m : messages) out << message_to_json(m).dump() << '\n';
}

inline void write_corpus_jsonl(std::ostream& out, const Corpus& corpus) {
  write_messages_jsonl(out, corpus.messages());
}

struct MessageBatch {
  std::vector<Message> messages;
  std::vector<RecordIssue> issues;
};

/// Reads JSONL messages. Malformed lines become record issues named by line number.
inline MessageBatch read_messages_jsonl(std::istream& in) {
  MessageBatch batch;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      batch.messages.push_back(message_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      batch.issues.push_back({"line " + std::to_string(line_no), e.what()});
    }
  }
  return batch;
}

/// Reads a JSONL corpus. The channel is taken from the first record (bug
/// tracker for an empty file); records of another channel become issues.
inline Corpus read_corpus_jsonl(std::istream& in, std::vector<RecordIssue>* issues = nullptr) {
  auto batch = read_messages_jsonl(in);
  if (issues) issues->insert(issues->end(), batch.issues.begin(), batch.issues.end());
  else if (!batch.issues.empty())
    throw ValidationError(batch.issues.front().record + ": " + batch.issues.front().reason);
  const Channel ch = batch.messages.empty() ? Channel::bug_tracker : batch.messages.front().channel;
  return Corpus::build(std::move(batch.messages), ch, issues);
}

// ---------------------------------------------------------------------------

struct SummaryStats {
  std::size_t message_count = 0;
  std::size_t discussion_count = 0;
  std::size_t contributor_count = 0;
  std::optional<TimeWindow> window;  // empty for an empty corpus

  friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

inline SummaryStats corpus_summary(const Corpus& corpus) {
  SummaryStats s;
  std::unordered_set<std::string> discussions, authors;
  Timestamp lo = 0, hi = 0;
  for (const auto& m : corpus.messages()) {
    if (s.message_count == 0) lo = hi = m.ts;
    lo = std::min(lo, m.ts);
    hi = std::max(hi, m.ts);
    ++s.message_count;
    discussions.insert(m.discussion);
    authors.insert(m.author);
  }
  s.discussion_count = discussions.size();
  s.contributor_count = authors.size();
  if (s.message_count) s.window = TimeWindow{lo, hi};
  return s;
}

struct ResponsePoint {
  Timestamp day = 0;  // UTC midnight ending the window (inclusive day)
  double opened_per_day = 0;
  std::size_t replied = 0;  // discussions in the window with a first reply
  std::optional<double> median_first_reply_days;
};

namespace detail {

inline const nlohmann::json& opt(const nlohmann::json& j, const char* key) {
  static const nlohmann::json null;
  return j.contains(key) ? j[key] : null;
}

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

inline double median_of(std::vector<double>& v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace detail

/// For every UTC day d between the first and last message, considers the
/// discussions opened in days (d - window_days, d]: their count divided by
/// window_days, and the median delay in days from each discussion's first to
/// its second message (discussions with one message are excluded).
inline std::vector<ResponsePoint> bug_response_metrics(const Corpus& corpus, int window_days) {
  if (corpus.channel() != Channel::bug_tracker)
    throw ChannelError("bug_response_metrics requires a bug-tracker corpus");
  if (window_days < 1) throw ContractViolation("window_days must be >= 1");
  struct Opened {
    std::int64_t day;
    std::optional<double> delay;
  };
  std::unordered_map<std::string, std::pair<Timestamp, std::optional<Timestamp>>> first_two;
  for (const auto& m : corpus.messages()) {
    auto [it, inserted] = first_two.try_emplace(m.discussion, m.ts, std::nullopt);
    if (!inserted && !it->second.second) it->second.second = m.ts;
  }
  std::vector<Opened> opened;
  opened.reserve(first_two.size());
  for (const auto& [id, ft] : first_two) {
    Opened o{day_index(ft.first), std::nullopt};
    if (ft.second) o.delay = seconds_to_days(*ft.second - ft.first);
    opened.push_back(o);
  }
  std::sort(opened.begin(), opened.end(), [](const Opened& a, const Opened& b) {
    return a.day != b.day ? a.day < b.day : a.delay < b.delay;
  });
  std::vector<ResponsePoint> series;
  if (opened.empty()) return series;
  const auto first_day = day_index(corpus.messages().front().ts);
  const auto last_day = day_index(corpus.messages().back().ts);
  std::size_t lo = 0, hi = 0;
  std::vector<double> delays;
  for (auto d = first_day; d <= last_day; ++d) {
    while (hi < opened.size() && opened[hi].day <= d) ++hi;
    while (lo < hi && opened[lo].day <= d - window_days) ++lo;
    ResponsePoint pt;
    pt.day = d * kDay;
    pt.opened_per_day = static_cast<double>(hi - lo) / window_days;
    delays.clear();
    for (auto i = lo; i < hi; ++i)
      if (opened[i].delay) delays.push_back(*opened[i].delay);
    pt.replied = delays.size();
    if (!delays.empty()) pt.median_first_reply_days = detail::median_of(delays);
    series.push_back(pt);
  }
  return series;
}

}  // namespace ossmood
