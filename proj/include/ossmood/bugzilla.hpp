#pragma once

// Bugzilla comment exports (REST JSON and show_bug XML) and a rate-limited
// REST client producing the JSON export.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <algorithm>
#include <array>
#include <chrono>
#include <memory>
#include <istream>
#include <iterator>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <expat.h>
#include <httplib.h>
#include <json.hpp>

#include "ossmood/corpus.hpp"
#include "ossmood/error.hpp"
#include "ossmood/time.hpp"

namespace ossmood {

enum class BugzillaFormat { json, xml };

struct ParsedMessages {
  std::vector<Message> messages;  // sorted by timestamp, then id
  std::vector<RecordIssue> issues;    // dropped records
  std::vector<RecordIssue> warnings;  // kept records with a caveat
};

namespace detail {

inline void sort_messages(std::vector<Message>& ms) {
  std::stable_sort(ms.begin(), ms.end(), [](const Message& a, const Message& b) {
    return a.ts != b.ts ? a.ts < b.ts : a.id < b.id;
  });
}

struct RawComment {
  std::string bug;
  std::string id;
  std::string author;
  std::string time;
  std::string text;
  std::size_t index = 0;  // position within the bug
};

inline void emit_comment(const RawComment& c, ParsedMessages& out) {
  const std::string record = c.id.empty() ? "bug " + c.bug + " comment " + std::to_string(c.index) : c.id;
  if (c.bug.empty()) return out.issues.push_back({record, "missing bug id"});
  if (c.author.empty()) return out.issues.push_back({record, "missing author"});
  if (c.time.empty()) return out.issues.push_back({record, "missing time"});
  const auto ts = parse_iso8601(c.time);
  if (!ts) return out.issues.push_back({record, "unparseable time '" + c.time + "'"});
  Message m;
  m.id = c.id.empty() ? "bug-" + c.bug + "-c" + std::to_string(c.index) : "c" + c.id;
  m.author = c.author;
  m.ts = *ts;
  m.discussion = c.bug;
  m.channel = Channel::bug_tracker;
  m.text = strip_quoted_lines(c.text);
  out.messages.push_back(std::move(m));
}

inline std::string scalar_text(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  return {};
}

inline std::string first_of(const nlohmann::json& obj, std::initializer_list<const char*> keys) {
  for (auto k : keys)
    if (obj.contains(k)) {
      auto s = scalar_text(obj[k]);
      if (!s.empty()) return s;
    }
  return {};
}

inline void parse_bug_json(const std::string& key_id, const nlohmann::json& bug, ParsedMessages& out) {
  const std::string bug_id = key_id.empty() ? first_of(bug, {"id", "bug_id"}) : key_id;
  if (!bug.contains("comments") || !bug["comments"].is_array()) {
    out.issues.push_back({"bug " + (bug_id.empty() ? std::string("?") : bug_id), "no comments array"});
    return;
  }
  std::size_t index = 0;
  for (const auto& c : bug["comments"]) {
    RawComment rc;
    rc.index = index++;
    if (!c.is_object()) {
      out.issues.push_back({"bug " + bug_id + " comment " + std::to_string(rc.index), "not an object"});
      continue;
    }
    rc.bug = bug_id.empty() ? first_of(c, {"bug_id"}) : bug_id;
    rc.id = first_of(c, {"id"});
    rc.author = first_of(c, {"creator", "author"});
    rc.time = first_of(c, {"creation_time", "time"});
    rc.text = c.contains("text") && c["text"].is_string() ? c["text"].get<std::string>() : "";
    emit_comment(rc, out);
  }
}

inline ParsedMessages parse_bugzilla_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed Bugzilla JSON: ") + e.what(), e.byte);
  }
  ParsedMessages out;
  const nlohmann::json* bugs = &doc;
  if (doc.is_object() && doc.contains("bugs")) bugs = &doc["bugs"];
  if (bugs->is_object()) {
    for (const auto& [id, bug] : bugs->items()) parse_bug_json(id, bug, out);
  } else if (bugs->is_array()) {
    for (const auto& bug : *bugs) parse_bug_json("", bug, out);
  } else {
    throw ParseError("Bugzilla JSON: expected an object of bugs or an array", 0);
  }
  return out;
}

class BugzillaXmlHandler {
 public:
  explicit BugzillaXmlHandler(ParsedMessages& out) : out_(out) {}

  static void XMLCALL on_start(void* self, const XML_Char* name, const XML_Char**) {
    static_cast<BugzillaXmlHandler*>(self)->start(name);
  }
  static void XMLCALL on_end(void* self, const XML_Char* name) { static_cast<BugzillaXmlHandler*>(self)->end(name); }
  static void XMLCALL on_text(void* self, const XML_Char* s, int len) {
    auto* h = static_cast<BugzillaXmlHandler*>(self);
    if (h->capture_) h->buffer_.append(s, static_cast<std::size_t>(len));
  }

 private:
  void start(std::string_view name) {
    if (name == "bug") {
      bug_.clear();
      index_ = 0;
    } else if (name == "long_desc") {
      in_comment_ = true;
      comment_ = RawComment{};
      comment_.index = index_++;
    }
    const bool wanted = (name == "bug_id" && !in_comment_) ||
                        (in_comment_ && (name == "who" || name == "bug_when" || name == "thetext" || name == "commentid"));
    if (wanted) {
      capture_ = true;
      buffer_.clear();
    }
  }

  void end(std::string_view name) {
    if (capture_) {
      const auto value = std::string(trim(buffer_));
      if (name == "bug_id") bug_ = value;
      else if (name == "who") comment_.author = value;
      else if (name == "bug_when") comment_.time = value;
      else if (name == "commentid") comment_.id = value;
      else if (name == "thetext") comment_.text = buffer_;
      capture_ = false;
    }
    if (name == "long_desc") {
      comment_.bug = bug_;
      emit_comment(comment_, out_);
      in_comment_ = false;
    }
  }

  ParsedMessages& out_;
  std::string bug_;
  RawComment comment_;
  std::size_t index_ = 0;
  bool in_comment_ = false;
  bool capture_ = false;
  std::string buffer_;
};

inline ParsedMessages parse_bugzilla_xml(std::istream& in) {
  ParsedMessages out;
  BugzillaXmlHandler handler(out);
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                                       &XML_ParserFree);
  if (!parser) throw Error("cannot create XML parser");
  XML_SetUserData(parser.get(), &handler);
  XML_SetElementHandler(parser.get(), &BugzillaXmlHandler::on_start, &BugzillaXmlHandler::on_end);
  XML_SetCharacterDataHandler(parser.get(), &BugzillaXmlHandler::on_text);
  std::array<char, 64 * 1024> buf;
  for (;;) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    const bool final = got < static_cast<std::streamsize>(buf.size());
    if (XML_Parse(parser.get(), buf.data(), static_cast<int>(got), final) == XML_STATUS_ERROR) {
      const auto at = XML_GetCurrentByteIndex(parser.get());
      throw ParseError(std::string("malformed Bugzilla XML: ") + XML_ErrorString(XML_GetErrorCode(parser.get())),
                       at < 0 ? 0 : static_cast<std::size_t>(at));
    }
    if (final) break;
  }
  return out;
}

}  // namespace detail

/// One Message per comment; discussion id = bug id; quoted lines stripped.
/// Comments lacking bug id, author or time become record issues. A
/// malformed document throws ParseError with the byte offset.
inline ParsedMessages parse_bugzilla_export(std::istream& in, BugzillaFormat format) {
  auto out = format == BugzillaFormat::json ? detail::parse_bugzilla_json(in) : detail::parse_bugzilla_xml(in);
  detail::sort_messages(out.messages);
  return out;
}

// ---------------------------------------------------------------------------

struct FetchOptions {
  double requests_per_second = 1.0;
  int max_retries = 3;
  std::chrono::milliseconds timeout{10000};
  std::chrono::milliseconds retry_backoff{500};
};

struct FetchResult {
  nlohmann::ordered_json export_doc;  // {"bugs": {"<id>": {"comments": [...]}}}
  std::vector<RecordIssue> errors;    // one per bug that could not be fetched
};

/// Spaces request starts at least 1/rate apart (a token bucket of capacity 1).
class RateLimiter {
 public:
  explicit RateLimiter(double rate)
      : interval_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(1.0 / rate))) {
    if (!(rate > 0)) throw ContractViolation("rate limit must be > 0");
  }

  void acquire() {
    const auto now = std::chrono::steady_clock::now();
    if (next_ && now < *next_) std::this_thread::sleep_until(*next_);
    const auto granted = std::max(now, next_.value_or(now));
    next_ = granted + interval_;
  }

 private:
  std::chrono::steady_clock::duration interval_;
  std::optional<std::chrono::steady_clock::time_point> next_;
};

namespace detail {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

inline SplitUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ContractViolation("base URL needs a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  SplitUrl s{url.substr(0, slash), slash == std::string::npos ? "" : url.substr(slash)};
  while (!s.path.empty() && s.path.back() == '/') s.path.pop_back();
  return s;
}

}  // namespace detail

/// GETs {base_url}/rest/bug/{id}/comment for every id in [low, high] and
/// merges the responses into one export. 4xx responses are permanent errors;
/// 5xx responses and transport failures are retried up to max_retries
/// times. Every attempt, retries included, waits for the rate limiter.
inline FetchResult fetch_bugzilla(const std::string& base_url, std::int64_t low, std::int64_t high,
                                  const FetchOptions& opt = {}) {
  if (low > high) throw ContractViolation("fetch_bugzilla: low > high");
  if (opt.max_retries < 0) throw ContractViolation("fetch_bugzilla: max_retries must be >= 0");
  const auto url = detail::split_url(base_url);
  httplib::Client client(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(opt.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(opt.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_follow_location(true);
  RateLimiter limiter(opt.requests_per_second);
  FetchResult result;
  result.export_doc["bugs"] = nlohmann::ordered_json::object();
  for (auto id = low; id <= high; ++id) {
    const std::string bug = std::to_string(id);
    const std::string path = url.path + "/rest/bug/" + bug + "/comment";
    std::optional<std::string> failure;
    for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(opt.retry_backoff * attempt);
      limiter.acquire();
      auto res = client.Get(path);
      if (!res) {
        failure = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 500) {
        failure = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status >= 400) {
        failure = "HTTP " + std::to_string(res->status) + " (permanent)";
        break;
      }
      try {
        const auto body = nlohmann::json::parse(res->body);
        const auto& entry = body.at("bugs").at(bug);
        result.export_doc["bugs"][bug]["comments"] = entry.at("comments");
        failure.reset();
      } catch (const nlohmann::json::exception& e) {
        failure = std::string("bad response body: ") + e.what();
      }
      break;
    }
    if (failure) result.errors.push_back({"bug " + bug, *failure});
  }
  return result;
}

}  // namespace ossmood
