#pragma once

// mbox mailing-list archives: message splitting, header unfolding, RFC 2047
// subjects, MIME multipart bodies, transfer decodings and charset conversion.

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <iconv.h>
#include <openssl/evp.h>

#include "ossmood/bugzilla.hpp"
#include "ossmood/corpus.hpp"
#include "ossmood/time.hpp"

namespace ossmood {

namespace mime {

using detail::trim;

inline std::string lower(std::string_view s) { return Lexicon::lowercase(s); }

inline std::string collapse_ws(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
      continue;
    }
    if (space && !out.empty()) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

/// Replaces invalid UTF-8 sequences with U+FFFD. Returns true if any were found.
inline bool sanitize_utf8(std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool bad = false;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
    bool ok = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) ok = (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
    if (ok && len == 2) ok = c >= 0xC2;
    if (ok) {
      out.append(s, i, len);
      i += len;
    } else {
      out += "\xEF\xBF\xBD";
      bad = true;
      ++i;
    }
  }
  s = std::move(out);
  return bad;
}

struct Decoded {
  std::string text;
  bool lossy = false;
};

/// Converts `bytes` in `charset` to UTF-8. Unknown charsets and invalid
/// sequences fall back to U+FFFD replacement and set `lossy`.
inline Decoded to_utf8(std::string_view bytes, std::string charset) {
  charset = lower(charset);
  if (charset.empty() || charset == "utf-8" || charset == "utf8" || charset == "us-ascii" || charset == "ascii") {
    Decoded d{std::string(bytes), false};
    d.lossy = sanitize_utf8(d.text);
    return d;
  }
  iconv_t cd = iconv_open("UTF-8", charset.c_str());
  if (cd == reinterpret_cast<iconv_t>(-1)) {
    Decoded d{std::string(bytes), true};
    sanitize_utf8(d.text);
    return d;
  }
  Decoded d;
  std::string in(bytes);
  char* src = in.data();
  std::size_t left = in.size();
  std::string buf(4 * in.size() + 16, '\0');
  while (left > 0) {
    char* dst = buf.data();
    std::size_t room = buf.size();
    const auto rc = iconv(cd, &src, &left, &dst, &room);
    d.text.append(buf.data(), static_cast<std::size_t>(dst - buf.data()));
    if (rc == static_cast<std::size_t>(-1)) {
      if (errno == E2BIG) continue;
      d.text += "\xEF\xBF\xBD";
      d.lossy = true;
      ++src;
      --left;
      iconv(cd, nullptr, nullptr, nullptr, nullptr);
    }
  }
  iconv_close(cd);
  return d;
}

inline std::string decode_base64(std::string_view in) {
  std::string clean;
  clean.reserve(in.size());
  for (char c : in)
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '/' || c == '=') clean.push_back(c);
  while (clean.size() % 4) clean.push_back('=');
  if (clean.empty()) return {};
  std::string out(clean.size() / 4 * 3, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(clean.data()), static_cast<int>(clean.size()));
  if (n < 0) return {};
  std::size_t pad = 0;
  for (auto it = clean.rbegin(); it != clean.rend() && *it == '='; ++it) ++pad;
  out.resize(static_cast<std::size_t>(n) - std::min<std::size_t>(pad, 2));
  return out;
}

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

/// Quoted-printable. In header mode '_' stands for a space.
inline std::string decode_qp(std::string_view in, bool header = false) {
  std::string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char c = in[i];
    if (c == '=' && i + 1 < in.size()) {
      if (in[i + 1] == '\n') {
        ++i;
        continue;
      }
      if (in[i + 1] == '\r' && i + 2 < in.size() && in[i + 2] == '\n') {
        i += 2;
        continue;
      }
      if (i + 2 < in.size()) {
        const int hi = hex_value(in[i + 1]), lo = hex_value(in[i + 2]);
        if (hi >= 0 && lo >= 0) {
          out.push_back(static_cast<char>(hi * 16 + lo));
          i += 2;
          continue;
        }
      }
    }
    out.push_back(header && c == '_' ? ' ' : c);
  }
  return out;
}

/// Decodes RFC 2047 encoded words; whitespace between adjacent encoded words is dropped.
inline Decoded decode_header(std::string_view value) {
  Decoded out;
  std::size_t i = 0;
  std::string pending_ws;
  bool last_encoded = false;
  std::string raw;
  auto flush_raw = [&] {
    if (raw.empty()) return;
    auto d = to_utf8(raw, "utf-8");
    out.text += d.text;
    out.lossy |= d.lossy;
    raw.clear();
  };
  while (i < value.size()) {
    if (value.compare(i, 2, "=?") == 0) {
      const auto q1 = value.find('?', i + 2);
      const auto q2 = q1 == std::string_view::npos ? q1 : value.find('?', q1 + 1);
      const auto end = q2 == std::string_view::npos ? q2 : value.find("?=", q2 + 1);
      if (end != std::string_view::npos && q2 == q1 + 2) {
        const auto charset = value.substr(i + 2, q1 - i - 2);
        const char enc = static_cast<char>(std::toupper(static_cast<unsigned char>(value[q1 + 1])));
        const auto payload = value.substr(q2 + 1, end - q2 - 1);
        if (enc == 'B' || enc == 'Q') {
          if (!last_encoded) raw += pending_ws;
          pending_ws.clear();
          flush_raw();
          const auto bytes = enc == 'B' ? decode_base64(payload) : decode_qp(payload, true);
          auto d = to_utf8(bytes, std::string(charset.substr(0, charset.find('*'))));
          out.text += d.text;
          out.lossy |= d.lossy;
          last_encoded = true;
          i = end + 2;
          continue;
        }
      }
    }
    const char c = value[i++];
    if (c == ' ' || c == '\t') {
      pending_ws.push_back(c);
      continue;
    }
    raw += pending_ws;
    pending_ws.clear();
    raw.push_back(c);
    last_encoded = false;
  }
  if (!last_encoded) raw += pending_ws;
  flush_raw();
  return out;
}

using Headers = std::multimap<std::string, std::string>;  // lowercase name -> unfolded value

inline std::optional<std::string> header(const Headers& h, const std::string& name) {
  auto it = h.find(name);
  if (it == h.end()) return std::nullopt;
  return it->second;
}

/// Splits an entity into unfolded headers and body at the first blank line.
inline std::pair<Headers, std::string_view> split_entity(std::string_view raw) {
  Headers h;
  std::size_t pos = 0;
  std::string name, value;
  auto commit = [&] {
    if (!name.empty()) h.emplace(lower(trim(name)), std::string(trim(value)));
    name.clear();
    value.clear();
  };
  while (pos < raw.size()) {
    auto eol = raw.find('\n', pos);
    if (eol == std::string_view::npos) eol = raw.size();
    auto line = raw.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = std::min(eol + 1, raw.size());
    if (line.empty()) {
      commit();
      return {std::move(h), raw.substr(pos)};
    }
    if ((line.front() == ' ' || line.front() == '\t') && !name.empty()) {
      value += ' ';
      value += trim(line);
      continue;
    }
    commit();
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    name = std::string(line.substr(0, colon));
    value = std::string(line.substr(colon + 1));
  }
  commit();
  return {std::move(h), std::string_view()};
}

struct ContentType {
  std::string type = "text/plain";
  std::map<std::string, std::string> params;
};

inline ContentType parse_content_type(std::string_view v) {
  ContentType ct;
  const auto semi = v.find(';');
  const auto t = lower(trim(v.substr(0, semi)));
  if (!t.empty()) ct.type = t;
  std::size_t pos = semi;
  while (pos != std::string_view::npos && pos < v.size()) {
    const auto next = v.find(';', pos + 1);
    auto part = trim(v.substr(pos + 1, next == std::string_view::npos ? std::string_view::npos : next - pos - 1));
    const auto eq = part.find('=');
    if (eq != std::string_view::npos) {
      auto val = trim(part.substr(eq + 1));
      if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
      ct.params[lower(trim(part.substr(0, eq)))] = std::string(val);
    }
    pos = next;
  }
  return ct;
}

inline std::string strip_html(std::string_view html) {
  std::string out;
  bool tag = false;
  for (std::size_t i = 0; i < html.size(); ++i) {
    const char c = html[i];
    if (tag) {
      if (c == '>') tag = false;
      continue;
    }
    if (c == '<') {
      const auto rest = lower(html.substr(i, 4));
      if (rest == "<br>" || rest == "<br/" || rest.rfind("<p", 0) == 0) out.push_back('\n');
      tag = true;
      continue;
    }
    if (c == '&') {
      static const std::pair<std::string_view, char> entities[] = {
          {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&#39;", '\''}, {"&nbsp;", ' '}};
      bool hit = false;
      for (const auto& [ent, ch] : entities) {
        if (html.compare(i, ent.size(), ent) == 0) {
          out.push_back(ch);
          i += ent.size() - 1;
          hit = true;
          break;
        }
      }
      if (hit) continue;
    }
    out.push_back(c);
  }
  return out;
}

struct BodyText {
  std::optional<std::string> plain;
  std::optional<std::string> html;
  bool lossy = false;
};

inline void collect_text(const Headers& h, std::string_view body, BodyText& out, int depth = 0) {
  const auto ct = parse_content_type(header(h, "content-type").value_or("text/plain"));
  if (ct.type.rfind("multipart/", 0) == 0 && depth < 8) {
    auto b = ct.params.find("boundary");
    if (b == ct.params.end() || b->second.empty()) return;
    const std::string delim = "--" + b->second;
    std::size_t pos = 0;
    std::optional<std::size_t> part_start;
    while (pos <= body.size()) {
      auto eol = body.find('\n', pos);
      if (eol == std::string_view::npos) eol = body.size();
      auto line = body.substr(pos, eol - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.rfind(delim, 0) == 0) {
        if (part_start) {
          const auto end = pos > *part_start ? pos - 1 : pos;
          const auto [ph, pb] = split_entity(body.substr(*part_start, end - *part_start));
          collect_text(ph, pb, out, depth + 1);
        }
        if (line.substr(delim.size()).rfind("--", 0) == 0) return;
        part_start = std::min(eol + 1, body.size());
      }
      if (eol == body.size()) break;
      pos = eol + 1;
    }
    return;
  }
  const bool plain = ct.type == "text/plain";
  const bool html = ct.type == "text/html";
  if ((!plain && !html) || (plain && out.plain) || (html && out.html)) return;
  const auto cte = lower(trim(header(h, "content-transfer-encoding").value_or("7bit")));
  std::string bytes = cte == "base64" ? decode_base64(body)
                      : cte == "quoted-printable" ? decode_qp(body)
                                                  : std::string(body);
  std::erase(bytes, '\r');
  auto d = to_utf8(bytes, ct.params.count("charset") ? ct.params.at("charset") : "");
  out.lossy |= d.lossy;
  if (plain) out.plain = std::move(d.text);
  else out.html = strip_html(d.text);
}

/// "Name <addr>", "addr (Name)" and pipermail's "user at host (Name)" -> lowercase address.
inline std::string parse_address(std::string_view v) {
  std::string s;
  if (const auto lt = v.find('<'); lt != std::string_view::npos) {
    const auto gt = v.find('>', lt);
    s = std::string(v.substr(lt + 1, gt == std::string_view::npos ? std::string_view::npos : gt - lt - 1));
  } else {
    s = std::string(v.substr(0, v.find('(')));
  }
  s = std::string(trim(s));
  if (const auto at = s.find(" at "); at != std::string::npos && s.find('@') == std::string::npos)
    s = s.substr(0, at) + "@" + s.substr(at + 4);
  return lower(trim(s));
}

}  // namespace mime

/// Subject to discussion id: repeatedly strips leading "Re:", "Fwd:", "Fw:"
/// (any case) and "[list]" tags, collapses whitespace and lowercases.
inline std::string normalize_subject(std::string_view subject) {
  std::string s = mime::collapse_ws(subject);
  for (bool changed = true; changed;) {
    changed = false;
    s = std::string(detail::trim(s));
    const auto low = mime::lower(s);
    for (std::string_view prefix : {"re:", "fwd:", "fw:"}) {
      if (low.rfind(prefix, 0) == 0) {
        s.erase(0, prefix.size());
        changed = true;
        break;
      }
    }
    if (!changed && !s.empty() && s.front() == '[') {
      const auto close = s.find(']');
      if (close != std::string::npos) {
        s.erase(0, close + 1);
        changed = true;
      }
    }
  }
  return mime::lower(s);
}

/// Undoes mboxrd escaping: ">From ", ">>From ", ... lose one '>'.
inline std::string unescape_from_lines(std::string_view body) {
  std::string out;
  out.reserve(body.size());
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto eol = body.find('\n', pos);
    const auto end = eol == std::string_view::npos ? body.size() : eol + 1;
    auto line = body.substr(pos, end - pos);
    const auto gt = line.find_first_not_of('>');
    if (gt != std::string_view::npos && gt > 0 && line.substr(gt).rfind("From ", 0) == 0) line.remove_prefix(1);
    out.append(line);
    pos = end;
  }
  return out;
}

namespace detail {

inline void parse_one_mail(std::string_view raw, std::size_t index, ParsedMessages& out, bool include_subject) {
  const auto [h, body] = mime::split_entity(raw);
  const auto msgid = mime::header(h, "message-id");
  std::string id;
  if (msgid) {
    id = std::string(trim(*msgid));
    if (id.size() >= 2 && id.front() == '<' && id.back() == '>') id = id.substr(1, id.size() - 2);
  }
  if (id.empty()) id = "mbox-" + std::to_string(index);
  const auto from = mime::header(h, "from");
  const auto date = mime::header(h, "date");
  if (!from || mime::parse_address(*from).empty()) return out.issues.push_back({id, "missing From header"});
  if (!date) return out.issues.push_back({id, "missing Date header"});
  const auto ts = parse_rfc2822(*date);
  if (!ts) return out.issues.push_back({id, "unparseable Date '" + *date + "'"});
  auto subject = mime::decode_header(mime::header(h, "subject").value_or(""));
  mime::BodyText text;
  mime::collect_text(h, body, text);
  Message m;
  m.id = id;
  m.author = mime::parse_address(mime::decode_header(*from).text);
  m.ts = *ts;
  m.discussion = normalize_subject(subject.text);
  if (m.discussion.empty()) m.discussion = "(no subject)";
  m.channel = Channel::mailing_list;
  m.text = strip_quoted_lines(unescape_from_lines(text.plain ? *text.plain : text.html.value_or("")));
  while (!m.text.empty() && std::isspace(static_cast<unsigned char>(m.text.back()))) m.text.pop_back();
  if (include_subject && !subject.text.empty()) m.text = subject.text + "\n" + m.text;
  if (text.lossy || subject.lossy) out.warnings.push_back({id, "lossy charset decode"});
  out.messages.push_back(std::move(m));
}

}  // namespace detail

/// One Message per mail. Mails start at lines beginning "From " at the start
/// of the stream or after a blank line. Only bodies are scored unless
/// `include_subject` prepends the decoded subject line to the text.
inline ParsedMessages parse_mbox(std::istream& in, bool include_subject = false) {
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ParsedMessages out;
  std::vector<std::size_t> starts;
  std::size_t pos = 0;
  bool prev_blank = true;
  while (pos < data.size()) {
    auto eol = data.find('\n', pos);
    if (eol == std::string::npos) eol = data.size();
    const std::string_view line(data.data() + pos, eol - pos);
    if (prev_blank && line.rfind("From ", 0) == 0) starts.push_back(pos);
    prev_blank = line.empty() || line == "\r";
    pos = eol + 1;
  }
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const auto begin = data.find('\n', starts[i]);
    if (begin == std::string::npos) continue;
    const auto end = i + 1 < starts.size() ? starts[i + 1] : data.size();
    detail::parse_one_mail(std::string_view(data).substr(begin + 1, end - begin - 1), i, out, include_subject);
  }
  detail::sort_messages(out.messages);
  return out;
}

}  // namespace ossmood
