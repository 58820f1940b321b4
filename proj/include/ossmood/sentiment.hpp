#pragma once

// Lexicon-based dual-polarity scoring (positive strength p in [1,5], negative
// strength n in [-5,-1]) and the polarity rule that aggregates (p, n).

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ossmood/error.hpp"

namespace ossmood {

enum class Polarity { positive, negative, neutral, discarded };

inline std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::positive: return "positive";
    case Polarity::negative: return "negative";
    case Polarity::neutral: return "neutral";
    case Polarity::discarded: return "discarded";
  }
  return "?";
}

/// positive iff p+n>0, negative iff p+n<0; on a tie (p == |n|) neutral below
/// strength 4 and discarded at [+4,-4] and [+5,-5].
inline Polarity classify_polarity(int p, int n) {
  if (p < 1 || p > 5 || n < -5 || n > -1)
    throw ContractViolation("classify_polarity: (p, n) outside [1,5] x [-5,-1]");
  const int sum = p + n;
  if (sum > 0) return Polarity::positive;
  if (sum < 0) return Polarity::negative;
  return p < 4 ? Polarity::neutral : Polarity::discarded;
}

struct SentimentScore {
  int p = 1;
  int n = -1;
  Polarity polarity = Polarity::neutral;

  static SentimentScore from(int p, int n) { return {p, n, classify_polarity(p, n)}; }

  /// s in {-1, 0, +1}; discarded scores map to 0 but callers exclude them.
  int sign() const {
    return polarity == Polarity::positive ? 1 : polarity == Polarity::negative ? -1 : 0;
  }

  friend bool operator==(const SentimentScore&, const SentimentScore&) = default;
};

/// Emotion-bearing terms plus negators and boosters.
///
/// Term patterns are exact tokens or prefixes ending in '*'. Patterns that
/// contain characters other than letters, digits and apostrophes (emoticons)
/// are matched against whole whitespace-delimited chunks.
class Lexicon {
 public:
  void add_term(std::string pattern, int strength) {
    if (strength < -5 || strength > 5 || (strength > -2 && strength < 2))
      throw ValidationError("strength " + std::to_string(strength) +
                            " outside [-5,-2] u [+2,+5] for '" + pattern + "'");
    pattern = lowercase(pattern);
    if (pattern.empty() || pattern == "*") throw ValidationError("empty term pattern");
    const bool wildcard = pattern.back() == '*';
    if (wildcard) pattern.pop_back();
    if (pattern.find('*') != std::string::npos)
      throw ValidationError("wildcard allowed only at the end of '" + pattern + "'");
    auto& table = wildcard ? prefixes_ : exact_;
    if (!table.emplace(pattern, strength).second)
      throw ValidationError("duplicate pattern '" + pattern + (wildcard ? "*'" : "'"));
    if (wildcard) max_prefix_ = std::max(max_prefix_, pattern.size());
    if (!is_word(pattern)) symbolic_.insert(pattern);
  }

  void add_negator(std::string token) {
    token = lowercase(token);
    if (match(token)) throw ValidationError("negator '" + token + "' is also a scored term");
    if (boosters_.count(token)) throw ValidationError("'" + token + "' is both negator and booster");
    negators_.insert(std::move(token));
  }

  void add_booster(std::string token, int modifier) {
    if (modifier != 1 && modifier != -1)
      throw ValidationError("booster modifier must be +1 or -1 for '" + token + "'");
    token = lowercase(token);
    if (match(token)) throw ValidationError("booster '" + token + "' is also a scored term");
    if (negators_.count(token)) throw ValidationError("'" + token + "' is both negator and booster");
    if (!boosters_.emplace(token, modifier).second)
      throw ValidationError("duplicate booster '" + token + "'");
  }

  /// Exact match first, then the longest wildcard prefix.
  std::optional<int> match(std::string_view token) const {
    if (auto it = exact_.find(std::string(token)); it != exact_.end()) return it->second;
    for (std::size_t len = std::min(token.size(), max_prefix_); len > 0; --len) {
      if (auto it = prefixes_.find(std::string(token.substr(0, len))); it != prefixes_.end())
        return it->second;
    }
    return std::nullopt;
  }

  bool is_negator(std::string_view t) const { return negators_.count(std::string(t)) > 0; }

  int booster(std::string_view t) const {
    auto it = boosters_.find(std::string(t));
    return it == boosters_.end() ? 0 : it->second;
  }

  bool is_symbolic(std::string_view chunk) const {
    return !symbolic_.empty() && symbolic_.count(std::string(chunk)) > 0;
  }

  std::size_t term_count() const { return exact_.size() + prefixes_.size(); }
  std::size_t negator_count() const { return negators_.size(); }
  std::size_t booster_count() const { return boosters_.size(); }

  static std::string lowercase(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  }

  static bool is_word_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u);
  }

 private:
  static bool is_word(std::string_view s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (is_word_char(s[i])) continue;
      if (s[i] == '\'' && i > 0 && i + 1 < s.size()) continue;
      return false;
    }
    return true;
  }

  std::unordered_map<std::string, int> exact_;
  std::unordered_map<std::string, int> prefixes_;
  std::unordered_set<std::string> symbolic_;
  std::size_t max_prefix_ = 0;
  std::unordered_set<std::string> negators_;
  std::unordered_map<std::string, int> boosters_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Calls fn(line_no, content) for every non-blank, non-comment line.
template <typename Fn>
void for_each_entry(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    fn(line_no, t);
  }
}

inline std::pair<std::string, int> split_tab_int(std::string_view t, const std::string& name,
                                                 std::size_t line_no) {
  const auto tab = t.find('\t');
  if (tab == std::string_view::npos) throw LoadError(name, line_no, "expected '<token>\\t<int>'");
  const auto key = trim(t.substr(0, tab));
  auto value = trim(t.substr(tab + 1));
  if (!value.empty() && value.front() == '+') value.remove_prefix(1);
  int v = 0;
  try {
    std::size_t used = 0;
    v = std::stoi(std::string(value), &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw LoadError(name, line_no, "invalid integer '" + std::string(value) + "'");
  }
  return {std::string(key), v};
}

}  // namespace detail

/// Reads `pattern<TAB>strength` lines into `lex`.
inline void read_terms(std::istream& in, Lexicon& lex, const std::string& name = "terms.tsv") {
  detail::for_each_entry(in, [&](std::size_t line_no, std::string_view t) {
    auto [pattern, strength] = detail::split_tab_int(t, name, line_no);
    try {
      lex.add_term(pattern, strength);
    } catch (const ValidationError& e) {
      throw LoadError(name, line_no, e.what());
    }
  });
}

inline void read_negators(std::istream& in, Lexicon& lex, const std::string& name = "negators.txt") {
  detail::for_each_entry(in, [&](std::size_t line_no, std::string_view t) {
    try {
      lex.add_negator(std::string(t));
    } catch (const ValidationError& e) {
      throw LoadError(name, line_no, e.what());
    }
  });
}

inline void read_boosters(std::istream& in, Lexicon& lex, const std::string& name = "boosters.tsv") {
  detail::for_each_entry(in, [&](std::size_t line_no, std::string_view t) {
    auto [token, modifier] = detail::split_tab_int(t, name, line_no);
    try {
      lex.add_booster(token, modifier);
    } catch (const ValidationError& e) {
      throw LoadError(name, line_no, e.what());
    }
  });
}

/// Loads a lexicon from three files. The negator and booster files may be
/// empty paths, in which case those sets stay empty.
inline Lexicon load_lexicon(const std::filesystem::path& term_file,
                            const std::filesystem::path& negator_file,
                            const std::filesystem::path& booster_file) {
  Lexicon lex;
  auto open = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw LoadError(p.string(), 0, "cannot open");
    return in;
  };
  {
    auto in = open(term_file);
    read_terms(in, lex, term_file.string());
  }
  if (!negator_file.empty()) {
    auto in = open(negator_file);
    read_negators(in, lex, negator_file.string());
  }
  if (!booster_file.empty()) {
    auto in = open(booster_file);
    read_boosters(in, lex, booster_file.string());
  }
  return lex;
}

/// Loads `terms.tsv`, `negators.txt` and `boosters.tsv` from a directory.
/// The latter two are optional.
inline Lexicon load_lexicon_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw LoadError(dir.string(), 0, "lexicon directory not found");
  const auto neg = dir / "negators.txt";
  const auto boost = dir / "boosters.tsv";
  return load_lexicon(dir / "terms.tsv", std::filesystem::exists(neg) ? neg : "",
                      std::filesystem::exists(boost) ? boost : "");
}

/// Lowercases and splits on characters other than letters and digits,
/// keeping apostrophes inside words. Whitespace-delimited chunks that are
/// symbolic lexicon terms (emoticons) are kept whole.
inline std::vector<std::string> tokenize(std::string_view text, const Lexicon* lex = nullptr) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) break;
    const std::string chunk = Lexicon::lowercase(text.substr(i, j - i));
    i = j;
    if (lex && lex->is_symbolic(chunk)) {
      tokens.push_back(chunk);
      continue;
    }
    std::string cur;
    for (std::size_t k = 0; k < chunk.size(); ++k) {
      const char c = chunk[k];
      if (Lexicon::is_word_char(c) ||
          (c == '\'' && !cur.empty() && k + 1 < chunk.size() && Lexicon::is_word_char(chunk[k + 1]))) {
        cur.push_back(c);
      } else if (!cur.empty()) {
        tokens.push_back(std::move(cur));
        cur.clear();
      }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
  }
  return tokens;
}

/// Scores one message. A booster directly before a term shifts its magnitude
/// by +-1 (clamped to [2,5]); a negator among the two preceding tokens flips
/// its sign. p is the strongest positive strength (1 if none), n the strongest
/// negative (-1 if none).
inline SentimentScore score_message(const Lexicon& lex, std::string_view text) {
  const auto tokens = tokenize(text, &lex);
  int p = 1, n = -1;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto strength = lex.match(tokens[i]);
    if (!strength) continue;
    int magnitude = std::abs(*strength);
    int sign = *strength > 0 ? 1 : -1;
    if (i >= 1) {
      if (const int mod = lex.booster(tokens[i - 1]); mod != 0)
        magnitude = std::clamp(magnitude + mod, 2, 5);
    }
    for (std::size_t back = 1; back <= 2 && back <= i; ++back) {
      if (lex.is_negator(tokens[i - back])) {
        sign = -sign;
        break;
      }
    }
    if (sign > 0) p = std::max(p, magnitude);
    else n = std::min(n, -magnitude);
  }
  return SentimentScore::from(p, n);
}

}  // namespace ossmood
