#pragma once

// Query-text normalization shared by the LongReq feature and the lexical
// auto-annotator.

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sessiontypo {

enum class TokenClass { word, operator_ };

struct Token {
  std::string text;
  TokenClass kind = TokenClass::word;

  friend bool operator==(const Token&, const Token&) = default;
};

namespace detail {

// Decodes one UTF-8 sequence starting at s[i]; invalid bytes decode as
// themselves (Latin-1 fallback) so no input is ever rejected.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
  auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  unsigned char c = byte(i);
  auto continuation = [&](std::size_t k) { return k < s.size() && (byte(k) & 0xC0) == 0x80; };
  if (c < 0x80) {
    ++i;
    return c;
  }
  if ((c & 0xE0) == 0xC0 && continuation(i + 1)) {
    char32_t cp = ((c & 0x1F) << 6) | (byte(i + 1) & 0x3F);
    i += 2;
    return cp;
  }
  if ((c & 0xF0) == 0xE0 && continuation(i + 1) && continuation(i + 2)) {
    char32_t cp = ((c & 0x0F) << 12) | ((byte(i + 1) & 0x3F) << 6) | (byte(i + 2) & 0x3F);
    i += 3;
    return cp;
  }
  if ((c & 0xF8) == 0xF0 && continuation(i + 1) && continuation(i + 2) && continuation(i + 3)) {
    char32_t cp = ((c & 0x07) << 18) | ((byte(i + 1) & 0x3F) << 12) |
                  ((byte(i + 2) & 0x3F) << 6) | (byte(i + 3) & 0x3F);
    i += 4;
    return cp;
  }
  ++i;
  return c;
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// ASCII replacement for U+00C0..U+00FF, lowercase; "" means no mapping.
inline constexpr const char* kLatin1Fold[64] = {
    "a", "a", "a", "a", "a", "a", "ae", "c",  // C0-C7
    "e", "e", "e", "e", "i", "i", "i", "i",   // C8-CF
    "d", "n", "o", "o", "o", "o", "o", "",    // D0-D7 (D7 is the multiplication sign)
    "o", "u", "u", "u", "u", "y", "th", "ss", // D8-DF
    "a", "a", "a", "a", "a", "a", "ae", "c",  // E0-E7
    "e", "e", "e", "e", "i", "i", "i", "i",   // E8-EF
    "d", "n", "o", "o", "o", "o", "o", "",    // F0-F7 (F7 is the division sign)
    "o", "u", "u", "u", "u", "y", "th", "y",  // F8-FF
};

// Appends the folded form of one code point. Returns false when the code
// point has no folding and should be copied through unchanged.
inline bool fold_code_point(char32_t cp, std::string& out) {
  if (cp >= 0xC0 && cp <= 0xFF && *kLatin1Fold[cp - 0xC0] != '\0') {
    out += kLatin1Fold[cp - 0xC0];
    return true;
  }
  if (cp >= 0x0300 && cp <= 0x036F) return true;  // combining marks vanish
  switch (cp) {
    case 0x00A0: case 0x2009: case 0x202F: out.push_back(' '); return true;
    case 0x201C: case 0x201D: case 0x201E: case 0x00AB: case 0x00BB: out.push_back('"'); return true;
    case 0x2018: case 0x2019: case 0x201A: case 0x2032: out.push_back('\''); return true;
    case 0x0152: case 0x0153: out += "oe"; return true;
    case 0x0178: out.push_back('y'); return true;
    case 0x0100: case 0x0101: case 0x0102: case 0x0103: case 0x0104: case 0x0105: out.push_back('a'); return true;
    case 0x0106: case 0x0107: case 0x010C: case 0x010D: out.push_back('c'); return true;
    case 0x0112: case 0x0113: case 0x0116: case 0x0117: case 0x0118: case 0x0119:
    case 0x011A: case 0x011B: out.push_back('e'); return true;
    case 0x012A: case 0x012B: case 0x012E: case 0x012F: case 0x0130: case 0x0131: out.push_back('i'); return true;
    case 0x0141: case 0x0142: out.push_back('l'); return true;
    case 0x0143: case 0x0144: case 0x0147: case 0x0148: out.push_back('n'); return true;
    case 0x014C: case 0x014D: case 0x0150: case 0x0151: out.push_back('o'); return true;
    case 0x0158: case 0x0159: out.push_back('r'); return true;
    case 0x015A: case 0x015B: case 0x015E: case 0x015F: case 0x0160: case 0x0161: out.push_back('s'); return true;
    case 0x0162: case 0x0163: case 0x0164: case 0x0165: out.push_back('t'); return true;
    case 0x016A: case 0x016B: case 0x016E: case 0x016F: case 0x0170: case 0x0171:
    case 0x0172: case 0x0173: out.push_back('u'); return true;
    case 0x0179: case 0x017A: case 0x017B: case 0x017C: case 0x017D: case 0x017E: out.push_back('z'); return true;
    case 0x2013: case 0x2014: out.push_back('-'); return true;
    default: return false;
  }
}

inline bool is_edge_punct(char c) {
  switch (c) {
    case '"': case '\'': case '`': case '.': case ',': case ';': case ':': case '!':
    case '?': case '(': case ')': case '[': case ']': case '{': case '}': case '<':
    case '>': case '*': case '+':
      return true;
    default:
      return false;
  }
}

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace detail

/// Lowercases ASCII and folds Latin diacritics and typographic quotes to
/// their ASCII base ("Détecteur" -> "detecteur").
inline std::string fold_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = detail::decode_utf8(text, i);
    if (cp < 0x80) {
      char c = static_cast<char>(cp);
      out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
    } else if (!detail::fold_code_point(cp, out)) {
      detail::append_utf8(out, cp);
    }
  }
  return out;
}

/// Whitespace tokenization with edge punctuation and quotes stripped.
/// AND / OR / NOT (any case) are classed as operators.
inline std::vector<Token> normalize_tokens(std::string_view text) {
  const std::string folded = fold_text(text);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < folded.size()) {
    while (i < folded.size() && detail::is_space(folded[i])) ++i;
    std::size_t start = i;
    while (i < folded.size() && !detail::is_space(folded[i])) ++i;
    std::string_view raw(folded.data() + start, i - start);
    while (!raw.empty() && detail::is_edge_punct(raw.front())) raw.remove_prefix(1);
    while (!raw.empty() && detail::is_edge_punct(raw.back())) raw.remove_suffix(1);
    if (raw.empty()) continue;
    Token token{std::string(raw), TokenClass::word};
    if (token.text == "and" || token.text == "or" || token.text == "not")
      token.kind = TokenClass::operator_;
    tokens.push_back(std::move(token));
  }
  return tokens;
}

inline std::string join_tokens(const std::vector<Token>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t.text;
  }
  return out;
}

/// Optimal-string-alignment Damerau-Levenshtein distance (insertions,
/// deletions, substitutions, adjacent transpositions), over bytes.
inline std::size_t damerau_levenshtein(std::string_view a, std::string_view b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev2(m + 1), prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
        cur[j] = std::min(cur[j], prev2[j - 2] + 1);
    }
    std::swap(prev2, prev);
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace sessiontypo
