#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ssd {

// Pluggable tokenizer contract. The default splits on maximal runs of
// letters (apostrophes kept when flanked by letters on both sides), lowercases
// the result, and drops digits and punctuation. Callers with access to a
// richer NLP stack can substitute their own function.
using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;

namespace detail {

// Decodes one UTF-8 codepoint starting at `i`; advances `i` past it.
// Malformed bytes decode to U+FFFD and consume a single byte.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t j) -> std::uint32_t {
    return static_cast<std::uint8_t>(s[j]);
  };
  const std::uint32_t b0 = byte(i);
  if (b0 < 0x80) {
    i += 1;
    return b0;
  }
  const auto cont = [&](std::size_t j) {
    return j < s.size() && (byte(j) & 0xC0u) == 0x80u;
  };
  if ((b0 & 0xE0u) == 0xC0u && cont(i + 1)) {
    const char32_t cp = ((b0 & 0x1Fu) << 6) | (byte(i + 1) & 0x3Fu);
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0u) == 0xE0u && cont(i + 1) && cont(i + 2)) {
    const char32_t cp =
        ((b0 & 0x0Fu) << 12) | ((byte(i + 1) & 0x3Fu) << 6) | (byte(i + 2) & 0x3Fu);
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8u) == 0xF0u && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
    const char32_t cp = ((b0 & 0x07u) << 18) | ((byte(i + 1) & 0x3Fu) << 12) |
                        ((byte(i + 2) & 0x3Fu) << 6) | (byte(i + 3) & 0x3Fu);
    i += 4;
    return cp;
  }
  i += 1;
  return 0xFFFD;
}

inline void encode_utf8(char32_t cp, std::string& out) {
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

// Letter test by codepoint block. ASCII is exact; beyond ASCII the test is a
// block-range approximation that admits the common alphabetic scripts and
// rejects the punctuation/symbol planes.
inline bool is_letter(char32_t cp) {
  if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  if (cp == 0xD7 || cp == 0xF7) return false;  // multiplication/division signs
  if (cp >= 0xC0 && cp <= 0x02AF) return true;   // Latin-1 .. IPA extensions
  if (cp >= 0x0370 && cp <= 0x1FFF) return true; // Greek .. Greek Extended
  if (cp >= 0x2C00 && cp <= 0x2DFF) return true; // Glagolitic .. Cyrillic Ext
  if (cp >= 0x3040 && cp <= 0x30FF) return true; // kana
  if (cp >= 0x3400 && cp <= 0x9FFF) return true; // CJK
  if (cp >= 0xA720 && cp <= 0xA7FF) return true; // Latin Extended-D
  if (cp >= 0xAC00 && cp <= 0xD7A3) return true; // Hangul
  return false;
}

inline bool is_apostrophe(char32_t cp) {
  return cp == U'\'' || cp == 0x2019;  // ASCII apostrophe, right single quote
}

// Lowercases ASCII plus the regular Latin-1 / Latin Extended-A / Greek /
// Cyrillic case pairs; other codepoints pass through unchanged.
inline char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x0100 && cp <= 0x0177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x0179 && cp <= 0x017E) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x0391 && cp <= 0x03AB && cp != 0x03A2) return cp + 0x20;
  if (cp >= 0x0410 && cp <= 0x042F) return cp + 0x20;
  if (cp >= 0x0400 && cp <= 0x040F) return cp + 0x50;
  return cp;
}

}  // namespace detail

// Default tokenizer: lowercased maximal letter runs, apostrophes retained
// only between letters, everything else (digits, punctuation, symbols)
// treated as a separator. Deterministic; empty input yields an empty list.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::vector<char32_t> run;  // current token codepoints
  std::size_t pending_apostrophes = 0;

  const auto flush = [&] {
    if (!run.empty()) {
      std::string token;
      for (char32_t cp : run) detail::encode_utf8(cp, token);
      tokens.push_back(std::move(token));
      run.clear();
    }
    pending_apostrophes = 0;
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = detail::decode_utf8(text, i);
    if (detail::is_letter(cp)) {
      // Apostrophes seen since the last letter become part of the token only
      // now that a letter follows them.
      for (; pending_apostrophes > 0; --pending_apostrophes) run.push_back(U'\'');
      run.push_back(detail::to_lower(cp));
    } else if (detail::is_apostrophe(cp) && !run.empty()) {
      ++pending_apostrophes;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

inline Tokenizer default_tokenizer() {
  return [](std::string_view text) { return tokenize(text); };
}

}  // namespace ssd
