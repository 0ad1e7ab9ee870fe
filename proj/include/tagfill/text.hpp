#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tagfill/utf8.hpp"

namespace tagfill {

// Half-open byte range into the text a token was cut from.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

struct Token {
  std::string text;
  Span span;

  bool operator==(const Token&) const = default;
};

// Rule-based word segmentation:
//   * a maximal run of letters/digits is one token;
//   * asterisks strictly inside such a run ("е**ть") stay in the word, since
//     that is how obfuscated words are written;
//   * any other non-space character is a token of its own;
//   * whitespace separates and is dropped.
// Invalid UTF-8 bytes are treated as single non-word characters.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto d = utf8::decode(text, pos);
    if (d.valid && utf8::is_space(d.code_point)) {
      pos += d.length;
      continue;
    }
    if (!d.valid || !utf8::is_word_char(d.code_point)) {
      tokens.push_back({std::string(text.substr(pos, d.length)),
                        {pos, pos + d.length}});
      pos += d.length;
      continue;
    }
    const std::size_t start = pos;
    std::size_t end = pos + d.length;
    pos = end;
    while (pos < text.size()) {
      const auto next = utf8::decode(text, pos);
      if (next.valid && utf8::is_word_char(next.code_point)) {
        pos += next.length;
        end = pos;
        continue;
      }
      if (text[pos] == '*') {
        std::size_t probe = pos;
        while (probe < text.size() && text[probe] == '*') ++probe;
        if (probe < text.size()) {
          const auto after = utf8::decode(text, probe);
          if (after.valid && utf8::is_word_char(after.code_point)) {
            pos = probe;
            continue;
          }
        }
      }
      break;
    }
    tokens.push_back({std::string(text.substr(start, end - start)),
                      {start, end}});
    pos = end;
  }
  return tokens;
}

inline std::vector<std::string> token_texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

inline std::vector<std::string> tokenize_texts(std::string_view text) {
  return token_texts(tokenize(text));
}

inline bool is_closing_punct(std::string_view token) {
  static constexpr std::string_view kClosing[] = {".", ",", "!", "?", ":",
                                                  ";", ")", "»"};
  return std::find(std::begin(kClosing), std::end(kClosing), token) !=
         std::end(kClosing);
}

inline bool is_opening_punct(std::string_view token) {
  return token == "(" || token == "«";
}

// Joins with single spaces, gluing closing punctuation to the left and
// opening punctuation to the right.
template <typename Range>
std::string detokenize(const Range& tokens) {
  std::string out;
  bool first = true;
  std::string_view previous;
  for (const auto& token : tokens) {
    const std::string_view current(token);
    if (!first && !is_closing_punct(current) && !is_opening_punct(previous)) {
      out.push_back(' ');
    }
    out.append(current);
    previous = current;
    first = false;
  }
  return out;
}

inline std::string fold_yo(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const auto d = utf8::decode(text, pos);
    if (d.valid && d.code_point == U'ё') {
      utf8::append(out, U'е');
    } else if (d.valid && d.code_point == U'Ё') {
      utf8::append(out, U'Е');
    } else {
      out.append(text.substr(pos, d.length));
    }
    pos += d.length;
  }
  return out;
}

// Comparison key used when alignment runs with case folding enabled.
inline std::string fold_for_match(std::string_view text) {
  return fold_yo(utf8::lower(text));
}

}  // namespace tagfill
