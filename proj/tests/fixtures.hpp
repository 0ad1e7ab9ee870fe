#pragma once

// Synthetic corpora for tests. The toxic lexicon is made of invented words,
// so nothing offensive ships with the test suite.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tagfill/tagfill.hpp"

namespace tagfill::fixtures {

inline const std::vector<std::string>& toxic_words() {
  static const std::vector<std::string> words = {
      "гадюкин", "мракоб", "злобарь", "вреднюк", "гнилуш",
      "тупарь",  "хамыга", "сквернюк", "дурнец", "пакостяй"};
  return words;
}

inline const std::vector<std::string>& neutral_words() {
  static const std::vector<std::string> words = {
      "какие", "же",     "эти",    "люди",   "сколько", "в",      "россии",
      "месте", "с",      "тобой",  "дом",    "город",   "утром",  "вечером",
      "мы",    "они",    "видели", "новый",  "старый",  "парк",   "река",
      "очень", "всегда", "иногда", "работа", "друзья",  "погода", "сегодня",
      "вчера", "хорошо", "идут",   "живут",  "рядом",   "около",  "наш",
      "ваш",   "книга",  "письмо", "Ёлка",   "ёж"};
  return words;
}

inline const std::vector<std::string>& punctuation() {
  static const std::vector<std::string> marks = {",", ".", "!", "?", "!"};
  return marks;
}

inline const std::vector<std::string>& soft_words() {
  static const std::vector<std::string> words = {"плохой", "нехороший", "неприятный",
                                                 "странный", "грубый"};
  return words;
}

inline Lexicon toy_lexicon() {
  Lexicon lexicon;
  const auto& soft = soft_words();
  for (std::size_t i = 0; i < toxic_words().size(); ++i) {
    lexicon.add(toxic_words()[i], {soft[i % soft.size()]});
  }
  return lexicon;
}

inline std::string pick(const std::vector<std::string>& pool, Rng& rng) {
  return pool[uniform_index(rng, pool.size())];
}

// A random token sentence: mostly neutral words, some toxic words, trailing
// punctuation now and then.
inline std::vector<std::string> random_sentence(Rng& rng, std::size_t min_len = 3,
                                                std::size_t max_len = 12,
                                                double toxic_rate = 0.15) {
  const std::size_t len = min_len + uniform_index(rng, max_len - min_len + 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < len; ++i) {
    if (coin(rng) < toxic_rate) {
      tokens.push_back(pick(toxic_words(), rng));
    } else if (i > 0 && coin(rng) < 0.1) {
      tokens.push_back(pick(punctuation(), rng));
    } else {
      tokens.push_back(pick(neutral_words(), rng));
    }
  }
  return tokens;
}

// Random keep/delete/replace/insert edits applied to a random sentence.
inline ParallelPair random_pair(Rng& rng) {
  const auto source = random_sentence(rng, 1, 14);
  std::vector<std::string> target;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (const auto& token : source) {
    const double u = coin(rng);
    if (u < 0.1) target.push_back(pick(soft_words(), rng));
    if (u < 0.55) {
      target.push_back(token);
    } else if (u < 0.7) {
      // deleted
    } else if (u < 0.85) {
      target.push_back(pick(soft_words(), rng));
    } else {
      target.push_back(pick(neutral_words(), rng));
      if (coin(rng) < 0.3) target.push_back(pick(soft_words(), rng));
    }
  }
  if (coin(rng) < 0.1) target.push_back(pick(neutral_words(), rng));
  if (target.empty()) target.push_back(pick(neutral_words(), rng));
  return {detokenize(source), {detokenize(target)}};
}

inline std::vector<ParallelPair> parallel_corpus(std::size_t size, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ParallelPair> pairs;
  pairs.reserve(size);
  for (std::size_t i = 0; i < size; ++i) pairs.push_back(random_pair(rng));
  return pairs;
}

// Tags are DELETE exactly on lexicon words; gaps never insert.
inline std::vector<TaggedTokens> lexicon_separable(std::size_t size, std::uint64_t seed) {
  Rng rng(seed);
  const Lexicon lexicon = toy_lexicon();
  std::vector<TaggedTokens> out;
  for (std::size_t k = 0; k < size; ++k) {
    TaggedTokens ex;
    ex.tokens = random_sentence(rng, 3, 12, 0.25);
    ex.tags = TagSequence::all_keep(ex.tokens.size());
    for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
      if (lexicon.contains(ex.tokens[i])) ex.tags.token_tags[i] = Tag::kDelete;
    }
    out.push_back(std::move(ex));
  }
  return out;
}

// Toxic exactly when the text contains a lexicon word, which doubles as the
// marker substring.
inline std::vector<LabeledText> marker_corpus(std::size_t size, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledText> out;
  for (std::size_t k = 0; k < size; ++k) {
    const bool toxic = k % 2 == 0;
    auto tokens = random_sentence(rng, 3, 10, 0.0);
    if (toxic) {
      const std::size_t at = uniform_index(rng, tokens.size() + 1);
      tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(at), pick(toxic_words(), rng));
    }
    out.push_back({detokenize(tokens), toxic ? Label::kToxic : Label::kNeutral});
  }
  return out;
}

}  // namespace tagfill::fixtures
