#pragma once

// Behavioral test battery for toxicity classifiers.
//
// INV (invariance) tests perturb a text and count a failure when the
// predicted label changes. MFT (minimum functionality) tests construct texts
// whose label is known and count a failure when the prediction disagrees.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tagfill/corpus.hpp"
#include "tagfill/lexicon.hpp"
#include "tagfill/random.hpp"
#include "tagfill/text.hpp"
#include "tagfill/toxicity.hpp"
#include "tagfill/utf8.hpp"

namespace tagfill {

enum class TestKind { kInvariance, kMinimumFunctionality };

inline std::string_view test_kind_name(TestKind kind) {
  return kind == TestKind::kInvariance ? "INV" : "MFT";
}

struct CheckCase {
  std::string original;     // INV only
  std::string transformed;
  Label label;              // INV: stored label of the original; MFT: expected
};

struct CheckContext {
  const std::vector<LabeledText>& corpus;
  const Lexicon& lexicon;
};

struct ChecklistTest {
  std::string name;
  std::string description;
  TestKind kind = TestKind::kInvariance;
  std::optional<Label> expected;  // MFT only
  std::function<std::vector<CheckCase>(const CheckContext&, Rng&)> generate;
};

struct ChecklistResult {
  std::string name;
  TestKind kind = TestKind::kInvariance;
  std::size_t applicable = 0;
  std::size_t errors = 0;

  double error_rate() const {
    return applicable == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(applicable);
  }
};

namespace checks {

inline bool contains_cp(std::string_view text, char32_t a, char32_t b = 0) {
  for (char32_t cp : utf8::to_u32(text)) {
    if (cp == a || (b != 0 && cp == b)) return true;
  }
  return false;
}

inline std::string remove_char(std::string_view text, char c) {
  std::string out;
  for (char ch : text) {
    if (ch != c) out.push_back(ch);
  }
  return out;
}

inline bool has_content(std::string_view text) {
  for (char32_t cp : utf8::to_u32(text)) {
    if (!utf8::is_space(cp)) return true;
  }
  return false;
}

inline bool is_all_caps(std::string_view text) {
  bool any_upper = false;
  for (char32_t cp : utf8::to_u32(text)) {
    if (utf8::is_lower(cp)) return false;
    any_upper = any_upper || utf8::is_upper(cp);
  }
  return any_upper;
}

// Swaps max(1, len / 20) random adjacent code-point pairs.
inline std::string add_typos(std::string_view text, Rng& rng) {
  auto cps = utf8::to_u32(text);
  const std::size_t swaps = std::max<std::size_t>(1, cps.size() / 20);
  for (std::size_t s = 0; s < swaps; ++s) {
    const std::size_t i = uniform_index(rng, cps.size() - 1);
    std::swap(cps[i], cps[i + 1]);
  }
  return utf8::from_u32(cps);
}

// Rewrites every lexicon token of `text` with `edit`; returns nullopt when no
// token qualifies. Tokens shorter than `min_length` code points are skipped.
inline std::optional<std::string> edit_lexicon_words(
    std::string_view text, const Lexicon& lexicon, std::size_t min_length,
    const std::function<std::u32string(std::u32string, Rng&)>& edit, Rng& rng) {
  std::string out;
  std::size_t cursor = 0;
  bool changed = false;
  for (const auto& token : tokenize(text)) {
    if (!lexicon.contains(token.text)) continue;
    auto cps = utf8::to_u32(token.text);
    if (cps.size() < min_length) continue;
    out.append(text.substr(cursor, token.span.begin - cursor));
    out += utf8::from_u32(edit(std::move(cps), rng));
    cursor = token.span.end;
    changed = true;
  }
  if (!changed) return std::nullopt;
  out.append(text.substr(cursor));
  return out;
}

inline std::vector<CheckCase> map_inv(const CheckContext& ctx,
                                      const std::function<std::optional<std::string>(
                                          const std::string&)>& transform) {
  std::vector<CheckCase> cases;
  for (const auto& item : ctx.corpus) {
    auto t = transform(item.text);
    if (t && has_content(*t)) cases.push_back({item.text, std::move(*t), item.label});
  }
  return cases;
}

inline std::vector<std::size_t> indices_with(const std::vector<LabeledText>& corpus, Label label) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].label == label) out.push_back(i);
  }
  return out;
}

}  // namespace checks

// The eleven standard tests.
inline std::vector<ChecklistTest> default_checklist() {
  using checks::map_inv;
  std::vector<ChecklistTest> tests;
  const auto inv = TestKind::kInvariance;
  const auto mft = TestKind::kMinimumFunctionality;

  tests.push_back({"replace_yo", "Replace yo", inv, std::nullopt,
                   [](const CheckContext& ctx, Rng&) {
                     return map_inv(ctx, [](const std::string& t) -> std::optional<std::string> {
                       if (!checks::contains_cp(t, U'ё', U'Ё')) return std::nullopt;
                       return fold_yo(t);
                     });
                   }});
  tests.push_back({"remove_exclamations", "Remove exclamations", inv, std::nullopt,
                   [](const CheckContext& ctx, Rng&) {
                     return map_inv(ctx, [](const std::string& t) -> std::optional<std::string> {
                       if (t.find('!') == std::string::npos) return std::nullopt;
                       return checks::remove_char(t, '!');
                     });
                   }});
  tests.push_back({"add_exclamations", "Add exclamations", inv, std::nullopt,
                   [](const CheckContext& ctx, Rng&) {
                     return map_inv(ctx, [](const std::string& t) -> std::optional<std::string> {
                       return t + "!!";
                     });
                   }});
  tests.push_back({"lowercase_caps", "All-caps sentences to lowercase", inv, std::nullopt,
                   [](const CheckContext& ctx, Rng&) {
                     return map_inv(ctx, [](const std::string& t) -> std::optional<std::string> {
                       if (!checks::is_all_caps(t)) return std::nullopt;
                       return utf8::lower(t);
                     });
                   }});
  tests.push_back({"remove_question_marks", "Remove question marks", inv, std::nullopt,
                   [](const CheckContext& ctx, Rng&) {
                     return map_inv(ctx, [](const std::string& t) -> std::optional<std::string> {
                       if (t.find('?') == std::string::npos) return std::nullopt;
                       return checks::remove_char(t, '?');
                     });
                   }});
  tests.push_back({"add_typos", "Add typos", inv, std::nullopt,
                   [](const CheckContext& ctx, Rng& rng) {
                     return map_inv(ctx, [&rng](const std::string& t) -> std::optional<std::string> {
                       if (utf8::length(t) < 2) return std::nullopt;
                       return checks::add_typos(t, rng);
                     });
                   }});
  tests.push_back({"mask_toxic_chars", "Masking of characters in toxic words", inv, std::nullopt,
                   [](const CheckContext& ctx, Rng& rng) {
                     return map_inv(ctx, [&](const std::string& t) {
                       return checks::edit_lexicon_words(
                           t, ctx.lexicon, 3,
                           [](std::u32string w, Rng& r) {
                             w[1 + uniform_index(r, w.size() - 2)] = U'*';
                             return w;
                           },
                           rng);
                     });
                   }});
  tests.push_back({"typos_in_toxic_words", "Add typos to toxic words only", inv, std::nullopt,
                   [](const CheckContext& ctx, Rng& rng) {
                     return map_inv(ctx, [&](const std::string& t) {
                       return checks::edit_lexicon_words(
                           t, ctx.lexicon, 2,
                           [](std::u32string w, Rng& r) {
                             const std::size_t i = uniform_index(r, w.size() - 1);
                             std::swap(w[i], w[i + 1]);
                             return w;
                           },
                           rng);
                     });
                   }});
  tests.push_back({"concat_neutral_toxic", "Concatenate non-toxic and toxic texts", mft,
                   Label::kToxic, [](const CheckContext& ctx, Rng& rng) {
                     std::vector<CheckCase> cases;
                     const auto neutral = checks::indices_with(ctx.corpus, Label::kNeutral);
                     if (neutral.empty()) return cases;
                     for (const auto& item : ctx.corpus) {
                       if (item.label != Label::kToxic) continue;
                       const auto& n = ctx.corpus[neutral[uniform_index(rng, neutral.size())]];
                       cases.push_back({"", n.text + " " + item.text, Label::kToxic});
                     }
                     return cases;
                   }});
  tests.push_back({"concat_neutral_neutral", "Concatenate two non-toxic texts", mft,
                   Label::kNeutral, [](const CheckContext& ctx, Rng& rng) {
                     std::vector<CheckCase> cases;
                     const auto neutral = checks::indices_with(ctx.corpus, Label::kNeutral);
                     if (neutral.size() < 2) return cases;
                     for (std::size_t a : neutral) {
                       std::size_t b = a;
                       while (b == a) b = neutral[uniform_index(rng, neutral.size())];
                       cases.push_back({"", ctx.corpus[a].text + " " + ctx.corpus[b].text,
                                        Label::kNeutral});
                     }
                     return cases;
                   }});
  tests.push_back({"add_toxic_word", "Add toxic words from a vocabulary", mft, Label::kToxic,
                   [](const CheckContext& ctx, Rng& rng) {
                     std::vector<CheckCase> cases;
                     if (ctx.lexicon.empty()) return cases;
                     for (const auto& item : ctx.corpus) {
                       if (item.label != Label::kNeutral) continue;
                       const auto tokens = tokenize(item.text);
                       const std::size_t gap = uniform_index(rng, tokens.size() + 1);
                       const auto& word =
                           ctx.lexicon.words()[uniform_index(rng, ctx.lexicon.size())];
                       const std::size_t at =
                           gap < tokens.size() ? tokens[gap].span.begin : item.text.size();
                       std::string text = item.text.substr(0, at);
                       if (!text.empty() && text.back() != ' ') text += ' ';
                       text += word;
                       if (at < item.text.size()) text += ' ';
                       text += item.text.substr(at);
                       cases.push_back({"", std::move(text), Label::kToxic});
                     }
                     return cases;
                   }});
  return tests;
}

inline std::vector<ChecklistResult> run_checklist(const TextScorer& classifier,
                                                  const std::vector<LabeledText>& corpus,
                                                  const std::vector<ChecklistTest>& tests,
                                                  const Lexicon& lexicon, std::uint64_t seed,
                                                  std::size_t jobs = 1) {
  const CheckContext ctx{corpus, lexicon};
  std::vector<ChecklistResult> results;
  for (std::size_t t = 0; t < tests.size(); ++t) {
    const auto& test = tests[t];
    Rng rng = derived_rng(seed, t);
    const auto cases = test.generate(ctx, rng);
    std::vector<std::string> texts;
    for (const auto& c : cases) {
      texts.push_back(c.transformed);
      if (test.kind == TestKind::kInvariance) texts.push_back(c.original);
    }
    const auto scores = classifier.score_batch(texts, jobs);
    ChecklistResult result{test.name, test.kind, cases.size(), 0};
    std::size_t k = 0;
    for (const auto& c : cases) {
      const Label predicted = predict_label(scores[k++]);
      const Label reference =
          test.kind == TestKind::kInvariance ? predict_label(scores[k++]) : c.label;
      if (predicted != reference) ++result.errors;
    }
    results.push_back(std::move(result));
  }
  return results;
}

inline std::size_t total_errors(const std::vector<ChecklistResult>& results) {
  std::size_t n = 0;
  for (const auto& r : results) n += r.errors;
  return n;
}

inline nlohmann::json checklist_to_json(const std::vector<ChecklistResult>& results) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : results) {
    out.push_back({{"name", r.name},
                   {"kind", std::string(test_kind_name(r.kind))},
                   {"applicable", r.applicable},
                   {"errors", r.errors},
                   {"error_rate", r.error_rate()}});
  }
  return out;
}

// The corpus followed by every generated case: INV cases keep the original's
// stored label, MFT cases carry their expected label.
inline std::vector<LabeledText> augment_corpus(const std::vector<LabeledText>& corpus,
                                               const std::vector<ChecklistTest>& tests,
                                               const Lexicon& lexicon, std::uint64_t seed) {
  const CheckContext ctx{corpus, lexicon};
  std::vector<LabeledText> out = corpus;
  for (std::size_t t = 0; t < tests.size(); ++t) {
    Rng rng = derived_rng(seed, t);
    for (auto& c : tests[t].generate(ctx, rng)) {
      out.push_back({std::move(c.transformed), c.label});
    }
  }
  return out;
}

}  // namespace tagfill
