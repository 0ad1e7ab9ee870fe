#pragma once

// Second pipeline step: produce token lists for the mask slots of a
// template.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tagfill/corpus.hpp"
#include "tagfill/edit_script.hpp"
#include "tagfill/error.hpp"
#include "tagfill/lexicon.hpp"
#include "tagfill/parallel.hpp"
#include "tagfill/plugin.hpp"
#include "tagfill/text.hpp"

namespace tagfill {

using Fills = std::vector<std::vector<std::string>>;

struct FillRequest {
  Template tmpl;
  std::string source_text;
  std::vector<std::string> source_tokens;
  // Source tokens hidden by each slot; gives the generator the original words.
  std::vector<std::vector<std::string>> masked_spans;

  static FillRequest from_tags(std::string source_text, std::vector<std::string> tokens,
                               const TagSequence& tags) {
    auto built = build_template(tokens, tags);
    return {std::move(built.tmpl), std::move(source_text), std::move(tokens),
            std::move(built.masked_spans)};
  }

  std::size_t slot_count() const { return masked_spans.size(); }
};

class Generator {
 public:
  virtual ~Generator() = default;

  virtual Fills fill(const FillRequest& request) const = 0;

  virtual std::vector<Fills> fill_batch(const std::vector<FillRequest>& requests,
                                        std::size_t jobs = 1) const {
    std::vector<Fills> out(requests.size());
    parallel_for(requests.size(), jobs,
                 [&](std::size_t i) { out[i] = fill(requests[i]); });
    return out;
  }
};

// Every slot becomes empty, i.e. masked spans are dropped.
inline Fills fill_delete(const FillRequest& request) {
  return Fills(request.slot_count());
}

// First lexicon key found in a slot's masked span (left to right) supplies
// that slot's fill: its first replacement, tokenized. No key, or a key with
// no replacements, leaves the slot empty.
inline Fills fill_lexicon(const FillRequest& request, const Lexicon& lexicon) {
  Fills fills(request.slot_count());
  for (std::size_t slot = 0; slot < fills.size(); ++slot) {
    for (const auto& token : request.masked_spans[slot]) {
      const auto* replacements = lexicon.replacements(token);
      if (replacements == nullptr) continue;
      if (!replacements->empty()) fills[slot] = tokenize_texts(replacements->front());
      break;
    }
  }
  return fills;
}

class DeleteGenerator : public Generator {
 public:
  Fills fill(const FillRequest& request) const override { return fill_delete(request); }
};

class LexiconGenerator : public Generator {
 public:
  explicit LexiconGenerator(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}
  Fills fill(const FillRequest& request) const override {
    return fill_lexicon(request, lexicon_);
  }

 private:
  Lexicon lexicon_;
};

// Scores a candidate output (filled, tokenized) for hypothesis reranking.
using HypothesisScorer =
    std::function<double(const FillRequest&, const std::vector<std::string>& output_tokens)>;

// JSON-lines plugin. Request: {"id", "template", "source", "masked_spans",
// "input"}; response: {"id", "fills"} where each fill is a token array or a
// string to be tokenized. A response may also carry "hypotheses", a list of
// alternative fill lists; they are only consulted when a reranking scorer is
// installed, in which case the best-scoring hypothesis wins.
class ExternalGenerator : public Generator {
 public:
  ExternalGenerator(PluginChannel channel, GeneratorFormat format = {},
                    HypothesisScorer reranker = nullptr)
      : channel_(std::move(channel)),
        format_(std::move(format)),
        reranker_(std::move(reranker)) {}

  Fills fill(const FillRequest& request) const override {
    return fill_batch({request}).front();
  }

  std::vector<Fills> fill_batch(const std::vector<FillRequest>& requests,
                                std::size_t /*jobs*/ = 1) const override {
    std::vector<nlohmann::json> payload;
    payload.reserve(requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
      const std::string rendered = render_template(requests[i].tmpl);
      payload.push_back({{"id", i},
                         {"template", rendered},
                         {"source", requests[i].source_text},
                         {"masked_spans", requests[i].masked_spans},
                         {"input", generator_input(rendered, requests[i].source_text, format_)}});
    }
    const auto responses = channel_.exchange(payload);
    std::vector<Fills> out;
    out.reserve(requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
      out.push_back(choose(requests[i], responses.at(i)));
    }
    return out;
  }

 private:
  Fills parse_fills(const nlohmann::json& value, const nlohmann::json& response,
                    std::size_t expected) const {
    const std::string where = response_where(channel_, response);
    if (!value.is_array()) fail(ErrorKind::kProtocol, where + ": fills must be an array");
    Fills fills;
    for (const auto& item : value) {
      if (item.is_string()) {
        fills.push_back(tokenize_texts(item.get<std::string>()));
      } else if (item.is_array() &&
                 std::all_of(item.begin(), item.end(), [](const auto& t) { return t.is_string(); })) {
        fills.push_back(item.get<std::vector<std::string>>());
      } else {
        fail(ErrorKind::kProtocol, where + ": a fill must be a string or an array of strings");
      }
    }
    if (fills.size() != expected) {
      fail(ErrorKind::kProtocol, where + ": " + std::to_string(fills.size()) +
                                     " fills for " + std::to_string(expected) + " mask slots");
    }
    return fills;
  }

  Fills choose(const FillRequest& request, const nlohmann::json& response) const {
    const std::size_t slots = request.slot_count();
    const bool has_hypotheses = response.contains("hypotheses");
    if (reranker_ && has_hypotheses) {
      const auto& hyps = response["hypotheses"];
      if (!hyps.is_array() || hyps.empty()) {
        fail(ErrorKind::kProtocol, response_where(channel_, response) +
                                       ": \"hypotheses\" must be a non-empty array");
      }
      std::optional<Fills> best;
      double best_score = 0.0;
      for (const auto& h : hyps) {
        Fills candidate = parse_fills(h, response, slots);
        const double score = reranker_(request, fill_template(request.tmpl, candidate));
        if (!best || score > best_score) {
          best = std::move(candidate);
          best_score = score;
        }
      }
      return *best;
    }
    if (response.contains("fills")) return parse_fills(response["fills"], response, slots);
    if (has_hypotheses && response["hypotheses"].is_array() && !response["hypotheses"].empty()) {
      return parse_fills(response["hypotheses"].front(), response, slots);
    }
    fail(ErrorKind::kProtocol, response_where(channel_, response) + ": missing \"fills\"");
  }

  PluginChannel channel_;
  GeneratorFormat format_;
  HypothesisScorer reranker_;
};

}  // namespace tagfill
