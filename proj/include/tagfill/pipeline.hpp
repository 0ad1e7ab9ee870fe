#pragma once

// tokenize -> tag -> (only if needed) generate -> fill -> detokenize.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tagfill/edit_script.hpp"
#include "tagfill/error.hpp"
#include "tagfill/generator.hpp"
#include "tagfill/io.hpp"
#include "tagfill/tagger.hpp"
#include "tagfill/text.hpp"

namespace tagfill {

struct PipelineResult {
  std::string output;
  std::vector<std::string> output_tokens;
  TagSequence tags;
  Template tmpl;
  bool generator_invoked = false;
  Fills fills;
};

namespace detail {

inline Error annotate(const Error& e, std::size_t id) {
  return Error(e.kind(), "input " + std::to_string(id) + ": " + e.what());
}

}  // namespace detail

// Batch form of detoxify. The generator only sees sentences whose template
// has at least one slot, i.e. whose tags contain a REPLACE or an insertion
// gap; delete-only and keep-only edits are applied here directly.
inline std::vector<PipelineResult> detoxify_all(const std::vector<std::string>& texts,
                                                const Tagger& tagger,
                                                const Generator& generator,
                                                std::size_t jobs = 1) {
  std::vector<Sentence> sentences;
  sentences.reserve(texts.size());
  for (const auto& t : texts) sentences.push_back(Sentence::from_text(t));

  const auto predicted = tagger.predict_batch(sentences, jobs);
  if (predicted.size() != sentences.size()) {
    fail(ErrorKind::kProtocol, "tagger returned " + std::to_string(predicted.size()) +
                                   " results for " + std::to_string(sentences.size()) +
                                   " inputs");
  }

  std::vector<PipelineResult> results(texts.size());
  std::vector<FillRequest> requests;
  std::vector<std::size_t> owners;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    try {
      auto request = FillRequest::from_tags(sentences[i].text, sentences[i].tokens, predicted[i]);
      results[i].tags = predicted[i];
      results[i].tmpl = request.tmpl;
      if (request.slot_count() > 0) {
        results[i].generator_invoked = true;
        requests.push_back(std::move(request));
        owners.push_back(i);
      }
    } catch (const Error& e) {
      throw detail::annotate(e, i);
    }
  }

  std::vector<Fills> generated;
  if (!requests.empty()) generated = generator.fill_batch(requests, jobs);
  if (generated.size() != requests.size()) {
    fail(ErrorKind::kProtocol, "generator returned " + std::to_string(generated.size()) +
                                   " results for " + std::to_string(requests.size()) +
                                   " requests");
  }
  for (std::size_t k = 0; k < owners.size(); ++k) {
    results[owners[k]].fills = std::move(generated[k]);
  }

  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    try {
      r.output_tokens = fill_template(r.tmpl, r.fills);
    } catch (const Error& e) {
      throw detail::annotate(e, i);
    }
    r.output = detokenize(r.output_tokens);
  }
  return results;
}

inline PipelineResult detoxify(const std::string& text, const Tagger& tagger,
                               const Generator& generator) {
  return std::move(detoxify_all({text}, tagger, generator).front());
}

struct BatchSummary {
  std::size_t total = 0;
  std::size_t generator_invoked = 0;
  std::size_t skipped = 0;

  // Fraction of inputs that never reached the generator; undefined when
  // there were no inputs.
  std::optional<double> skip_rate() const {
    if (total == 0) return std::nullopt;
    return static_cast<double>(skipped) / static_cast<double>(total);
  }

  nlohmann::json to_json() const {
    nlohmann::json j = {{"total", total},
                        {"generator_invoked", generator_invoked},
                        {"skipped", skipped}};
    const auto rate = skip_rate();
    j["skip_rate"] = rate ? nlohmann::json(*rate) : nlohmann::json(nullptr);
    return j;
  }
};

inline BatchSummary summarize(const std::vector<PipelineResult>& results) {
  BatchSummary s;
  s.total = results.size();
  for (const auto& r : results) {
    if (r.generator_invoked) ++s.generator_invoked;
  }
  s.skipped = s.total - s.generator_invoked;
  return s;
}

// One sentence per line in, one detoxified sentence per line out, same order.
inline BatchSummary detoxify_batch(const std::filesystem::path& input,
                                   const std::filesystem::path& output,
                                   const Tagger& tagger, const Generator& generator,
                                   std::size_t jobs = 1) {
  const auto lines = io::read_lines(input);
  const auto results = detoxify_all(lines, tagger, generator, jobs);
  auto out = io::open_output(output);
  for (std::size_t i = 0; i < results.size(); ++i) {
    out << results[i].output << '\n';
    if (!out) {
      fail(ErrorKind::kIo, "write to " + output.string() + " failed after " +
                               std::to_string(i) + " of " + std::to_string(results.size()) +
                               " lines; output is partial");
    }
  }
  out.flush();
  if (!out) fail(ErrorKind::kIo, "flushing " + output.string() + " failed; output may be partial");
  return summarize(results);
}

}  // namespace tagfill
