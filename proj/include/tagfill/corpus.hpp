#pragma once

// Parallel and labeled corpora, and the derivation of tagger and generator
// training sets from parallel pairs.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tagfill/edit_script.hpp"
#include "tagfill/error.hpp"
#include "tagfill/io.hpp"
#include "tagfill/parallel.hpp"
#include "tagfill/records.hpp"
#include "tagfill/text.hpp"

namespace tagfill {

struct ParallelPair {
  std::string source;                // toxic side
  std::vector<std::string> targets;  // neutral references, at least one
};

enum class Label { kNeutral = 0, kToxic = 1 };

inline std::string_view label_name(Label label) {
  return label == Label::kToxic ? "toxic" : "neutral";
}

inline std::optional<Label> parse_label(std::string_view name) {
  if (name == "toxic" || name == "1") return Label::kToxic;
  if (name == "neutral" || name == "0") return Label::kNeutral;
  return std::nullopt;
}

struct LabeledText {
  std::string text;
  Label label = Label::kNeutral;
};

// TSV: source, then one or more reference columns. Empty reference cells are
// dropped.
inline std::vector<ParallelPair> parse_parallel(std::string_view content,
                                                std::string_view name,
                                                bool skip_header = false) {
  std::vector<ParallelPair> pairs;
  const auto lines = io::split_lines(content);
  for (std::size_t k = skip_header ? 1 : 0; k < lines.size(); ++k) {
    const std::string where = std::string(name) + ":" + std::to_string(k + 1);
    if (lines[k].empty()) fail(ErrorKind::kFormat, where + ": empty row");
    const auto cells = io::split_tabs(lines[k]);
    if (cells.size() < 2) {
      fail(ErrorKind::kFormat, where + ": expected source and at least one reference column");
    }
    ParallelPair pair;
    pair.source = std::string(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (!cells[c].empty()) pair.targets.emplace_back(cells[c]);
    }
    if (pair.source.empty()) fail(ErrorKind::kFormat, where + ": empty source");
    if (pair.targets.empty()) fail(ErrorKind::kFormat, where + ": no non-empty reference");
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

inline std::vector<ParallelPair> load_parallel(const std::filesystem::path& path,
                                               bool skip_header = false) {
  return parse_parallel(io::read_file(path), path.string(), skip_header);
}

// TSV: text \t label, label in {toxic, neutral} (1/0 also accepted).
inline std::vector<LabeledText> parse_labeled(std::string_view content,
                                              std::string_view name) {
  std::vector<LabeledText> out;
  const auto lines = io::split_lines(content);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::string where = std::string(name) + ":" + std::to_string(k + 1);
    const auto cells = io::split_tabs(lines[k]);
    if (cells.size() != 2) fail(ErrorKind::kFormat, where + ": expected text<TAB>label");
    const auto label = parse_label(cells[1]);
    if (!label) fail(ErrorKind::kFormat, where + ": unknown label \"" + std::string(cells[1]) + "\"");
    if (cells[0].empty()) fail(ErrorKind::kFormat, where + ": empty text");
    out.push_back({std::string(cells[0]), *label});
  }
  return out;
}

inline std::vector<LabeledText> load_labeled(const std::filesystem::path& path) {
  return parse_labeled(io::read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Dataset derivation.

struct TaggerExample {
  std::string source;
  std::string target;
  std::vector<std::string> tokens;
  EditScript script;
  TagSequence tags;
};

struct GeneratorFormat {
  bool template_first = true;
  std::string separator = " [SEP] ";
};

struct GeneratorExample {
  std::string source;
  std::string target;
  Template tmpl;
  std::vector<std::vector<std::string>> fills;
  std::string input;   // rendered template and source joined by the separator
  std::string output;  // "[MASK0] fill0 [MASK1] fill1 ..."
};

inline std::string generator_input(const std::string& rendered_template,
                                   const std::string& source,
                                   const GeneratorFormat& format) {
  return format.template_first ? rendered_template + format.separator + source
                               : source + format.separator + rendered_template;
}

inline std::string generator_output(const std::vector<std::vector<std::string>>& fills) {
  std::string out;
  for (std::size_t slot = 0; slot < fills.size(); ++slot) {
    if (slot > 0) out.push_back(' ');
    out += mask_sentinel(slot);
    const std::string text = detokenize(fills[slot]);
    if (!text.empty()) out += " " + text;
  }
  return out;
}

// One example per pair, aligned against the first reference.
inline TaggerExample derive_tagger_example(const ParallelPair& pair, bool case_fold) {
  TaggerExample ex;
  ex.source = pair.source;
  ex.target = pair.targets.front();
  ex.tokens = tokenize_texts(ex.source);
  ex.script = extract_edits(ex.tokens, tokenize_texts(ex.target), case_fold);
  ex.tags = script_to_tags(ex.script, ex.tokens.size());
  return ex;
}

inline std::vector<TaggerExample> build_tagger_dataset(
    const std::vector<ParallelPair>& pairs, bool case_fold = false,
    std::size_t jobs = 1) {
  std::vector<TaggerExample> out(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    out[i] = derive_tagger_example(pairs[i], case_fold);
  });
  return out;
}

// Templates come from gold tags; pairs without any slot are skipped.
inline std::optional<GeneratorExample> derive_generator_example(
    const TaggerExample& tagged, const GeneratorFormat& format) {
  auto built = build_template(tagged.tokens, tagged.tags);
  if (built.tmpl.slot_count() == 0) return std::nullopt;
  GeneratorExample ex;
  ex.source = tagged.source;
  ex.target = tagged.target;
  ex.fills = gold_fills(tagged.script);
  if (ex.fills.size() != built.tmpl.slot_count()) {
    fail(ErrorKind::kStructural, "gold fills do not match template slots for \"" +
                                     tagged.source + "\"");
  }
  ex.tmpl = std::move(built.tmpl);
  ex.input = generator_input(render_template(ex.tmpl), ex.source, format);
  ex.output = generator_output(ex.fills);
  return ex;
}

inline std::vector<GeneratorExample> build_generator_dataset(
    const std::vector<ParallelPair>& pairs, const GeneratorFormat& format = {},
    bool case_fold = false, std::size_t jobs = 1) {
  const auto tagged = build_tagger_dataset(pairs, case_fold, jobs);
  std::vector<std::optional<GeneratorExample>> slots(tagged.size());
  parallel_for(tagged.size(), jobs, [&](std::size_t i) {
    slots[i] = derive_generator_example(tagged[i], format);
  });
  std::vector<GeneratorExample> out;
  for (auto& slot : slots) {
    if (slot) out.push_back(std::move(*slot));
  }
  return out;
}

inline json template_to_json(const Template& tmpl) {
  json segments = json::array();
  for (const auto& segment : tmpl.segments) {
    if (const auto* literal = std::get_if<Literal>(&segment)) {
      segments.push_back({{"literal", literal->tokens}});
    } else {
      segments.push_back({{"mask", std::get<Mask>(segment).slot}});
    }
  }
  return segments;
}

inline Template template_from_json(const json& segments) {
  if (!segments.is_array()) fail(ErrorKind::kFormat, "template is not an array");
  Template tmpl;
  std::size_t next_slot = 0;
  for (const auto& s : segments) {
    if (s.contains("literal")) {
      tmpl.segments.emplace_back(Literal{s["literal"].get<std::vector<std::string>>()});
    } else if (s.contains("mask")) {
      const auto slot = s["mask"].get<std::size_t>();
      if (slot != next_slot++) fail(ErrorKind::kFormat, "template slots are not consecutive");
      tmpl.segments.emplace_back(Mask{slot});
    } else {
      fail(ErrorKind::kFormat, "unknown template segment");
    }
  }
  return tmpl;
}

inline json tagger_record(const TaggerExample& ex) {
  return edit_record(ex.source, ex.target, ex.tokens, ex.script, ex.tags);
}

inline json generator_record(const TaggerExample& tagged, const GeneratorExample& ex) {
  json record = tagger_record(tagged);
  record["template"] = render_template(ex.tmpl);
  record["segments"] = template_to_json(ex.tmpl);
  record["fills"] = ex.fills;
  record["input"] = ex.input;
  record["output"] = ex.output;
  return record;
}

}  // namespace tagfill
