#pragma once

// Token-level edit scripts between parallel sentences, the coarse tag
// sequences derived from them, and mask templates built from tags.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tagfill/error.hpp"
#include "tagfill/text.hpp"

namespace tagfill {

enum class EditKind { kKeep, kDelete, kReplace, kInsert };

// Per-token tag. Insertions live in TagSequence::gap_insert instead.
enum class Tag { kKeep = 0, kDelete = 1, kReplace = 2 };

inline constexpr std::size_t kTagCount = 3;

inline std::string_view edit_kind_name(EditKind kind) {
  switch (kind) {
    case EditKind::kKeep: return "KEEP";
    case EditKind::kDelete: return "DELETE";
    case EditKind::kReplace: return "REPLACE";
    case EditKind::kInsert: return "INSERT";
  }
  return "?";
}

inline std::optional<EditKind> parse_edit_kind(std::string_view name) {
  if (name == "KEEP") return EditKind::kKeep;
  if (name == "DELETE") return EditKind::kDelete;
  if (name == "REPLACE") return EditKind::kReplace;
  if (name == "INSERT") return EditKind::kInsert;
  return std::nullopt;
}

inline std::string_view tag_name(Tag tag) {
  return edit_kind_name(static_cast<EditKind>(tag));
}

inline std::optional<Tag> parse_tag(std::string_view name) {
  if (name == "KEEP") return Tag::kKeep;
  if (name == "DELETE") return Tag::kDelete;
  if (name == "REPLACE") return Tag::kReplace;
  return std::nullopt;
}

struct EditOp {
  EditKind kind = EditKind::kKeep;
  // Half-open source token range; zero-width at the anchor gap for INSERT.
  std::size_t src_start = 0;
  std::size_t src_end = 0;
  std::vector<std::string> replacement;

  bool operator==(const EditOp&) const = default;
};

struct EditScript {
  std::vector<EditOp> ops;

  bool operator==(const EditScript&) const = default;
};

struct TagSequence {
  std::vector<Tag> token_tags;
  // gap_insert[i] marks an insertion before token i; the last entry is the
  // end of the sentence. Always token_tags.size() + 1 long.
  std::vector<bool> gap_insert;

  static TagSequence all_keep(std::size_t n) {
    return {std::vector<Tag>(n, Tag::kKeep), std::vector<bool>(n + 1, false)};
  }

  std::size_t size() const { return token_tags.size(); }
  bool valid_for(std::size_t n) const {
    return token_tags.size() == n && gap_insert.size() == n + 1;
  }
  bool has_replace_or_insert() const {
    return std::find(token_tags.begin(), token_tags.end(), Tag::kReplace) !=
               token_tags.end() ||
           std::find(gap_insert.begin(), gap_insert.end(), true) !=
               gap_insert.end();
  }

  bool operator==(const TagSequence&) const = default;
};

struct Literal {
  std::vector<std::string> tokens;
  bool operator==(const Literal&) const = default;
};

struct Mask {
  std::size_t slot = 0;
  bool operator==(const Mask&) const = default;
};

using Segment = std::variant<Literal, Mask>;

struct Template {
  std::vector<Segment> segments;

  std::size_t slot_count() const {
    return static_cast<std::size_t>(
        std::count_if(segments.begin(), segments.end(), [](const Segment& s) {
          return std::holds_alternative<Mask>(s);
        }));
  }

  bool operator==(const Template&) const = default;
};

// ---------------------------------------------------------------------------
// Script validation and cost.

inline void validate_script(const EditScript& script, std::size_t source_size) {
  std::size_t cursor = 0;
  const EditOp* previous = nullptr;
  for (std::size_t k = 0; k < script.ops.size(); ++k) {
    const EditOp& op = script.ops[k];
    const std::string where = "edit op " + std::to_string(k) + " (" +
                              std::string(edit_kind_name(op.kind)) + ")";
    if (op.src_start != cursor) {
      fail(ErrorKind::kStructural, where + " starts at " +
                                       std::to_string(op.src_start) +
                                       ", expected " + std::to_string(cursor));
    }
    if (op.src_end < op.src_start || op.src_end > source_size) {
      fail(ErrorKind::kStructural, where + " has an invalid source range");
    }
    const bool zero_width = op.src_start == op.src_end;
    if ((op.kind == EditKind::kInsert) != zero_width) {
      fail(ErrorKind::kStructural,
           where + (zero_width ? " is empty" : " must be zero-width"));
    }
    const bool needs_text =
        op.kind == EditKind::kReplace || op.kind == EditKind::kInsert;
    if (needs_text == op.replacement.empty()) {
      fail(ErrorKind::kStructural,
           where + (needs_text ? " lacks replacement tokens"
                               : " must not carry replacement tokens"));
    }
    if (previous != nullptr && previous->kind == op.kind) {
      fail(ErrorKind::kStructural, where + " repeats the previous op kind");
    }
    cursor = op.src_end;
    previous = &op;
  }
  if (cursor != source_size) {
    fail(ErrorKind::kStructural,
         "edit script covers " + std::to_string(cursor) + " of " +
             std::to_string(source_size) + " source tokens");
  }
}

// Unit-cost Levenshtein cost of a canonical script. A REPLACE span of k
// source and l target tokens costs max(k, l): min(k, l) substitutions plus
// the surplus as deletions or insertions.
inline std::size_t script_cost(const EditScript& script) {
  std::size_t cost = 0;
  for (const auto& op : script.ops) {
    const std::size_t k = op.src_end - op.src_start;
    const std::size_t l = op.replacement.size();
    switch (op.kind) {
      case EditKind::kKeep: break;
      case EditKind::kDelete: cost += k; break;
      case EditKind::kInsert: cost += l; break;
      case EditKind::kReplace: cost += std::max(k, l); break;
    }
  }
  return cost;
}

// ---------------------------------------------------------------------------
// Alignment.

namespace detail {

enum class Step : std::uint8_t { kMatch, kSubstitute, kDelete, kInsert };

// Suffix-distance table: dist[i][j] is the edit distance between
// source[i..] and target[j..]. Tracing it forward from (0, 0) with the
// preference match > substitute > delete > insert yields the leftmost
// canonical alignment.
inline std::vector<Step> align(const std::vector<std::string>& source,
                               const std::vector<std::string>& target) {
  const std::size_t n = source.size();
  const std::size_t m = target.size();
  const std::size_t width = m + 1;
  std::vector<std::uint32_t> dist((n + 1) * width);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& {
    return dist[i * width + j];
  };
  for (std::size_t j = 0; j <= m; ++j) at(n, j) = static_cast<std::uint32_t>(m - j);
  for (std::size_t i = n; i-- > 0;) {
    at(i, m) = static_cast<std::uint32_t>(n - i);
    for (std::size_t j = m; j-- > 0;) {
      const std::uint32_t diag = at(i + 1, j + 1) + (source[i] == target[j] ? 0 : 1);
      at(i, j) = std::min({diag, at(i + 1, j) + 1, at(i, j + 1) + 1});
    }
  }

  std::vector<Step> steps;
  steps.reserve(n + m);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n || j < m) {
    const std::uint32_t here = at(i, j);
    if (i < n && j < m && source[i] == target[j] && here == at(i + 1, j + 1)) {
      steps.push_back(Step::kMatch);
      ++i, ++j;
    } else if (i < n && j < m && here == at(i + 1, j + 1) + 1) {
      steps.push_back(Step::kSubstitute);
      ++i, ++j;
    } else if (i < n && here == at(i + 1, j) + 1) {
      steps.push_back(Step::kDelete);
      ++i;
    } else {
      steps.push_back(Step::kInsert);
      ++j;
    }
  }
  return steps;
}

}  // namespace detail

// Minimal unit-cost edit script from source to target tokens. Runs of
// non-matching steps between two kept tokens become a single op: DELETE if
// they only consume source tokens, INSERT if they only produce target tokens,
// REPLACE otherwise (so a delete followed by an insert is a replacement).
inline EditScript extract_edits(const std::vector<std::string>& source,
                                const std::vector<std::string>& target,
                                bool case_fold = false) {
  std::vector<detail::Step> steps;
  if (case_fold) {
    std::vector<std::string> folded_source;
    std::vector<std::string> folded_target;
    for (const auto& s : source) folded_source.push_back(fold_for_match(s));
    for (const auto& t : target) folded_target.push_back(fold_for_match(t));
    steps = detail::align(folded_source, folded_target);
  } else {
    steps = detail::align(source, target);
  }

  EditScript script;
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
  while (k < steps.size()) {
    if (steps[k] == detail::Step::kMatch) {
      const std::size_t start = i;
      while (k < steps.size() && steps[k] == detail::Step::kMatch) ++k, ++i, ++j;
      script.ops.push_back({EditKind::kKeep, start, i, {}});
      continue;
    }
    const std::size_t src_start = i;
    const std::size_t tgt_start = j;
    while (k < steps.size() && steps[k] != detail::Step::kMatch) {
      switch (steps[k]) {
        case detail::Step::kSubstitute: ++i, ++j; break;
        case detail::Step::kDelete: ++i; break;
        case detail::Step::kInsert: ++j; break;
        case detail::Step::kMatch: break;
      }
      ++k;
    }
    std::vector<std::string> produced(target.begin() + static_cast<std::ptrdiff_t>(tgt_start),
                                      target.begin() + static_cast<std::ptrdiff_t>(j));
    EditKind kind = EditKind::kReplace;
    if (produced.empty()) {
      kind = EditKind::kDelete;
    } else if (i == src_start) {
      kind = EditKind::kInsert;
    }
    script.ops.push_back({kind, src_start, i, std::move(produced)});
  }
  return script;
}

inline EditScript extract_edits(const std::vector<Token>& source,
                                const std::vector<Token>& target,
                                bool case_fold = false) {
  return extract_edits(token_texts(source), token_texts(target), case_fold);
}

inline std::vector<std::string> apply_script(
    const std::vector<std::string>& source, const EditScript& script) {
  validate_script(script, source.size());
  std::vector<std::string> out;
  for (const auto& op : script.ops) {
    switch (op.kind) {
      case EditKind::kKeep:
        out.insert(out.end(), source.begin() + static_cast<std::ptrdiff_t>(op.src_start),
                   source.begin() + static_cast<std::ptrdiff_t>(op.src_end));
        break;
      case EditKind::kDelete:
        break;
      case EditKind::kReplace:
      case EditKind::kInsert:
        out.insert(out.end(), op.replacement.begin(), op.replacement.end());
        break;
    }
  }
  return out;
}

inline std::vector<std::string> apply_script(const std::vector<Token>& source,
                                             const EditScript& script) {
  return apply_script(token_texts(source), script);
}

// Coarse tags; replacement strings are dropped.
inline TagSequence script_to_tags(const EditScript& script,
                                  std::size_t source_size) {
  validate_script(script, source_size);
  TagSequence tags = TagSequence::all_keep(source_size);
  for (const auto& op : script.ops) {
    if (op.kind == EditKind::kInsert) {
      tags.gap_insert[op.src_start] = true;
      continue;
    }
    const Tag tag = op.kind == EditKind::kDelete    ? Tag::kDelete
                    : op.kind == EditKind::kReplace ? Tag::kReplace
                                                    : Tag::kKeep;
    std::fill(tags.token_tags.begin() + static_cast<std::ptrdiff_t>(op.src_start),
              tags.token_tags.begin() + static_cast<std::ptrdiff_t>(op.src_end), tag);
  }
  return tags;
}

inline TagSequence script_to_tags(const EditScript& script) {
  const std::size_t n = script.ops.empty() ? 0 : script.ops.back().src_end;
  return script_to_tags(script, n);
}

// Replacement token lists of REPLACE and INSERT ops, in slot order. For a
// canonical script these line up one-to-one with the template's mask slots.
inline std::vector<std::vector<std::string>> gold_fills(const EditScript& script) {
  std::vector<std::vector<std::string>> fills;
  for (const auto& op : script.ops) {
    if (op.kind == EditKind::kReplace || op.kind == EditKind::kInsert) {
      fills.push_back(op.replacement);
    }
  }
  return fills;
}

// ---------------------------------------------------------------------------
// Templates.

struct MaskedTemplate {
  Template tmpl;
  // Source tokens hidden behind each slot (empty for pure insertions).
  std::vector<std::vector<std::string>> masked_spans;
};

// KEEP runs become literals, DELETE tokens vanish, every maximal REPLACE run
// becomes one slot, and every insertion gap becomes a slot unless it touches
// a REPLACE run, in which case it joins that run's slot.
inline MaskedTemplate build_template(const std::vector<std::string>& source,
                                     const TagSequence& tags) {
  const std::size_t n = source.size();
  if (!tags.valid_for(n)) {
    fail(ErrorKind::kProtocol,
         "tag sequence has " + std::to_string(tags.token_tags.size()) +
             " tags and " + std::to_string(tags.gap_insert.size()) +
             " gaps for " + std::to_string(n) + " tokens");
  }
  MaskedTemplate out;
  auto& segments = out.tmpl.segments;
  bool mask_open = false;
  auto open_mask = [&] {
    if (mask_open) return;
    segments.emplace_back(Mask{out.masked_spans.size()});
    out.masked_spans.emplace_back();
    mask_open = true;
  };
  for (std::size_t i = 0; i <= n; ++i) {
    if (tags.gap_insert[i]) open_mask();
    if (i == n) break;
    switch (tags.token_tags[i]) {
      case Tag::kKeep:
        mask_open = false;
        if (segments.empty() || !std::holds_alternative<Literal>(segments.back())) {
          segments.emplace_back(Literal{});
        }
        std::get<Literal>(segments.back()).tokens.push_back(source[i]);
        break;
      case Tag::kDelete:
        mask_open = false;
        break;
      case Tag::kReplace:
        open_mask();
        out.masked_spans.back().push_back(source[i]);
        break;
    }
  }
  return out;
}

inline Template tags_to_template(const std::vector<std::string>& source,
                                 const TagSequence& tags) {
  return build_template(source, tags).tmpl;
}

inline Template tags_to_template(const std::vector<Token>& source,
                                 const TagSequence& tags) {
  return build_template(token_texts(source), tags).tmpl;
}

inline std::string mask_sentinel(std::size_t slot) {
  return "[MASK" + std::to_string(slot) + "]";
}

// Flat rendering with [MASKi] sentinels, e.g. "какие же эти люди [MASK0]!".
inline std::string render_template(const Template& tmpl) {
  std::vector<std::string> pieces;
  for (const auto& segment : tmpl.segments) {
    if (const auto* literal = std::get_if<Literal>(&segment)) {
      pieces.insert(pieces.end(), literal->tokens.begin(), literal->tokens.end());
    } else {
      pieces.push_back(mask_sentinel(std::get<Mask>(segment).slot));
    }
  }
  return detokenize(pieces);
}

inline std::vector<std::string> fill_template(
    const Template& tmpl, const std::vector<std::vector<std::string>>& fills) {
  const std::size_t slots = tmpl.slot_count();
  if (fills.size() != slots) {
    fail(ErrorKind::kProtocol, "generator returned " +
                                   std::to_string(fills.size()) +
                                   " fills for " + std::to_string(slots) +
                                   " mask slots");
  }
  std::vector<std::string> out;
  for (const auto& segment : tmpl.segments) {
    if (const auto* literal = std::get_if<Literal>(&segment)) {
      out.insert(out.end(), literal->tokens.begin(), literal->tokens.end());
    } else {
      const auto& fill = fills[std::get<Mask>(segment).slot];
      out.insert(out.end(), fill.begin(), fill.end());
    }
  }
  return out;
}

}  // namespace tagfill
