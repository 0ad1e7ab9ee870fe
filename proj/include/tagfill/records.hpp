#pragma once

// JSON-lines record schema for edit scripts and tag sequences:
//   {"source": str, "target": str, "tokens": [str],
//    "tags": ["KEEP"|"DELETE"|"REPLACE"], "gaps": [0|1] (tokens + 1),
//    "ops": [{"kind": str, "src_start": int, "src_end": int, "repl": [str]}]}

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tagfill/edit_script.hpp"
#include "tagfill/error.hpp"

namespace tagfill {

using json = nlohmann::json;

inline json tags_to_json(const TagSequence& tags) {
  json names = json::array();
  for (Tag t : tags.token_tags) names.push_back(std::string(tag_name(t)));
  json gaps = json::array();
  for (bool g : tags.gap_insert) gaps.push_back(g ? 1 : 0);
  return {{"tags", std::move(names)}, {"gaps", std::move(gaps)}};
}

// Reads "tags" and "gaps" from a record. Throws kFormat on schema errors; a
// missing "gaps" field means no insertions.
inline TagSequence tags_from_json(const json& record) {
  if (!record.is_object() || !record.contains("tags") || !record["tags"].is_array()) {
    fail(ErrorKind::kFormat, "record lacks a \"tags\" array");
  }
  TagSequence out;
  for (const auto& name : record["tags"]) {
    if (!name.is_string()) fail(ErrorKind::kFormat, "tag is not a string");
    const auto tag = parse_tag(name.get<std::string>());
    if (!tag) fail(ErrorKind::kFormat, "unknown tag \"" + name.get<std::string>() + "\"");
    out.token_tags.push_back(*tag);
  }
  if (!record.contains("gaps")) {
    out.gap_insert.assign(out.token_tags.size() + 1, false);
    return out;
  }
  if (!record["gaps"].is_array()) fail(ErrorKind::kFormat, "\"gaps\" is not an array");
  for (const auto& g : record["gaps"]) {
    if (g.is_boolean()) {
      out.gap_insert.push_back(g.get<bool>());
    } else if (g.is_number_integer() && (g.get<int>() == 0 || g.get<int>() == 1)) {
      out.gap_insert.push_back(g.get<int>() == 1);
    } else {
      fail(ErrorKind::kFormat, "gap marker must be 0 or 1");
    }
  }
  return out;
}

inline json script_to_json(const EditScript& script) {
  json ops = json::array();
  for (const auto& op : script.ops) {
    ops.push_back({{"kind", std::string(edit_kind_name(op.kind))},
                   {"src_start", op.src_start},
                   {"src_end", op.src_end},
                   {"repl", op.replacement}});
  }
  return ops;
}

inline EditScript script_from_json(const json& ops) {
  if (!ops.is_array()) fail(ErrorKind::kFormat, "\"ops\" is not an array");
  EditScript script;
  for (const auto& item : ops) {
    if (!item.is_object() || !item.contains("kind") || !item["kind"].is_string()) {
      fail(ErrorKind::kFormat, "edit op lacks a \"kind\"");
    }
    const auto kind = parse_edit_kind(item["kind"].get<std::string>());
    if (!kind) fail(ErrorKind::kFormat, "unknown edit kind");
    EditOp op;
    op.kind = *kind;
    try {
      op.src_start = item.at("src_start").get<std::size_t>();
      op.src_end = item.at("src_end").get<std::size_t>();
      op.replacement = item.value("repl", std::vector<std::string>{});
    } catch (const json::exception& e) {
      fail(ErrorKind::kFormat, std::string("bad edit op: ") + e.what());
    }
    script.ops.push_back(std::move(op));
  }
  return script;
}

inline json edit_record(const std::string& source, const std::string& target,
                        const std::vector<std::string>& tokens,
                        const EditScript& script, const TagSequence& tags) {
  json record = tags_to_json(tags);
  record["source"] = source;
  record["target"] = target;
  record["tokens"] = tokens;
  record["ops"] = script_to_json(script);
  return record;
}

}  // namespace tagfill
