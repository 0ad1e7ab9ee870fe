#pragma once

// File helpers shared by the corpus readers, plugins and the CLI: line
// reading, TSV splitting and JSON-lines with an optional leading metadata
// record.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tagfill/error.hpp"

namespace tagfill::io {

using json = nlohmann::json;

// Key of the metadata record written as the first line of JSON-lines outputs.
inline constexpr std::string_view kMetaKey = "_meta";

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string() + " for reading");
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  auto out = open_output(path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorKind::kIo, "failed writing " + path.string());
}

// Lines without terminators; a trailing CR is stripped. A final empty line
// after the last LF is not reported.
inline std::vector<std::string> split_lines(std::string_view content) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = end + 1;
  }
  return lines;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  return split_lines(read_file(path));
}

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

inline bool is_meta_record(const json& record) {
  return record.is_object() && record.contains(std::string(kMetaKey));
}

struct JsonLine {
  std::size_t line_number;  // 1-based
  json value;
};

// Parses JSON lines, skipping blank lines and metadata records.
inline std::vector<JsonLine> parse_json_lines(std::string_view content,
                                              std::string_view source_name) {
  std::vector<JsonLine> out;
  const auto lines = split_lines(content);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (lines[k].find_first_not_of(" \t") == std::string::npos) continue;
    json value = json::parse(lines[k], nullptr, false);
    if (value.is_discarded()) {
      fail(ErrorKind::kFormat, std::string(source_name) + ":" +
                                   std::to_string(k + 1) + ": malformed JSON");
    }
    if (is_meta_record(value)) continue;
    out.push_back({k + 1, std::move(value)});
  }
  return out;
}

inline std::vector<JsonLine> read_json_lines(const std::filesystem::path& path) {
  return parse_json_lines(read_file(path), path.string());
}

inline std::string dump_line(const json& value) {
  return value.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

}  // namespace tagfill::io
