#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tagfill/error.hpp"
#include "tagfill/io.hpp"
#include "tagfill/text.hpp"

namespace tagfill {

// Toxic word list with optional neutral replacements. File format, one entry
// per line: `word[\treplacement]*`. A word without replacements maps to an
// empty list (delete). Blank lines and lines starting with '#' are skipped.
// Lookups are case- and ё-insensitive.
class Lexicon {
 public:
  Lexicon() = default;

  static Lexicon parse(std::string_view content, std::string_view name) {
    Lexicon lex;
    const auto lines = io::split_lines(content);
    for (std::size_t k = 0; k < lines.size(); ++k) {
      const std::string_view line = lines[k];
      if (line.empty() || line.front() == '#') continue;
      const auto cells = io::split_tabs(line);
      if (cells[0].empty()) {
        fail(ErrorKind::kFormat, std::string(name) + ":" + std::to_string(k + 1) +
                                     ": empty lexicon key");
      }
      std::vector<std::string> replacements;
      for (std::size_t c = 1; c < cells.size(); ++c) {
        if (!cells[c].empty()) replacements.emplace_back(cells[c]);
      }
      lex.add(std::string(cells[0]), std::move(replacements));
    }
    return lex;
  }

  static Lexicon load(const std::filesystem::path& path) {
    return parse(io::read_file(path), path.string());
  }

  static Lexicon from_words(const std::vector<std::string>& words) {
    Lexicon lex;
    for (const auto& w : words) lex.add(w, {});
    return lex;
  }

  // The first entry for a key wins.
  void add(const std::string& word, std::vector<std::string> replacements) {
    if (word.empty()) fail(ErrorKind::kData, "empty lexicon key");
    const std::string key = fold_for_match(word);
    if (entries_.emplace(key, std::move(replacements)).second) words_.push_back(word);
  }

  bool contains(std::string_view token) const {
    return entries_.contains(fold_for_match(token));
  }

  const std::vector<std::string>* replacements(std::string_view token) const {
    const auto it = entries_.find(fold_for_match(token));
    return it == entries_.end() ? nullptr : &it->second;
  }

  // Words in file order, original spelling.
  const std::vector<std::string>& words() const { return words_; }
  bool empty() const { return words_.empty(); }
  std::size_t size() const { return words_.size(); }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
  std::vector<std::string> words_;
};

}  // namespace tagfill
