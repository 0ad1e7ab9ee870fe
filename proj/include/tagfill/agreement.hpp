#pragma once

// Crowd annotation aggregation: majority vote per sample, average pairwise
// agreement and Krippendorff's alpha for nominal answers.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tagfill/error.hpp"
#include "tagfill/io.hpp"

namespace tagfill {

struct AnnotationRecord {
  std::string sample_id;
  std::string worker_id;
  int answer = 0;
};

// TSV: sample_id \t worker_id \t answer (integer). (sample, worker) pairs
// must be unique.
inline std::vector<AnnotationRecord> parse_annotations(std::string_view content,
                                                       std::string_view name) {
  std::vector<AnnotationRecord> records;
  std::set<std::pair<std::string, std::string>> seen;
  const auto lines = io::split_lines(content);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const std::string where = std::string(name) + ":" + std::to_string(k + 1);
    const auto cells = io::split_tabs(lines[k]);
    if (cells.size() != 3) fail(ErrorKind::kFormat, where + ": expected sample<TAB>worker<TAB>answer");
    AnnotationRecord r{std::string(cells[0]), std::string(cells[1]), 0};
    try {
      std::size_t used = 0;
      r.answer = std::stoi(std::string(cells[2]), &used);
      if (used != cells[2].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      fail(ErrorKind::kFormat, where + ": answer must be an integer");
    }
    if (!seen.emplace(r.sample_id, r.worker_id).second) {
      fail(ErrorKind::kFormat, where + ": duplicate (sample, worker) pair");
    }
    records.push_back(std::move(r));
  }
  return records;
}

// Answers per sample, samples in order of first appearance.
inline std::vector<std::pair<std::string, std::vector<int>>> group_by_sample(
    const std::vector<AnnotationRecord>& records) {
  std::vector<std::pair<std::string, std::vector<int>>> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& r : records) {
    auto [it, inserted] = index.emplace(r.sample_id, groups.size());
    if (inserted) groups.push_back({r.sample_id, {}});
    groups[it->second].second.push_back(r.answer);
  }
  return groups;
}

// Strict majority of a binary answer list; an even count is rejected so a
// tie can never occur.
inline int majority_vote(const std::vector<int>& answers, std::string_view sample_id = "") {
  if (answers.empty() || answers.size() % 2 == 0) {
    fail(ErrorKind::kData, "sample \"" + std::string(sample_id) + "\" has " +
                               std::to_string(answers.size()) +
                               " answers; majority vote needs an odd count");
  }
  std::size_t ones = 0;
  for (int a : answers) {
    if (a != 0 && a != 1) {
      fail(ErrorKind::kData, "sample \"" + std::string(sample_id) + "\" has a non-binary answer");
    }
    ones += a == 1 ? 1 : 0;
  }
  return 2 * ones > answers.size() ? 1 : 0;
}

inline std::vector<std::pair<std::string, int>> majority_vote(
    const std::vector<AnnotationRecord>& records) {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& [sample, answers] : group_by_sample(records)) {
    out.emplace_back(sample, majority_vote(answers, sample));
  }
  return out;
}

struct AgreementReport {
  double average_agreement = 0.0;  // mean over samples of agreeing pair share
  double alpha = 1.0;
  bool degenerate = false;         // expected disagreement was zero
  std::size_t pairable_values = 0;

  nlohmann::json to_json() const {
    return {{"average_agreement", average_agreement},
            {"alpha", alpha},
            {"degenerate", degenerate},
            {"pairable_values", pairable_values}};
  }
};

// Nominal Krippendorff's alpha via the coincidence matrix. Samples with a
// single answer are not pairable and are ignored, which also covers missing
// (sample, worker) cells.
inline AgreementReport krippendorff_alpha(const std::vector<AnnotationRecord>& records) {
  const auto groups = group_by_sample(records);
  std::map<std::pair<int, int>, double> coincidence;
  std::map<int, double> marginals;
  double agreement_sum = 0.0;
  std::size_t pairable_units = 0;
  for (const auto& [_, answers] : groups) {
    const std::size_t m = answers.size();
    if (m < 2) continue;
    ++pairable_units;
    std::size_t agreeing = 0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        if (a == b) continue;
        coincidence[{answers[a], answers[b]}] += 1.0 / static_cast<double>(m - 1);
        if (answers[a] == answers[b]) ++agreeing;
      }
    }
    agreement_sum += static_cast<double>(agreeing) / static_cast<double>(m * (m - 1));
  }
  if (pairable_units < 2) {
    fail(ErrorKind::kData, "agreement needs at least two samples with two or more answers");
  }
  double n = 0.0;
  double observed = 0.0;
  for (const auto& [cell, count] : coincidence) {
    marginals[cell.first] += count;
    n += count;
    if (cell.first != cell.second) observed += count;
  }
  double expected = 0.0;
  for (const auto& [c, nc] : marginals) {
    for (const auto& [k, nk] : marginals) {
      if (c != k) expected += nc * nk;
    }
  }
  AgreementReport report;
  report.average_agreement = agreement_sum / static_cast<double>(pairable_units);
  report.pairable_values = static_cast<std::size_t>(n + 0.5);
  if (expected == 0.0) {
    report.alpha = 1.0;
    report.degenerate = true;
    return report;
  }
  report.alpha = 1.0 - (n - 1.0) * observed / expected;
  return report;
}

}  // namespace tagfill
