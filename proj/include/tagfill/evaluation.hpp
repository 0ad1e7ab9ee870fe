#pragma once

// Style-transfer metrics: style accuracy (STA), similarity to the source
// (SIM), fluency (FL) and their per-sample product averaged into J.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "tagfill/error.hpp"
#include "tagfill/io.hpp"
#include "tagfill/toxicity.hpp"
#include "tagfill/utf8.hpp"

namespace tagfill {

// 1 - P(toxic).
inline double sta(const std::string& output, const TextScorer& classifier) {
  return 1.0 - classifier.score(output);
}

// ---------------------------------------------------------------------------
// SIM: character n-gram F-score.

struct ChrfOptions {
  std::size_t max_n = 6;
  double beta = 2.0;
};

namespace detail {

inline std::map<std::u32string, std::size_t> char_ngrams(const std::u32string& chars,
                                                         std::size_t n) {
  std::map<std::u32string, std::size_t> grams;
  for (std::size_t i = 0; i + n <= chars.size(); ++i) ++grams[chars.substr(i, n)];
  return grams;
}

inline std::u32string strip_spaces(std::string_view text) {
  std::u32string out;
  for (char32_t cp : utf8::to_u32(text)) {
    if (!utf8::is_space(cp)) out.push_back(cp);
  }
  return out;
}

}  // namespace detail

// chrF between a reference (the source sentence) and a hypothesis (the
// rewrite). Whitespace is ignored. Precision and recall are averaged over
// the orders 1..max_n at which both strings have at least one n-gram, then
// combined as F-beta (beta > 1 weighs recall of source content). Both empty
// gives 1, exactly one empty gives 0.
inline double chrf(std::string_view reference, std::string_view hypothesis,
                   const ChrfOptions& options = {}) {
  const auto ref = detail::strip_spaces(reference);
  const auto hyp = detail::strip_spaces(hypothesis);
  if (ref.empty() && hyp.empty()) return 1.0;
  if (ref.empty() || hyp.empty()) return 0.0;
  double precision_sum = 0.0;
  double recall_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 1; n <= options.max_n; ++n) {
    if (ref.size() < n || hyp.size() < n) break;
    const auto ref_grams = detail::char_ngrams(ref, n);
    const auto hyp_grams = detail::char_ngrams(hyp, n);
    std::size_t overlap = 0;
    for (const auto& [gram, count] : hyp_grams) {
      const auto it = ref_grams.find(gram);
      if (it != ref_grams.end()) overlap += std::min(count, it->second);
    }
    precision_sum += static_cast<double>(overlap) / static_cast<double>(hyp.size() - n + 1);
    recall_sum += static_cast<double>(overlap) / static_cast<double>(ref.size() - n + 1);
    ++orders;
  }
  const double p = precision_sum / static_cast<double>(orders);
  const double r = recall_sum / static_cast<double>(orders);
  if (p == 0.0 && r == 0.0) return 0.0;
  const double b2 = options.beta * options.beta;
  return (1.0 + b2) * p * r / (b2 * p + r);
}

class SimilarityScorer {
 public:
  virtual ~SimilarityScorer() = default;
  virtual std::vector<double> score_pairs(const std::vector<std::string>& sources,
                                          const std::vector<std::string>& outputs) const = 0;
};

class ChrfSimilarity : public SimilarityScorer {
 public:
  explicit ChrfSimilarity(ChrfOptions options = {}) : options_(options) {}
  std::vector<double> score_pairs(const std::vector<std::string>& sources,
                                  const std::vector<std::string>& outputs) const override {
    std::vector<double> out;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      out.push_back(chrf(sources[i], outputs[i], options_));
    }
    return out;
  }

 private:
  ChrfOptions options_;
};

// Plugin: request {"id", "source", "text"}, response {"id", "score"}.
class ExternalSimilarity : public SimilarityScorer {
 public:
  explicit ExternalSimilarity(PluginChannel channel) : channel_(std::move(channel)) {}
  std::vector<double> score_pairs(const std::vector<std::string>& sources,
                                  const std::vector<std::string>& outputs) const override {
    std::vector<nlohmann::json> requests;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      requests.push_back({{"id", i}, {"source", sources[i]}, {"text", outputs[i]}});
    }
    const auto responses = channel_.exchange(requests);
    std::vector<double> out;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      const auto& r = responses.at(i);
      if (!r.contains("score") || !r["score"].is_number()) {
        fail(ErrorKind::kProtocol, response_where(channel_, r) + ": missing numeric \"score\"");
      }
      out.push_back(std::clamp(r["score"].get<double>(), 0.0, 1.0));
    }
    return out;
  }

 private:
  PluginChannel channel_;
};

inline double sim(const std::string& source, const std::string& output) {
  return chrf(source, output);
}

// ---------------------------------------------------------------------------
// FL: character trigram language model squashed through a logistic.

class CharTrigramLm {
 public:
  // Add-k smoothed trigram model over code points with two start symbols and
  // an end symbol. The logistic is centred two standard deviations below the
  // mean per-character log-probability of the training sentences, with one
  // standard deviation as its scale.
  static CharTrigramLm train(const std::vector<std::string>& corpus, double add_k = 0.1) {
    CharTrigramLm lm;
    lm.add_k_ = add_k;
    for (const auto& line : corpus) {
      const auto seq = wrap(line);
      for (std::size_t i = 2; i < seq.size(); ++i) {
        ++lm.trigrams_[key(seq[i - 2], seq[i - 1], seq[i])];
        ++lm.contexts_[key(seq[i - 2], seq[i - 1], 0)];
        lm.vocabulary_.emplace(seq[i], true);
      }
    }
    if (lm.contexts_.empty()) fail(ErrorKind::kData, "fluency model training corpus is empty");
    lm.trained_ = true;
    std::vector<double> lps;
    for (const auto& line : corpus) {
      if (!line.empty()) lps.push_back(lm.log_prob_per_char(line));
    }
    double mean = 0.0;
    for (double x : lps) mean += x;
    mean /= static_cast<double>(std::max<std::size_t>(1, lps.size()));
    double var = 0.0;
    for (double x : lps) var += (x - mean) * (x - mean);
    var /= static_cast<double>(std::max<std::size_t>(1, lps.size()));
    lm.scale_ = std::max(0.1, std::sqrt(var));
    lm.center_ = mean - 2.0 * lm.scale_;
    return lm;
  }

  bool trained() const { return trained_; }

  // Mean natural-log probability per predicted symbol (characters + end).
  double log_prob_per_char(std::string_view text) const {
    require_trained();
    const auto seq = wrap(text);
    const double v = static_cast<double>(vocabulary_.size() + 1);
    double total = 0.0;
    for (std::size_t i = 2; i < seq.size(); ++i) {
      const auto tri = trigrams_.find(key(seq[i - 2], seq[i - 1], seq[i]));
      const auto ctx = contexts_.find(key(seq[i - 2], seq[i - 1], 0));
      const double c3 = tri == trigrams_.end() ? 0.0 : static_cast<double>(tri->second);
      const double c2 = ctx == contexts_.end() ? 0.0 : static_cast<double>(ctx->second);
      total += std::log((c3 + add_k_) / (c2 + add_k_ * v));
    }
    return total / static_cast<double>(seq.size() - 2);
  }

  double fluency(std::string_view text) const {
    require_trained();
    if (detail::strip_spaces(text).empty()) return 0.0;
    return sigmoid((log_prob_per_char(text) - center_) / scale_);
  }

 private:
  static constexpr char32_t kStart = 0x2;
  static constexpr char32_t kEnd = 0x3;

  static std::u32string wrap(std::string_view text) {
    std::u32string seq{kStart, kStart};
    seq += utf8::to_u32(text);
    seq.push_back(kEnd);
    return seq;
  }

  static std::u32string key(char32_t a, char32_t b, char32_t c) { return {a, b, c}; }

  void require_trained() const {
    if (!trained_) fail(ErrorKind::kData, "fluency model is not trained");
  }

  bool trained_ = false;
  double add_k_ = 0.1;
  double center_ = 0.0;
  double scale_ = 1.0;
  std::unordered_map<std::u32string, std::size_t> trigrams_;
  std::unordered_map<std::u32string, std::size_t> contexts_;
  std::unordered_map<char32_t, bool> vocabulary_;
};

class FluencyScorer : public TextScorer {
 public:
  explicit FluencyScorer(CharTrigramLm lm) : lm_(std::move(lm)) {}
  double score(const std::string& text) const override { return lm_.fluency(text); }

 private:
  CharTrigramLm lm_;
};

inline double fl(const std::string& output, const TextScorer& fluency_scorer) {
  if (detail::strip_spaces(output).empty()) return 0.0;
  return fluency_scorer.score(output);
}

// ---------------------------------------------------------------------------
// Joint score.

struct MetricsReport {
  std::vector<double> sta, sim, fl, joint;
  double mean_sta = 0.0, mean_sim = 0.0, mean_fl = 0.0, j = 0.0;

  nlohmann::json to_json() const {
    return {{"per_sample", {{"sta", sta}, {"sim", sim}, {"fl", fl}, {"j", joint}}},
            {"aggregate", {{"sta", mean_sta}, {"sim", mean_sim}, {"fl", mean_fl}, {"j", j}}},
            {"count", sta.size()}};
  }
};

// J is the mean over samples of sta * sim * fl.
inline MetricsReport joint(std::vector<double> sta_values, std::vector<double> sim_values,
                           std::vector<double> fl_values) {
  const std::size_t n = sta_values.size();
  if (n == 0) fail(ErrorKind::kData, "no samples to aggregate");
  if (sim_values.size() != n || fl_values.size() != n) {
    fail(ErrorKind::kData, "metric vectors differ in length");
  }
  auto check = [](const std::vector<double>& v, const char* name) {
    for (double x : v) {
      if (!(x >= 0.0 && x <= 1.0)) fail(ErrorKind::kData, std::string(name) + " value outside [0, 1]");
    }
  };
  check(sta_values, "sta");
  check(sim_values, "sim");
  check(fl_values, "fl");
  MetricsReport r;
  r.sta = std::move(sta_values);
  r.sim = std::move(sim_values);
  r.fl = std::move(fl_values);
  const double count = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.joint.push_back(r.sta[i] * r.sim[i] * r.fl[i]);
    r.mean_sta += r.sta[i] / count;
    r.mean_sim += r.sim[i] / count;
    r.mean_fl += r.fl[i] / count;
    r.j += r.joint[i] / count;
  }
  return r;
}

struct EvalRow {
  std::string source;
  std::string output;
  std::vector<std::string> references;
};

// TSV: source \t output [\t reference]*.
inline std::vector<EvalRow> parse_eval_rows(std::string_view content, std::string_view name) {
  std::vector<EvalRow> rows;
  const auto lines = io::split_lines(content);
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto cells = io::split_tabs(lines[k]);
    if (cells.size() < 2) {
      fail(ErrorKind::kFormat, std::string(name) + ":" + std::to_string(k + 1) +
                                   ": expected source<TAB>output");
    }
    EvalRow row{std::string(cells[0]), std::string(cells[1]), {}};
    for (std::size_t c = 2; c < cells.size(); ++c) {
      if (!cells[c].empty()) row.references.emplace_back(cells[c]);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline MetricsReport evaluate_transfer(const std::vector<EvalRow>& rows,
                                       const TextScorer& classifier,
                                       const SimilarityScorer& similarity,
                                       const TextScorer& fluency, std::size_t jobs = 1) {
  std::vector<std::string> sources, outputs;
  for (const auto& row : rows) {
    sources.push_back(row.source);
    outputs.push_back(row.output);
  }
  auto toxic = classifier.score_batch(outputs, jobs);
  std::vector<double> sta_values;
  for (double p : toxic) sta_values.push_back(1.0 - p);
  auto sim_values = similarity.score_pairs(sources, outputs);
  auto fl_values = fluency.score_batch(outputs, jobs);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (detail::strip_spaces(outputs[i]).empty()) fl_values[i] = 0.0;
  }
  return joint(std::move(sta_values), std::move(sim_values), std::move(fl_values));
}

}  // namespace tagfill
