#pragma once

// Toxicity classifier over hashed character n-grams, scorer plugins, and
// AUC / accuracy / F1 evaluation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tagfill/corpus.hpp"
#include "tagfill/error.hpp"
#include "tagfill/io.hpp"
#include "tagfill/parallel.hpp"
#include "tagfill/plugin.hpp"
#include "tagfill/random.hpp"
#include "tagfill/utf8.hpp"

namespace tagfill {

// ---------------------------------------------------------------------------
// Scorers: anything mapping a text to a probability-like value in [0, 1].

class TextScorer {
 public:
  virtual ~TextScorer() = default;
  virtual double score(const std::string& text) const = 0;

  virtual std::vector<double> score_batch(const std::vector<std::string>& texts,
                                          std::size_t jobs = 1) const {
    std::vector<double> out(texts.size());
    parallel_for(texts.size(), jobs, [&](std::size_t i) { out[i] = score(texts[i]); });
    return out;
  }
};

class ConstantScorer : public TextScorer {
 public:
  explicit ConstantScorer(double value) : value_(value) {}
  double score(const std::string&) const override { return value_; }

 private:
  double value_;
};

class FunctionScorer : public TextScorer {
 public:
  explicit FunctionScorer(std::function<double(const std::string&)> fn) : fn_(std::move(fn)) {}
  double score(const std::string& text) const override { return fn_(text); }

 private:
  std::function<double(const std::string&)> fn_;
};

// JSON-lines plugin: request {"id", "text"}, response {"id", "score"}.
class ExternalScorer : public TextScorer {
 public:
  explicit ExternalScorer(PluginChannel channel) : channel_(std::move(channel)) {}

  double score(const std::string& text) const override { return score_batch({text}).front(); }

  std::vector<double> score_batch(const std::vector<std::string>& texts,
                                  std::size_t /*jobs*/ = 1) const override {
    std::vector<nlohmann::json> requests;
    requests.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
      requests.push_back({{"id", i}, {"text", texts[i]}});
    }
    const auto responses = channel_.exchange(requests);
    std::vector<double> out;
    out.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
      const auto& r = responses.at(i);
      if (!r.contains("score") || !r["score"].is_number()) {
        fail(ErrorKind::kProtocol, response_where(channel_, r) + ": missing numeric \"score\"");
      }
      const double s = r["score"].get<double>();
      if (!(s >= 0.0 && s <= 1.0)) {
        fail(ErrorKind::kProtocol, response_where(channel_, r) + ": score outside [0, 1]");
      }
      out.push_back(s);
    }
    return out;
  }

 private:
  PluginChannel channel_;
};

// ---------------------------------------------------------------------------
// Hashed char n-gram logistic regression.

inline constexpr std::string_view kClfFormat = "tagfill-clf";
inline constexpr int kClfVersion = 1;

struct ClfModel {
  std::vector<double> weights;  // size == dimension, a power of two
  double bias = 0.0;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  std::size_t min_n = 3;
  std::size_t max_n = 5;

  std::size_t dimension() const { return weights.size(); }

  static ClfModel zeros(std::size_t dimension = std::size_t{1} << 18) {
    if (dimension == 0 || (dimension & (dimension - 1)) != 0) {
      fail(ErrorKind::kData, "hash dimension must be a power of two");
    }
    ClfModel m;
    m.weights.assign(dimension, 0.0);
    return m;
  }
};

struct ClfOptions {
  std::size_t epochs = 10;
  std::uint64_t seed = 0;
  double learning_rate = 0.5;
  double l2 = 1e-6;
  std::size_t dimension = std::size_t{1} << 18;
  std::size_t min_n = 3;
  std::size_t max_n = 5;
};

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

using SparseVector = std::vector<std::pair<std::size_t, double>>;

// L2-normalized n-gram counts of the text padded with one space per side.
inline SparseVector clf_features(std::string_view text, std::size_t dimension,
                                 std::size_t min_n, std::size_t max_n) {
  const std::string padded = " " + std::string(text) + " ";
  const auto chars = utf8::chars(padded);
  std::unordered_map<std::size_t, double> counts;
  for (std::size_t n = min_n; n <= max_n; ++n) {
    for (std::size_t i = 0; i + n <= chars.size(); ++i) {
      const char* begin = chars[i].data();
      const char* end = chars[i + n - 1].data() + chars[i + n - 1].size();
      std::string_view gram(begin, static_cast<std::size_t>(end - begin));
      counts[(fnv1a(gram) ^ n) & (dimension - 1)] += 1.0;
    }
  }
  SparseVector features(counts.begin(), counts.end());
  std::sort(features.begin(), features.end());
  double norm = 0.0;
  for (const auto& [_, v] : features) norm += v * v;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (auto& [_, v] : features) v /= norm;
  }
  return features;
}

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double linear_score(const ClfModel& model, const SparseVector& x) {
  double z = model.bias;
  for (const auto& [index, value] : x) z += model.weights[index] * value;
  return z;
}

inline double score(const ClfModel& model, std::string_view text) {
  return sigmoid(linear_score(model, clf_features(text, model.dimension(), model.min_n,
                                                  model.max_n)));
}

// Seeded SGD on logistic loss. Requires both labels.
inline ClfModel train_clf(const std::vector<LabeledText>& corpus, const ClfOptions& options = {}) {
  if (corpus.empty()) fail(ErrorKind::kData, "classifier training set is empty");
  const bool has_toxic = std::any_of(corpus.begin(), corpus.end(),
                                     [](const auto& t) { return t.label == Label::kToxic; });
  const bool has_neutral = std::any_of(corpus.begin(), corpus.end(),
                                       [](const auto& t) { return t.label == Label::kNeutral; });
  if (!has_toxic || !has_neutral) {
    fail(ErrorKind::kData, "classifier training set must contain both toxic and neutral texts");
  }
  ClfModel model = ClfModel::zeros(options.dimension);
  model.seed = options.seed;
  model.epochs = options.epochs;
  model.min_n = options.min_n;
  model.max_n = options.max_n;

  std::vector<SparseVector> features;
  features.reserve(corpus.size());
  for (const auto& item : corpus) {
    features.push_back(clf_features(item.text, model.dimension(), model.min_n, model.max_n));
  }

  Rng rng(options.seed);
  auto order = iota_order(corpus.size());
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    seeded_shuffle(order, rng);
    const double lr = options.learning_rate / (1.0 + 0.1 * static_cast<double>(epoch));
    for (std::size_t k : order) {
      const auto& x = features[k];
      const double y = corpus[k].label == Label::kToxic ? 1.0 : 0.0;
      const double gradient = sigmoid(linear_score(model, x)) - y;
      for (const auto& [index, value] : x) {
        double& w = model.weights[index];
        w -= lr * (gradient * value + options.l2 * w);
      }
      model.bias -= lr * gradient;
    }
  }
  return model;
}

class ClfScorer : public TextScorer {
 public:
  explicit ClfScorer(ClfModel model) : model_(std::move(model)) {}
  double score(const std::string& text) const override { return tagfill::score(model_, text); }
  const ClfModel& model() const { return model_; }

 private:
  ClfModel model_;
};

// Only non-zero weights are stored: {"index": weight}.
inline nlohmann::json clf_to_json(const ClfModel& model) {
  nlohmann::json weights = nlohmann::json::array();
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    if (model.weights[i] != 0.0) weights.push_back({i, model.weights[i]});
  }
  return {{"format", kClfFormat},     {"version", kClfVersion}, {"seed", model.seed},
          {"epochs", model.epochs},   {"min_n", model.min_n},   {"max_n", model.max_n},
          {"dimension", model.dimension()}, {"bias", model.bias}, {"weights", std::move(weights)}};
}

inline ClfModel clf_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != kClfFormat) {
    fail(ErrorKind::kFormat, "not a classifier model file");
  }
  if (j.value("version", 0) != kClfVersion) fail(ErrorKind::kFormat, "unsupported classifier version");
  try {
    ClfModel model = ClfModel::zeros(j.at("dimension").get<std::size_t>());
    model.seed = j.at("seed").get<std::uint64_t>();
    model.epochs = j.at("epochs").get<std::size_t>();
    model.min_n = j.at("min_n").get<std::size_t>();
    model.max_n = j.at("max_n").get<std::size_t>();
    model.bias = j.at("bias").get<double>();
    for (const auto& entry : j.at("weights")) {
      const auto index = entry.at(0).get<std::size_t>();
      if (index >= model.dimension()) fail(ErrorKind::kFormat, "weight index out of range");
      model.weights[index] = entry.at(1).get<double>();
    }
    if (!std::isfinite(model.bias) ||
        !std::all_of(model.weights.begin(), model.weights.end(),
                     [](double w) { return std::isfinite(w); })) {
      fail(ErrorKind::kFormat, "classifier has non-finite weights");
    }
    if (model.min_n == 0 || model.min_n > model.max_n) {
      fail(ErrorKind::kFormat, "invalid n-gram range");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, std::string("bad classifier model: ") + e.what());
  }
}

inline void save_clf(const ClfModel& model, const std::filesystem::path& path,
                     const nlohmann::json& meta = nullptr) {
  auto j = clf_to_json(model);
  if (!meta.is_null()) j[std::string(io::kMetaKey)] = meta;
  io::write_file(path, j.dump() + "\n");
}

inline ClfModel load_clf(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(io::read_file(path), nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::kFormat, path.string() + ": malformed JSON");
  return clf_from_json(j);
}

// ---------------------------------------------------------------------------
// Evaluation.

inline constexpr double kDecisionThreshold = 0.5;

inline Label predict_label(double toxic_probability) {
  return toxic_probability > kDecisionThreshold ? Label::kToxic : Label::kNeutral;
}

struct ClfReport {
  std::optional<double> auc;  // undefined for single-class test sets
  double accuracy = 0.0;
  double f1 = 0.0;

  nlohmann::json to_json() const {
    return {{"auc", auc ? nlohmann::json(*auc) : nlohmann::json(nullptr)},
            {"accuracy", accuracy},
            {"f1", f1}};
  }
};

// Probability that a random toxic sample outscores a random neutral one,
// ties counting one half; computed from midranks.
inline std::optional<double> roc_auc(const std::vector<double>& scores,
                                     const std::vector<Label>& labels) {
  const std::size_t n = scores.size();
  std::size_t positives = 0;
  for (Label l : labels) positives += l == Label::kToxic ? 1 : 0;
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;

  auto order = iota_order(n);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1..j share the midrank.
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == Label::kToxic) positive_rank_sum += midrank;
    }
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double q = static_cast<double>(negatives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

inline ClfReport evaluate_scores(const std::vector<double>& scores,
                                 const std::vector<Label>& labels) {
  if (scores.size() != labels.size()) fail(ErrorKind::kData, "scores and labels differ in length");
  if (scores.empty()) fail(ErrorKind::kData, "empty test set");
  ClfReport report;
  report.auc = roc_auc(scores, labels);
  std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const Label predicted = predict_label(scores[i]);
    if (predicted == labels[i]) ++correct;
    if (predicted == Label::kToxic && labels[i] == Label::kToxic) ++tp;
    if (predicted == Label::kToxic && labels[i] == Label::kNeutral) ++fp;
    if (predicted == Label::kNeutral && labels[i] == Label::kToxic) ++fn;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(scores.size());
  const std::size_t denominator = 2 * tp + fp + fn;
  report.f1 = denominator == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denominator);
  return report;
}

inline ClfReport evaluate_clf(const TextScorer& scorer, const std::vector<LabeledText>& test_set,
                              std::size_t jobs = 1) {
  std::vector<std::string> texts;
  std::vector<Label> labels;
  for (const auto& item : test_set) {
    texts.push_back(item.text);
    labels.push_back(item.label);
  }
  return evaluate_scores(scorer.score_batch(texts, jobs), labels);
}

}  // namespace tagfill
