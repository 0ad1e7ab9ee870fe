#pragma once

// First pipeline step: predict coarse edit tags for a tokenized sentence.
//
// Built-in predictors:
//   * SalienceTagger  - toxic/neutral frequency ratio, emits KEEP/DELETE only;
//   * PerceptronTagger - averaged multiclass perceptron trained on tags
//     derived from a parallel corpus;
//   * ExternalTagger  - JSON-lines plugin hosting any other model.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tagfill/corpus.hpp"
#include "tagfill/edit_script.hpp"
#include "tagfill/error.hpp"
#include "tagfill/lexicon.hpp"
#include "tagfill/parallel.hpp"
#include "tagfill/plugin.hpp"
#include "tagfill/random.hpp"
#include "tagfill/records.hpp"
#include "tagfill/text.hpp"
#include "tagfill/utf8.hpp"

namespace tagfill {

struct Sentence {
  std::string text;
  std::vector<std::string> tokens;

  static Sentence from_text(std::string text) {
    auto tokens = tokenize_texts(text);
    return {std::move(text), std::move(tokens)};
  }
};

class Tagger {
 public:
  virtual ~Tagger() = default;

  virtual TagSequence predict(const Sentence& sentence) const = 0;

  // Default batch prediction fans out over `jobs` threads.
  virtual std::vector<TagSequence> predict_batch(const std::vector<Sentence>& sentences,
                                                 std::size_t jobs = 1) const {
    std::vector<TagSequence> out(sentences.size());
    parallel_for(sentences.size(), jobs,
                 [&](std::size_t i) { out[i] = predict(sentences[i]); });
    return out;
  }
};

// ---------------------------------------------------------------------------
// Salience baseline.

class SalienceTable {
 public:
  explicit SalienceTable(double smoothing = 1.0) : smoothing_(smoothing) {
    if (!(smoothing > 0.0)) fail(ErrorKind::kData, "salience smoothing must be positive");
  }

  static SalienceTable from_corpus(const std::vector<LabeledText>& corpus,
                                   double smoothing = 1.0) {
    SalienceTable table(smoothing);
    for (const auto& item : corpus) {
      for (const auto& token : tokenize_texts(item.text)) {
        table.add(token, item.label);
      }
    }
    return table;
  }

  void add(std::string_view token, Label label, std::uint64_t count = 1) {
    auto& counts = counts_[fold_for_match(token)];
    (label == Label::kToxic ? counts.first : counts.second) += count;
  }

  std::uint64_t toxic_count(std::string_view token) const { return lookup(token).first; }
  std::uint64_t neutral_count(std::string_view token) const { return lookup(token).second; }
  double smoothing() const { return smoothing_; }

 private:
  std::pair<std::uint64_t, std::uint64_t> lookup(std::string_view token) const {
    const auto it = counts_.find(fold_for_match(token));
    return it == counts_.end() ? std::pair<std::uint64_t, std::uint64_t>{0, 0} : it->second;
  }

  double smoothing_;
  std::unordered_map<std::string, std::pair<std::uint64_t, std::uint64_t>> counts_;
};

// (toxic + λ) / (neutral + λ)
inline double salience(std::string_view token, const SalienceTable& table) {
  const double lambda = table.smoothing();
  return (static_cast<double>(table.toxic_count(token)) + lambda) /
         (static_cast<double>(table.neutral_count(token)) + lambda);
}

class SalienceTagger : public Tagger {
 public:
  explicit SalienceTagger(SalienceTable table, double threshold = 3.0)
      : table_(std::move(table)), threshold_(threshold) {}

  TagSequence predict(const Sentence& sentence) const override {
    TagSequence tags = TagSequence::all_keep(sentence.tokens.size());
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
      if (salience(sentence.tokens[i], table_) > threshold_) tags.token_tags[i] = Tag::kDelete;
    }
    return tags;
  }

 private:
  SalienceTable table_;
  double threshold_;
};

// ---------------------------------------------------------------------------
// Averaged perceptron.

namespace detail {

// Multiclass perceptron with lazily accumulated weight averages.
template <std::size_t K>
class AveragedPerceptron {
 public:
  using Scores = std::array<double, K>;

  Scores scores(const std::vector<std::string>& features) const {
    Scores out{};
    for (const auto& f : features) {
      const auto it = weights_.find(f);
      if (it == weights_.end()) continue;
      for (std::size_t c = 0; c < K; ++c) out[c] += it->second.weight[c];
    }
    return out;
  }

  std::size_t predict(const std::vector<std::string>& features) const {
    return argmax(scores(features));
  }

  // Updates unless the gold class strictly beats every other class, so a tie
  // (e.g. on unseen features) still counts as a mistake.
  void train(const std::vector<std::string>& features, std::size_t gold) {
    const Scores s = scores(features);
    std::size_t rival = gold == 0 ? 1 : 0;
    for (std::size_t c = 0; c < K; ++c) {
      if (c != gold && s[c] > s[rival]) rival = c;
    }
    if (s[gold] > s[rival]) return;
    for (const auto& f : features) {
      auto& entry = weights_[f];
      bump(entry, gold, 1.0);
      bump(entry, rival, -1.0);
    }
  }

  // Marks the end of one training instance.
  void tick() { ++instances_; }

  std::map<std::string, Scores> averaged() const {
    std::map<std::string, Scores> out;
    if (instances_ == 0) return out;
    const double total = static_cast<double>(instances_);
    for (const auto& [feature, entry] : weights_) {
      Scores avg{};
      bool nonzero = false;
      for (std::size_t c = 0; c < K; ++c) {
        const double sum = entry.total[c] +
                           static_cast<double>(instances_ - entry.stamp[c]) * entry.weight[c];
        avg[c] = sum / total;
        nonzero = nonzero || avg[c] != 0.0;
      }
      if (nonzero) out.emplace(feature, avg);
    }
    return out;
  }

  static std::size_t argmax(const Scores& scores) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < K; ++c) {
      if (scores[c] > scores[best]) best = c;
    }
    return best;
  }

 private:
  struct Entry {
    Scores weight{};
    Scores total{};
    std::array<std::uint64_t, K> stamp{};
  };

  void bump(Entry& entry, std::size_t c, double delta) {
    entry.total[c] += static_cast<double>(instances_ - entry.stamp[c]) * entry.weight[c];
    entry.stamp[c] = instances_;
    entry.weight[c] += delta;
  }

  std::unordered_map<std::string, Entry> weights_;
  std::uint64_t instances_ = 0;
};

inline std::vector<std::string> char_trigrams(std::string_view word) {
  const std::string wrapped = "^" + utf8::lower(word) + "$";
  const auto chars = utf8::chars(wrapped);
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 3 <= chars.size(); ++i) {
    std::string gram;
    for (std::size_t k = i; k < i + 3; ++k) gram.append(chars[k]);
    out.push_back(std::move(gram));
  }
  return out;
}

}  // namespace detail

inline constexpr std::string_view kPerceptronFormat = "tagfill-perceptron";
inline constexpr int kPerceptronVersion = 1;

struct PerceptronModel {
  using TokenWeights = std::map<std::string, std::array<double, kTagCount>>;
  using GapWeights = std::map<std::string, std::array<double, 2>>;

  TokenWeights token_weights;
  GapWeights gap_weights;
  std::vector<std::string> lexicon;
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
};

class PerceptronFeatures {
 public:
  explicit PerceptronFeatures(const std::vector<std::string>& lexicon_words)
      : lexicon_(Lexicon::from_words(lexicon_words)) {}

  std::vector<std::string> token(const std::vector<std::string>& tokens,
                                 std::size_t i) const {
    const std::string& w = tokens[i];
    std::vector<std::string> f;
    f.reserve(20);
    f.push_back("w=" + w);
    f.push_back("lw=" + utf8::lower(w));
    f.push_back("yw=" + fold_yo(w));
    for (auto& gram : detail::char_trigrams(w)) f.push_back("c3=" + gram);
    if (lexicon_.contains(w)) f.push_back("lex");
    f.push_back("p1=" + at(tokens, static_cast<std::ptrdiff_t>(i) - 1));
    f.push_back("p2=" + at(tokens, static_cast<std::ptrdiff_t>(i) - 2));
    f.push_back("n1=" + at(tokens, static_cast<std::ptrdiff_t>(i) + 1));
    f.push_back("n2=" + at(tokens, static_cast<std::ptrdiff_t>(i) + 2));
    if (i == 0) f.push_back("first");
    if (i + 1 == tokens.size()) f.push_back("last");
    return f;
  }

  // Gap g sits between tokens g-1 and g.
  std::vector<std::string> gap(const std::vector<std::string>& tokens,
                               std::size_t g) const {
    const auto gi = static_cast<std::ptrdiff_t>(g);
    const std::string left = at(tokens, gi - 1);
    const std::string right = at(tokens, gi);
    std::vector<std::string> f{"gL=" + left, "gR=" + right,
                               "gLl=" + utf8::lower(left), "gRl=" + utf8::lower(right),
                               "gLR=" + left + "|" + right};
    if (g > 0 && lexicon_.contains(left)) f.push_back("gLlex");
    if (g < tokens.size() && lexicon_.contains(right)) f.push_back("gRlex");
    return f;
  }

 private:
  static std::string at(const std::vector<std::string>& tokens, std::ptrdiff_t i) {
    if (i < 0) return "<s>";
    if (static_cast<std::size_t>(i) >= tokens.size()) return "</s>";
    return tokens[static_cast<std::size_t>(i)];
  }

  Lexicon lexicon_;
};

struct TaggedTokens {
  std::vector<std::string> tokens;
  TagSequence tags;
};

inline PerceptronModel train_perceptron(const std::vector<TaggedTokens>& dataset,
                                        std::size_t epochs, std::uint64_t seed,
                                        std::vector<std::string> lexicon = {}) {
  if (dataset.empty()) fail(ErrorKind::kData, "perceptron training set is empty");
  for (std::size_t k = 0; k < dataset.size(); ++k) {
    if (!dataset[k].tags.valid_for(dataset[k].tokens.size())) {
      fail(ErrorKind::kData, "training example " + std::to_string(k) +
                                 " has mismatched tag lengths");
    }
  }
  const PerceptronFeatures features(lexicon);
  detail::AveragedPerceptron<kTagCount> token_model;
  detail::AveragedPerceptron<2> gap_model;
  Rng rng(seed);
  auto order = iota_order(dataset.size());

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    seeded_shuffle(order, rng);
    for (std::size_t k : order) {
      const auto& ex = dataset[k];
      for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
        const auto f = features.token(ex.tokens, i);
        const auto gold = static_cast<std::size_t>(ex.tags.token_tags[i]);
        token_model.train(f, gold);
        token_model.tick();
      }
      for (std::size_t g = 0; g <= ex.tokens.size(); ++g) {
        const auto f = features.gap(ex.tokens, g);
        const std::size_t gold = ex.tags.gap_insert[g] ? 1 : 0;
        gap_model.train(f, gold);
        gap_model.tick();
      }
    }
  }

  PerceptronModel model;
  model.token_weights = token_model.averaged();
  model.gap_weights = gap_model.averaged();
  model.lexicon = std::move(lexicon);
  model.seed = seed;
  model.epochs = epochs;
  return model;
}

inline std::vector<TaggedTokens> to_tagged_tokens(const std::vector<TaggerExample>& examples) {
  std::vector<TaggedTokens> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back({ex.tokens, ex.tags});
  return out;
}

namespace detail {

template <std::size_t K>
std::size_t score_argmax(const std::map<std::string, std::array<double, K>>& weights,
                         const std::vector<std::string>& features) {
  std::array<double, K> scores{};
  for (const auto& f : features) {
    const auto it = weights.find(f);
    if (it == weights.end()) continue;
    for (std::size_t c = 0; c < K; ++c) scores[c] += it->second[c];
  }
  return AveragedPerceptron<K>::argmax(scores);
}

}  // namespace detail

// Argmax per token and per gap; ties go to KEEP < DELETE < REPLACE and to
// no-insert over insert.
inline TagSequence predict_tags(const PerceptronModel& model,
                                const PerceptronFeatures& features,
                                const std::vector<std::string>& tokens) {
  TagSequence tags = TagSequence::all_keep(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    tags.token_tags[i] =
        static_cast<Tag>(detail::score_argmax(model.token_weights, features.token(tokens, i)));
  }
  for (std::size_t g = 0; g <= tokens.size(); ++g) {
    tags.gap_insert[g] = detail::score_argmax(model.gap_weights, features.gap(tokens, g)) == 1;
  }
  return tags;
}

inline TagSequence predict_tags(const PerceptronModel& model,
                                const std::vector<std::string>& tokens) {
  return predict_tags(model, PerceptronFeatures(model.lexicon), tokens);
}

inline nlohmann::json perceptron_to_json(const PerceptronModel& model) {
  nlohmann::json token_weights = nlohmann::json::object();
  for (const auto& [f, w] : model.token_weights) token_weights[f] = w;
  nlohmann::json gap_weights = nlohmann::json::object();
  for (const auto& [f, w] : model.gap_weights) gap_weights[f] = w;
  return {{"format", kPerceptronFormat},
          {"version", kPerceptronVersion},
          {"seed", model.seed},
          {"epochs", model.epochs},
          {"lexicon", model.lexicon},
          {"token_weights", std::move(token_weights)},
          {"gap_weights", std::move(gap_weights)}};
}

inline PerceptronModel perceptron_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != kPerceptronFormat) {
    fail(ErrorKind::kFormat, "not a perceptron model file");
  }
  if (j.value("version", 0) != kPerceptronVersion) {
    fail(ErrorKind::kFormat, "unsupported perceptron model version");
  }
  PerceptronModel model;
  try {
    model.seed = j.at("seed").get<std::uint64_t>();
    model.epochs = j.at("epochs").get<std::size_t>();
    model.lexicon = j.at("lexicon").get<std::vector<std::string>>();
    for (const auto& [f, w] : j.at("token_weights").items()) {
      model.token_weights[f] = w.get<std::array<double, kTagCount>>();
    }
    for (const auto& [f, w] : j.at("gap_weights").items()) {
      model.gap_weights[f] = w.get<std::array<double, 2>>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, std::string("bad perceptron model: ") + e.what());
  }
  auto check = [](const auto& weights) {
    for (const auto& [f, w] : weights) {
      for (double x : w) {
        if (!std::isfinite(x)) fail(ErrorKind::kFormat, "non-finite weight for " + f);
      }
    }
  };
  check(model.token_weights);
  check(model.gap_weights);
  return model;
}

inline void save_perceptron(const PerceptronModel& model, const std::filesystem::path& path,
                            const nlohmann::json& meta = nullptr) {
  auto j = perceptron_to_json(model);
  if (!meta.is_null()) j[std::string(io::kMetaKey)] = meta;
  io::write_file(path, j.dump(1) + "\n");
}

inline PerceptronModel load_perceptron(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(io::read_file(path), nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::kFormat, path.string() + ": malformed JSON");
  return perceptron_from_json(j);
}

class PerceptronTagger : public Tagger {
 public:
  explicit PerceptronTagger(PerceptronModel model)
      : model_(std::move(model)), features_(model_.lexicon) {}

  TagSequence predict(const Sentence& sentence) const override {
    return predict_tags(model_, features_, sentence.tokens);
  }

  const PerceptronModel& model() const { return model_; }

 private:
  PerceptronModel model_;
  PerceptronFeatures features_;
};

// ---------------------------------------------------------------------------
// External plugin: request {"id", "text", "tokens"}, response {"id", "tags",
// "gaps"} with the edit-record tag schema.

class ExternalTagger : public Tagger {
 public:
  explicit ExternalTagger(PluginChannel channel) : channel_(std::move(channel)) {}

  TagSequence predict(const Sentence& sentence) const override {
    return predict_batch({sentence}).front();
  }

  std::vector<TagSequence> predict_batch(const std::vector<Sentence>& sentences,
                                         std::size_t /*jobs*/ = 1) const override {
    std::vector<nlohmann::json> requests;
    requests.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      requests.push_back({{"id", i}, {"text", sentences[i].text}, {"tokens", sentences[i].tokens}});
    }
    const auto responses = channel_.exchange(requests);
    std::vector<TagSequence> out;
    out.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      const auto& response = responses.at(i);
      TagSequence tags;
      try {
        tags = tags_from_json(response);
      } catch (const Error& e) {
        fail(ErrorKind::kProtocol, response_where(channel_, response) + ": " + e.what());
      }
      if (!tags.valid_for(sentences[i].tokens.size())) {
        fail(ErrorKind::kProtocol,
             response_where(channel_, response) + ": " +
                 std::to_string(tags.token_tags.size()) + " tags and " +
                 std::to_string(tags.gap_insert.size()) + " gaps for " +
                 std::to_string(sentences[i].tokens.size()) + " tokens");
      }
      out.push_back(std::move(tags));
    }
    return out;
  }

 private:
  PluginChannel channel_;
};

}  // namespace tagfill
