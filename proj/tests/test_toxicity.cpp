#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "fixtures.hpp"
#include "tagfill/checklist.hpp"
#include "tagfill/toxicity.hpp"

namespace tagfill {
namespace {

std::string plugin(const std::string& mode) { return std::string(TAGFILL_PLUGIN) + " " + mode; }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

// Pairwise definition: P(toxic score > neutral score) + 0.5 P(tie).
double brute_auc(const std::vector<double>& scores, const std::vector<Label>& labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != Label::kToxic) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != Label::kNeutral) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

bool has_lexicon_word(const std::string& text) {
  const auto lexicon = fixtures::toy_lexicon();
  for (const auto& token : tokenize_texts(text)) {
    if (lexicon.contains(token)) return true;
  }
  return false;
}

TEST(Classifier, ZeroWeightsScoreOneHalf) {
  const ClfScorer scorer(ClfModel::zeros(1024));
  EXPECT_DOUBLE_EQ(scorer.score("anything at all"), 0.5);
  EXPECT_DOUBLE_EQ(scorer.score(""), 0.5);
}

TEST(Classifier, DimensionMustBePowerOfTwo) {
  EXPECT_EQ(kind_of([] { ClfModel::zeros(1000); }), ErrorKind::kData);
  EXPECT_EQ(kind_of([] { ClfModel::zeros(0); }), ErrorKind::kData);
}

TEST(Classifier, TrainingNeedsBothLabels) {
  EXPECT_EQ(kind_of([] { train_clf({}); }), ErrorKind::kData);
  EXPECT_EQ(kind_of([] { train_clf({{"a", Label::kToxic}, {"b", Label::kToxic}}); }),
            ErrorKind::kData);
}

TEST(Classifier, SameSeedSameWeights) {
  const auto corpus = fixtures::marker_corpus(100, 3);
  ClfOptions options;
  options.dimension = 1 << 12;
  options.seed = 17;
  EXPECT_EQ(clf_to_json(train_clf(corpus, options)).dump(),
            clf_to_json(train_clf(corpus, options)).dump());
}

TEST(Classifier, SeparatesMarkerCorpus) {
  const auto train = fixtures::marker_corpus(400, 1);
  const auto test = fixtures::marker_corpus(200, 2);
  ClfOptions options;
  options.seed = 1;
  const ClfScorer scorer(train_clf(train, options));
  EXPECT_GE(evaluate_clf(scorer, train).accuracy, 0.99);
  // Long held-out sentences dilute the single marker, so ranking is tighter
  // than thresholded accuracy.
  const auto report = evaluate_clf(scorer, test);
  EXPECT_GE(report.accuracy, 0.95);
  ASSERT_TRUE(report.auc.has_value());
  EXPECT_GE(*report.auc, 0.99);
}

TEST(Classifier, BatchMatchesSingle) {
  ClfOptions options;
  options.dimension = 1 << 12;
  const ClfScorer scorer(train_clf(fixtures::marker_corpus(60, 4), options));
  std::vector<std::string> texts;
  for (const auto& item : fixtures::marker_corpus(40, 5)) texts.push_back(item.text);
  const auto batch = scorer.score_batch(texts, 4);
  for (std::size_t i = 0; i < texts.size(); ++i) EXPECT_EQ(batch[i], scorer.score(texts[i]));
}

TEST(Classifier, SaveLoadRoundTrip) {
  ClfOptions options;
  options.dimension = 1 << 10;
  options.seed = 8;
  options.epochs = 3;
  const auto model = train_clf(fixtures::marker_corpus(50, 6), options);
  const auto path = std::filesystem::temp_directory_path() /
                    ("tagfill-test-clf-" + std::to_string(::getpid()) + ".json");
  save_clf(model, path, {{"seed", 8}});
  const auto loaded = load_clf(path);
  std::filesystem::remove(path);
  EXPECT_EQ(clf_to_json(loaded).dump(), clf_to_json(model).dump());
  EXPECT_EQ(loaded.seed, 8u);
  EXPECT_EQ(loaded.epochs, 3u);
}

TEST(Classifier, RejectsForeignFiles) {
  EXPECT_EQ(kind_of([] { clf_from_json(nlohmann::json{{"format", "other"}}); }), ErrorKind::kFormat);
  auto j = clf_to_json(ClfModel::zeros(4));
  j["weights"] = nlohmann::json::array({nlohmann::json::array({9, 1.0})});
  EXPECT_EQ(kind_of([&] { clf_from_json(j); }), ErrorKind::kFormat);
}

TEST(RocAuc, MatchesPairwiseDefinition) {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 60);
    std::vector<double> scores;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < n; ++i) {
      scores.push_back(static_cast<double>(uniform_index(rng, 5)) / 4.0);
      labels.push_back(i < 2 ? static_cast<Label>(i) : static_cast<Label>(uniform_index(rng, 2)));
    }
    const auto auc = roc_auc(scores, labels);
    ASSERT_TRUE(auc.has_value());
    EXPECT_NEAR(*auc, brute_auc(scores, labels), 1e-12);
  }
}

TEST(RocAuc, SingleClassIsUndefined) {
  EXPECT_FALSE(roc_auc({0.1, 0.9}, {Label::kToxic, Label::kToxic}).has_value());
  const auto report = evaluate_scores({0.1, 0.2}, {Label::kNeutral, Label::kNeutral});
  EXPECT_TRUE(report.to_json()["auc"].is_null());
}

TEST(RocAuc, CoinFlipsNearOneHalf) {
  Rng rng(5);
  std::vector<double> scores;
  std::vector<Label> labels;
  for (int i = 0; i < 10000; ++i) {
    scores.push_back(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    labels.push_back(static_cast<Label>(uniform_index(rng, 2)));
  }
  EXPECT_NEAR(*roc_auc(scores, labels), 0.5, 0.02);
}

TEST(EvaluateScores, PerfectSeparation) {
  const auto report = evaluate_scores({0.9, 0.8, 0.1, 0.2},
                                      {Label::kToxic, Label::kToxic, Label::kNeutral, Label::kNeutral});
  EXPECT_DOUBLE_EQ(*report.auc, 1.0);
  EXPECT_DOUBLE_EQ(report.accuracy, 1.0);
  EXPECT_DOUBLE_EQ(report.f1, 1.0);
}

TEST(EvaluateScores, ThresholdIsStrict) {
  EXPECT_EQ(predict_label(0.5), Label::kNeutral);
  EXPECT_EQ(predict_label(0.5000001), Label::kToxic);
  const auto report = evaluate_scores({0.5, 0.7}, {Label::kToxic, Label::kToxic});
  EXPECT_DOUBLE_EQ(report.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(report.f1, 2.0 / 3.0);
  EXPECT_EQ(kind_of([] { evaluate_scores({}, {}); }), ErrorKind::kData);
}

TEST(ExternalScorer, ConstantPlugin) {
  const ExternalScorer scorer(PluginChannel::command(plugin("const-scorer 0.25")));
  const auto scores = scorer.score_batch({"a", "b", "c"});
  EXPECT_EQ(scores, (std::vector<double>{0.25, 0.25, 0.25}));
}

TEST(ExternalScorer, OutOfRangeIsProtocolError) {
  const ExternalScorer scorer(PluginChannel::command(plugin("const-scorer 1.5")));
  EXPECT_EQ(kind_of([&] { scorer.score("a"); }), ErrorKind::kProtocol);
}

TEST(Checklist, ElevenTestsInFixedOrder) {
  const auto tests = default_checklist();
  ASSERT_EQ(tests.size(), 11u);
  EXPECT_EQ(tests.front().name, "replace_yo");
  EXPECT_EQ(tests.back().name, "add_toxic_word");
}

TEST(Checklist, ConstantClassifierNeverFailsInvariance) {
  const auto corpus = fixtures::marker_corpus(60, 7);
  const ConstantScorer neutral(0.1);
  const auto results = run_checklist(neutral, corpus, default_checklist(), fixtures::toy_lexicon(), 3);
  for (const auto& r : results) {
    if (r.kind == TestKind::kInvariance) {
      EXPECT_EQ(r.errors, 0u) << r.name;
    }
    if (r.name == "concat_neutral_toxic") {
      EXPECT_GT(r.applicable, 0u);
      EXPECT_DOUBLE_EQ(r.error_rate(), 1.0);
    }
    if (r.name == "concat_neutral_neutral") {
      EXPECT_EQ(r.errors, 0u);
    }
  }
}

TEST(Checklist, LexiconOracleHandlesAddedToxicWords) {
  const auto corpus = fixtures::marker_corpus(60, 8);
  const FunctionScorer oracle([](const std::string& t) { return has_lexicon_word(t) ? 1.0 : 0.0; });
  const auto results = run_checklist(oracle, corpus, default_checklist(), fixtures::toy_lexicon(), 4);
  for (const auto& r : results) {
    if (r.name == "add_toxic_word" || r.name == "concat_neutral_toxic" ||
        r.name == "add_exclamations") {
      EXPECT_GT(r.applicable, 0u) << r.name;
      EXPECT_EQ(r.errors, 0u) << r.name;
    }
    if (r.name == "mask_toxic_chars") {
      EXPECT_EQ(r.error_rate(), 1.0);
    }
  }
}

TEST(Checklist, SeededRunsAreIdentical) {
  const auto corpus = fixtures::marker_corpus(40, 9);
  const FunctionScorer oracle([](const std::string& t) { return has_lexicon_word(t) ? 0.9 : 0.1; });
  const auto a = checklist_to_json(run_checklist(oracle, corpus, default_checklist(), fixtures::toy_lexicon(), 5));
  const auto b = checklist_to_json(run_checklist(oracle, corpus, default_checklist(), fixtures::toy_lexicon(), 5, 4));
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a[0].size(), 5u);
}

TEST(Checklist, EmptyLexiconMakesLexiconTestsInapplicable) {
  const auto corpus = fixtures::marker_corpus(20, 10);
  const auto results = run_checklist(ConstantScorer(0.9), corpus, default_checklist(), Lexicon{}, 1);
  for (const auto& r : results) {
    if (r.name == "add_toxic_word" || r.name == "mask_toxic_chars" || r.name == "typos_in_toxic_words") {
      EXPECT_EQ(r.applicable, 0u);
      EXPECT_DOUBLE_EQ(r.error_rate(), 0.0);
    }
  }
}

TEST(ChecklistTransforms, MaskKeepsFirstAndLastCharacter) {
  Lexicon lexicon;
  lexicon.add("злобарь", {});
  Rng rng(1);
  const auto out = checks::edit_lexicon_words(
      "ну злобарь ты", lexicon, 3,
      [](std::u32string w, Rng&) {
        w[1] = U'*';
        return w;
      },
      rng);
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(*out, "ну з*обарь ты");
  EXPECT_FALSE(checks::edit_lexicon_words("ну ты", lexicon, 3,
                                          [](std::u32string w, Rng&) { return w; }, rng));
}

TEST(ChecklistTransforms, TyposPreserveCharacters) {
  Rng rng(2);
  const std::string text = "абвгдежзийклмнопрстуфхцчшщ";
  const auto typo = checks::add_typos(text, rng);
  auto a = utf8::to_u32(text);
  auto b = utf8::to_u32(typo);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

TEST(Augment, NoTestsLeavesCorpusUnchanged) {
  const auto corpus = fixtures::marker_corpus(30, 11);
  const auto out = augment_corpus(corpus, {}, fixtures::toy_lexicon(), 1);
  ASSERT_EQ(out.size(), corpus.size());
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i].text, corpus[i].text);
}

TEST(Augment, InvarianceTestAddsOneCasePerApplicableText) {
  const auto corpus = fixtures::marker_corpus(30, 12);
  std::vector<ChecklistTest> tests;
  for (auto& t : default_checklist()) {
    if (t.name == "add_exclamations") tests.push_back(t);
  }
  const auto out = augment_corpus(corpus, tests, fixtures::toy_lexicon(), 1);
  ASSERT_EQ(out.size(), 2 * corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    EXPECT_EQ(out[corpus.size() + i].text, corpus[i].text + "!!");
    EXPECT_EQ(out[corpus.size() + i].label, corpus[i].label);
  }
}

}  // namespace
}  // namespace tagfill
