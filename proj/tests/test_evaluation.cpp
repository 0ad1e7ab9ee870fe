#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "tagfill/agreement.hpp"
#include "tagfill/evaluation.hpp"

namespace tagfill {
namespace {

using Units = std::vector<std::vector<int>>;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

std::vector<AnnotationRecord> records_from(const Units& units) {
  std::vector<AnnotationRecord> records;
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (std::size_t w = 0; w < units[u].size(); ++w) {
      records.push_back({"s" + std::to_string(u), "w" + std::to_string(w), units[u][w]});
    }
  }
  return records;
}

// Pairwise form: observed disagreement over within-unit ordered pairs
// (weighted 1/(m-1)), expected disagreement over all ordered pairs of
// pairable values.
double alpha_oracle(const Units& units) {
  std::vector<int> values;
  double observed = 0.0;
  for (const auto& u : units) {
    if (u.size() < 2) continue;
    values.insert(values.end(), u.begin(), u.end());
    for (std::size_t a = 0; a < u.size(); ++a) {
      for (std::size_t b = 0; b < u.size(); ++b) {
        if (a != b && u[a] != u[b]) observed += 1.0 / static_cast<double>(u.size() - 1);
      }
    }
  }
  const double n = static_cast<double>(values.size());
  double expected = 0.0;
  for (std::size_t a = 0; a < values.size(); ++a) {
    for (std::size_t b = 0; b < values.size(); ++b) {
      if (a != b && values[a] != values[b]) expected += 1.0;
    }
  }
  return 1.0 - (observed / n) / (expected / (n * (n - 1.0)));
}

TEST(Sta, OneMinusToxicProbability) {
  EXPECT_DOUBLE_EQ(sta("x", ConstantScorer(0.3)), 0.7);
  EXPECT_DOUBLE_EQ(sta("x", ConstantScorer(1.0)), 0.0);
}

TEST(Chrf, IdentityAndEmpty) {
  EXPECT_DOUBLE_EQ(chrf("какие же люди", "какие же люди"), 1.0);
  EXPECT_DOUBLE_EQ(chrf("ab cd", "abcd"), 1.0);
  EXPECT_DOUBLE_EQ(chrf("", ""), 1.0);
  EXPECT_DOUBLE_EQ(chrf("abc", ""), 0.0);
  EXPECT_DOUBLE_EQ(chrf("", "abc"), 0.0);
  EXPECT_DOUBLE_EQ(chrf("abc", "xyz"), 0.0);
}

TEST(Chrf, HandComputedSubstitution) {
  // Orders 1..6 overlap 5/6, 3/5, 1/4, 0, 0, 0 in both directions.
  EXPECT_NEAR(chrf("abcdef", "abcxef"), 101.0 / 360.0, 1e-12);
}

TEST(Chrf, HandComputedRecallWeighting) {
  // Reference "abcd", hypothesis "ab": precision 1, 1; recall 2/4, 1/3.
  const double p = 1.0;
  const double r = (0.5 + 1.0 / 3.0) / 2.0;
  EXPECT_NEAR(chrf("abcd", "ab"), 5.0 * p * r / (4.0 * p + r), 1e-12);
  EXPECT_NEAR(chrf("abcd", "ab", {6, 1.0}), 2.0 * p * r / (p + r), 1e-12);
}

TEST(Chrf, SymmetricAtBetaOne) {
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const auto a = detokenize(fixtures::random_sentence(rng));
    const auto b = detokenize(fixtures::random_sentence(rng));
    EXPECT_NEAR(chrf(a, b, {6, 1.0}), chrf(b, a, {6, 1.0}), 1e-12);
    const double v = chrf(a, b);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Fluency, TrainingTextOutscoresCorruptedText) {
  std::vector<std::string> corpus;
  for (const auto& p : fixtures::parallel_corpus(300, 5)) corpus.push_back(p.source);
  const FluencyScorer scorer(CharTrigramLm::train(corpus));
  std::size_t wins = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto cps = utf8::to_u32(corpus[i]);
    std::u32string broken;
    for (std::size_t c = 0; c < cps.size(); c += 2) broken.push_back(cps[c]);
    const double clean = fl(corpus[i], scorer);
    EXPECT_GE(clean, 0.0);
    EXPECT_LE(clean, 1.0);
    if (clean > fl(utf8::from_u32(broken), scorer)) ++wins;
  }
  EXPECT_GE(wins, 48u);
}

TEST(Fluency, EmptyOutputScoresZero) {
  const FluencyScorer scorer(CharTrigramLm::train({"abc abc"}));
  EXPECT_DOUBLE_EQ(fl("", scorer), 0.0);
  EXPECT_DOUBLE_EQ(fl("   ", scorer), 0.0);
  EXPECT_DOUBLE_EQ(fl("", ConstantScorer(1.0)), 0.0);
}

TEST(Fluency, UntrainedModelRejected) {
  const CharTrigramLm lm;
  EXPECT_EQ(kind_of([&] { lm.fluency("abc"); }), ErrorKind::kData);
  EXPECT_EQ(kind_of([] { CharTrigramLm::train({}); }), ErrorKind::kData);
}

TEST(Joint, MeanOfProducts) {
  const auto r = joint({1, 1}, {0, 1}, {1, 1});
  EXPECT_DOUBLE_EQ(r.j, 0.5);
  EXPECT_EQ(r.joint, (std::vector<double>{0.0, 1.0}));
  EXPECT_DOUBLE_EQ(r.mean_sim, 0.5);
  EXPECT_EQ(r.to_json()["count"], 2);
}

TEST(Joint, NotTheProductOfMeans) {
  const auto r = joint({1, 0}, {0, 1}, {1, 1});
  EXPECT_DOUBLE_EQ(r.j, 0.0);
  EXPECT_DOUBLE_EQ(r.mean_sta * r.mean_sim * r.mean_fl, 0.25);
}

TEST(Joint, PermutationInvariant) {
  Rng rng(6);
  std::vector<double> a, b, c;
  for (int i = 0; i < 30; ++i) {
    a.push_back(static_cast<double>(uniform_index(rng, 101)) / 100.0);
    b.push_back(static_cast<double>(uniform_index(rng, 101)) / 100.0);
    c.push_back(static_cast<double>(uniform_index(rng, 101)) / 100.0);
  }
  const double j = joint(a, b, c).j;
  auto order = iota_order(a.size());
  for (int trial = 0; trial < 20; ++trial) {
    seeded_shuffle(order, rng);
    std::vector<double> pa, pb, pc;
    for (std::size_t k : order) {
      pa.push_back(a[k]);
      pb.push_back(b[k]);
      pc.push_back(c[k]);
    }
    EXPECT_NEAR(joint(pa, pb, pc).j, j, 1e-12);
  }
}

TEST(Joint, InvalidInputs) {
  EXPECT_EQ(kind_of([] { joint({}, {}, {}); }), ErrorKind::kData);
  EXPECT_EQ(kind_of([] { joint({1}, {1, 1}, {1}); }), ErrorKind::kData);
  EXPECT_EQ(kind_of([] { joint({1.5}, {1}, {1}); }), ErrorKind::kData);
}

TEST(EvaluateTransfer, IdentityWithPerfectScorers) {
  const auto rows = parse_eval_rows("какие же люди\tкакие же люди\nдом\tдом\tref\n", "t");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].references, (std::vector<std::string>{"ref"}));
  const auto r = evaluate_transfer(rows, ConstantScorer(0.0), ChrfSimilarity(), ConstantScorer(1.0));
  EXPECT_DOUBLE_EQ(r.j, 1.0);
  EXPECT_DOUBLE_EQ(r.mean_sim, 1.0);
}

TEST(EvaluateTransfer, EmptyOutputHasZeroFluency) {
  const auto rows = parse_eval_rows("дом\t\n", "t");
  const auto r = evaluate_transfer(rows, ConstantScorer(0.0), ChrfSimilarity(), ConstantScorer(1.0));
  EXPECT_DOUBLE_EQ(r.fl[0], 0.0);
  EXPECT_DOUBLE_EQ(r.j, 0.0);
}

TEST(EvaluateTransfer, MalformedRow) {
  try {
    parse_eval_rows("a\tb\nonly\n", "eval.tsv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
    EXPECT_NE(std::string(e.what()).find("eval.tsv:2"), std::string::npos);
  }
}

TEST(MajorityVote, StrictMajority) {
  EXPECT_EQ(majority_vote(std::vector<int>{1, 1, 0}), 1);
  EXPECT_EQ(majority_vote(std::vector<int>{0, 1, 0}), 0);
  EXPECT_EQ(majority_vote(std::vector<int>{1}), 1);
  EXPECT_EQ(kind_of([] { majority_vote(std::vector<int>{1, 0}); }), ErrorKind::kData);
  EXPECT_EQ(kind_of([] { majority_vote(std::vector<int>{}); }), ErrorKind::kData);
  EXPECT_EQ(kind_of([] { majority_vote(std::vector<int>{2, 1, 1}); }), ErrorKind::kData);
}

TEST(MajorityVote, PerSampleInFirstAppearanceOrder) {
  const auto votes = majority_vote(records_from({{1, 1, 0}, {0, 0, 0}}));
  ASSERT_EQ(votes.size(), 2u);
  EXPECT_EQ(votes[0], (std::pair<std::string, int>{"s0", 1}));
  EXPECT_EQ(votes[1], (std::pair<std::string, int>{"s1", 0}));
}

TEST(ParseAnnotations, Errors) {
  EXPECT_EQ(parse_annotations("s\tw\t1\ns\tv\t0\n", "a").size(), 2u);
  EXPECT_EQ(kind_of([] { parse_annotations("s\tw\t1\ns\tw\t0\n", "a"); }), ErrorKind::kFormat);
  EXPECT_EQ(kind_of([] { parse_annotations("s\tw\tyes\n", "a"); }), ErrorKind::kFormat);
  EXPECT_EQ(kind_of([] { parse_annotations("s\tw\n", "a"); }), ErrorKind::kFormat);
}

TEST(Alpha, HandComputedValues) {
  EXPECT_NEAR(krippendorff_alpha(records_from({{1, 0}, {0, 1}})).alpha, -0.5, 1e-9);
  EXPECT_NEAR(krippendorff_alpha(records_from({{1, 1, 1}, {0, 0, 1}, {0, 0}})).alpha, 9.0 / 16.0, 1e-9);
  EXPECT_NEAR(krippendorff_alpha(records_from({{0, 1, 1}, {1, 1}, {0, 0, 0, 1}})).alpha, 0.2, 1e-9);
}

TEST(Alpha, PerfectAgreement) {
  const auto r = krippendorff_alpha(records_from({{1, 1, 1}, {0, 0, 0}, {1, 1}}));
  EXPECT_DOUBLE_EQ(r.alpha, 1.0);
  EXPECT_DOUBLE_EQ(r.average_agreement, 1.0);
  EXPECT_FALSE(r.degenerate);
  EXPECT_EQ(r.pairable_values, 8u);
}

TEST(Alpha, SingleValueIsDegenerate) {
  const auto r = krippendorff_alpha(records_from({{1, 1}, {1, 1, 1}}));
  EXPECT_TRUE(r.degenerate);
  EXPECT_DOUBLE_EQ(r.alpha, 1.0);
}

TEST(Alpha, NeedsTwoPairableUnits) {
  EXPECT_EQ(kind_of([] { krippendorff_alpha(records_from({{1, 0}, {1}})); }), ErrorKind::kData);
}

TEST(Alpha, MatchesPairwiseOracleAndIgnoresLabelNames) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    Units units(2 + uniform_index(rng, 8));
    for (auto& u : units) {
      u.resize(2 + uniform_index(rng, 4));
      for (auto& v : u) v = static_cast<int>(uniform_index(rng, 2));
    }
    units[0][0] = 0;
    units[0][1] = 1;
    const auto r = krippendorff_alpha(records_from(units));
    EXPECT_NEAR(r.alpha, alpha_oracle(units), 1e-9);
    Units flipped = units;
    for (auto& u : flipped) {
      for (auto& v : u) v = 1 - v;
    }
    EXPECT_NEAR(krippendorff_alpha(records_from(flipped)).alpha, r.alpha, 1e-9);
    EXPECT_GE(r.average_agreement, 0.0);
    EXPECT_LE(r.average_agreement, 1.0);
  }
}

}  // namespace
}  // namespace tagfill
