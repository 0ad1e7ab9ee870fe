#include <gtest/gtest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "tagfill/corpus.hpp"
#include "tagfill/lexicon.hpp"

namespace tagfill {
namespace {

using Strings = std::vector<std::string>;

const ParallelPair kExample1{"сколько же е**нутых в россии в месте с тобой",
                             {"сколько же неадекватных в россии в месте с тобой"}};
const ParallelPair kExample2{"какие же эти люди сволочи!!!", {"какие же эти люди плохие!"}};

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kIo;
}

TEST(ParseParallel, EmptyFile) { EXPECT_TRUE(parse_parallel("", "t").empty()); }

TEST(ParseParallel, EmptyReferenceCellsDropped) {
  const auto pairs = parse_parallel("a\tb\t\tc\n", "t");
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].source, "a");
  EXPECT_EQ(pairs[0].targets, (Strings{"b", "c"}));
}

TEST(ParseParallel, RowsKeepOrderAndCrlfIsStripped) {
  const auto pairs = parse_parallel("src\tref\r\nx\ty\r\nz\tw\n", "t", true);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].source, "x");
  EXPECT_EQ(pairs[1].targets, (Strings{"w"}));
}

TEST(ParseParallel, MalformedRowsNameTheLine) {
  try {
    parse_parallel("a\tb\nonly-one-column\n", "corpus.tsv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
    EXPECT_NE(std::string(e.what()).find("corpus.tsv:2"), std::string::npos);
  }
  EXPECT_EQ(kind_of([] { parse_parallel("a\tb\n\n", "t"); }), ErrorKind::kFormat);
  EXPECT_EQ(kind_of([] { parse_parallel("a\t\t\n", "t"); }), ErrorKind::kFormat);
}

TEST(LoadParallel, MissingFileIsIo) {
  EXPECT_EQ(kind_of([] { load_parallel("/nonexistent/corpus.tsv"); }), ErrorKind::kIo);
}

TEST(ParseLabeled, LabelsAndErrors) {
  const auto rows = parse_labeled("hello\tneutral\nbad\ttoxic\nx\t1\n", "t");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].label, Label::kToxic);
  EXPECT_EQ(rows[2].label, Label::kToxic);
  EXPECT_EQ(kind_of([] { parse_labeled("x\tmaybe\n", "t"); }), ErrorKind::kFormat);
  EXPECT_EQ(kind_of([] { parse_labeled("x\n", "t"); }), ErrorKind::kFormat);
}

TEST(BuildTaggerDataset, IdenticalPairIsAllKeep) {
  const auto data = build_tagger_dataset({{"a b c", {"a b c"}}});
  ASSERT_EQ(data.size(), 1u);
  EXPECT_EQ(data[0].tags, TagSequence::all_keep(3));
}

TEST(BuildTaggerDataset, ExampleOneHasOneReplace) {
  const auto data = build_tagger_dataset({kExample1});
  const auto& tags = data[0].tags.token_tags;
  EXPECT_EQ(std::count(tags.begin(), tags.end(), Tag::kReplace), 1);
  EXPECT_EQ(std::count(tags.begin(), tags.end(), Tag::kDelete), 0);
}

TEST(BuildTaggerDataset, SizeMatchesAndUsesFirstReference) {
  const std::vector<ParallelPair> pairs = {{"a b", {"a", "b"}}, {"c", {"c"}}, {"d e", {"x"}}};
  const auto data = build_tagger_dataset(pairs);
  ASSERT_EQ(data.size(), pairs.size());
  EXPECT_EQ(data[0].target, "a");
  EXPECT_EQ(data[0].tags.token_tags, (std::vector<Tag>{Tag::kKeep, Tag::kDelete}));
}

TEST(BuildGeneratorDataset, AllKeepPairExcluded) {
  EXPECT_TRUE(build_generator_dataset({{"a b c", {"a b c"}}}).empty());
  EXPECT_TRUE(build_generator_dataset({{"a b c", {"a c"}}}).empty());
}

TEST(BuildGeneratorDataset, ExampleOne) {
  const auto data = build_generator_dataset({kExample1});
  ASSERT_EQ(data.size(), 1u);
  EXPECT_EQ(data[0].input,
            "сколько же [MASK0] в россии в месте с тобой [SEP] сколько же е**нутых в россии в месте с тобой");
  EXPECT_EQ(data[0].fills, (std::vector<Strings>{{"неадекватных"}}));
  EXPECT_EQ(data[0].output, "[MASK0] неадекватных");
}

TEST(BuildGeneratorDataset, ExampleTwoDeletionsAbsentFromSlots) {
  const auto data = build_generator_dataset({kExample2});
  ASSERT_EQ(data.size(), 1u);
  EXPECT_EQ(data[0].fills, (std::vector<Strings>{{"плохие"}}));
  EXPECT_EQ(render_template(data[0].tmpl), "какие же эти люди [MASK0]!");
}

TEST(BuildGeneratorDataset, SourceFirstAndCustomSeparator) {
  const auto data = build_generator_dataset({kExample2}, {false, " || "});
  EXPECT_EQ(data[0].input, "какие же эти люди сволочи!!! || какие же эти люди [MASK0]!");
}

TEST(BuildGeneratorDataset, OutputNamesEverySlot) {
  EXPECT_EQ(generator_output({{"a", "b"}, {}, {"c"}}), "[MASK0] a b [MASK1] [MASK2] c");
}

TEST(BuildGeneratorDataset, GoldFillsReproduceTargets) {
  const auto pairs = fixtures::parallel_corpus(500, 21);
  for (const auto& ex : build_generator_dataset(pairs, {}, false, 3)) {
    ASSERT_EQ(detokenize(fill_template(ex.tmpl, ex.fills)), ex.target);
  }
}

TEST(BuildGeneratorDataset, DeterministicAcrossJobCounts) {
  const auto pairs = fixtures::parallel_corpus(300, 22);
  const auto a = build_generator_dataset(pairs, {}, false, 1);
  const auto b = build_generator_dataset(pairs, {}, false, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].input, b[i].input);
    EXPECT_EQ(a[i].output, b[i].output);
  }
}

TEST(Records, GeneratorRecordSchema) {
  const auto tagged = build_tagger_dataset({kExample2});
  const auto gen = derive_generator_example(tagged[0], {});
  ASSERT_TRUE(gen.has_value());
  const auto record = generator_record(tagged[0], *gen);
  for (const char* key : {"source", "target", "tags", "gaps", "ops", "template", "fills", "input", "output"}) {
    EXPECT_TRUE(record.contains(key)) << key;
  }
  EXPECT_EQ(record["gaps"].size(), tagged[0].tokens.size() + 1);
  EXPECT_EQ(template_from_json(record["segments"]), gen->tmpl);
}

TEST(Lexicon, ParseSkipsCommentsAndFoldsKeys) {
  const auto lex = Lexicon::parse("# comment\nЁлка\tель\tсосна\n\nword\n", "lex");
  EXPECT_EQ(lex.size(), 2u);
  EXPECT_TRUE(lex.contains("елка"));
  EXPECT_TRUE(lex.contains("WORD"));
  EXPECT_EQ(*lex.replacements("ЁЛКА"), (Strings{"ель", "сосна"}));
  EXPECT_TRUE(lex.replacements("word")->empty());
  EXPECT_EQ(lex.replacements("none"), nullptr);
}

}  // namespace
}  // namespace tagfill
