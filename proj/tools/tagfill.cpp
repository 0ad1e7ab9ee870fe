// tagfill: command-line front end for the tag-then-fill detoxification
// toolkit.
//
//   tagfill derive        parallel TSV      -> tagger + generator JSON lines
//   tagfill train-tagger  tagger JSON lines -> perceptron model
//   tagfill train-clf     labeled TSV       -> toxicity classifier
//   tagfill detox         sentences         -> rewritten sentences
//   tagfill checklist     classifier+corpus -> robustness report
//   tagfill eval-clf      classifier+corpus -> AUC / accuracy / F1
//   tagfill eval          source/output TSV -> STA / SIM / FL / J
//   tagfill agreement     annotations TSV   -> majority votes + alpha

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tagfill/agreement.hpp"
#include "tagfill/checklist.hpp"
#include "tagfill/tagfill.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kFormat = 4,
  kProtocol = 5,
  kStructural = 6,
  kData = 7,
};

int exit_code_for(tagfill::ErrorKind kind) {
  switch (kind) {
    case tagfill::ErrorKind::kIo: return kIo;
    case tagfill::ErrorKind::kFormat: return kFormat;
    case tagfill::ErrorKind::kProtocol: return kProtocol;
    case tagfill::ErrorKind::kStructural: return kStructural;
    case tagfill::ErrorKind::kData: return kData;
  }
  return kInternal;
}

int report_error(std::string_view kind, int code, const std::string& message) {
  json record = {{"error", {{"kind", kind}, {"exit_code", code}, {"message", message}}}};
  std::cerr << record.dump() << std::endl;
  return code;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    tagfill::fail(tagfill::ErrorKind::kIo, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) {
    tagfill::fail(tagfill::ErrorKind::kIo, "input file not found: " + path);
  }
}

// Provenance record embedded in every output. Inputs are identified by file
// name and content digest so runs from different directories compare equal.
json make_meta(std::string_view command, std::uint64_t seed,
               const std::vector<std::string>& inputs) {
  json digests = json::array();
  for (const auto& path : inputs) {
    digests.push_back({{"name", fs::path(path).filename().string()},
                       {"sha256", sha256_hex(tagfill::io::read_file(path))}});
  }
  return {{"tool", "tagfill"},
          {"version", tagfill::kVersion},
          {"command", command},
          {"seed", seed},
          {"inputs", std::move(digests)}};
}

json meta_line(const json& meta) { return {{std::string(tagfill::io::kMetaKey), meta}}; }

// "prefix:rest" component specs.
struct Spec {
  std::string kind;
  std::string arg;
};

Spec parse_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return {text, ""};
  return {text.substr(0, colon), text.substr(colon + 1)};
}

// Files named inside component specs are inputs too.
void collect_spec_input(const std::string& text, std::vector<std::string>& inputs) {
  const Spec spec = parse_spec(text);
  if (spec.kind == "extern" || spec.kind == "const" || spec.arg.empty()) {
    if (spec.arg.empty() && spec.kind != "salience" && spec.kind != "delete" &&
        spec.kind != "chrf" && fs::is_regular_file(spec.kind)) {
      inputs.push_back(spec.kind);
    }
    return;
  }
  require_file(spec.arg);
  inputs.push_back(spec.arg);
}

double parse_probability(const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && v >= 0.0 && v <= 1.0) return v;
  } catch (const std::exception&) {
  }
  tagfill::fail(tagfill::ErrorKind::kFormat, "expected a value in [0, 1], got \"" + text + "\"");
}

std::unique_ptr<tagfill::TextScorer> make_classifier(const std::string& text) {
  const Spec spec = parse_spec(text);
  if (spec.kind == "const") return std::make_unique<tagfill::ConstantScorer>(parse_probability(spec.arg));
  if (spec.kind == "extern") {
    return std::make_unique<tagfill::ExternalScorer>(tagfill::PluginChannel::command(spec.arg));
  }
  if (spec.kind == "file") {
    return std::make_unique<tagfill::ExternalScorer>(tagfill::PluginChannel::response_file(spec.arg));
  }
  const std::string path = spec.kind == "clf" ? spec.arg : text;
  require_file(path);
  return std::make_unique<tagfill::ClfScorer>(tagfill::load_clf(path));
}

std::unique_ptr<tagfill::TextScorer> make_fluency(const std::string& text) {
  const Spec spec = parse_spec(text);
  if (spec.kind == "const") return std::make_unique<tagfill::ConstantScorer>(parse_probability(spec.arg));
  if (spec.kind == "extern") {
    return std::make_unique<tagfill::ExternalScorer>(tagfill::PluginChannel::command(spec.arg));
  }
  if (spec.kind == "file") {
    return std::make_unique<tagfill::ExternalScorer>(tagfill::PluginChannel::response_file(spec.arg));
  }
  if (spec.kind == "lm") {
    require_file(spec.arg);
    return std::make_unique<tagfill::FluencyScorer>(
        tagfill::CharTrigramLm::train(tagfill::io::read_lines(spec.arg)));
  }
  tagfill::fail(tagfill::ErrorKind::kFormat, "unknown fluency scorer \"" + text + "\"");
}

std::unique_ptr<tagfill::SimilarityScorer> make_similarity(const std::string& text, double beta) {
  const Spec spec = parse_spec(text);
  if (spec.kind == "chrf") return std::make_unique<tagfill::ChrfSimilarity>(tagfill::ChrfOptions{6, beta});
  if (spec.kind == "extern") {
    return std::make_unique<tagfill::ExternalSimilarity>(tagfill::PluginChannel::command(spec.arg));
  }
  if (spec.kind == "file") {
    return std::make_unique<tagfill::ExternalSimilarity>(
        tagfill::PluginChannel::response_file(spec.arg));
  }
  tagfill::fail(tagfill::ErrorKind::kFormat, "unknown similarity scorer \"" + text + "\"");
}

tagfill::GeneratorFormat generator_format(bool source_first, const std::string& separator) {
  return {!source_first, separator};
}

// ---------------------------------------------------------------------------

struct Globals {
  std::size_t jobs = tagfill::default_jobs();
};

struct DeriveArgs {
  std::string input, tags_out, generator_out;
  bool skip_header = false, case_fold = false, source_first = false;
  std::string separator = " [SEP] ";
  std::uint64_t seed = 0;
};

void run_derive(const DeriveArgs& a, const Globals& g) {
  require_file(a.input);
  const json meta = make_meta("derive", a.seed, {a.input});
  const auto pairs = tagfill::load_parallel(a.input, a.skip_header);
  const auto tagged = tagfill::build_tagger_dataset(pairs, a.case_fold, g.jobs);
  const auto format = generator_format(a.source_first, a.separator);

  std::string tags_text = tagfill::io::dump_line(meta_line(meta));
  std::string gen_text = tags_text;
  std::size_t generator_examples = 0;
  for (const auto& ex : tagged) {
    tags_text += tagfill::io::dump_line(tagfill::tagger_record(ex));
    if (auto gen = tagfill::derive_generator_example(ex, format)) {
      gen_text += tagfill::io::dump_line(tagfill::generator_record(ex, *gen));
      ++generator_examples;
    }
  }
  tagfill::io::write_file(a.tags_out, tags_text);
  if (!a.generator_out.empty()) tagfill::io::write_file(a.generator_out, gen_text);
  std::cout << json{{"pairs", pairs.size()},
                    {"tagger_examples", tagged.size()},
                    {"generator_examples", generator_examples}}
                   .dump()
            << std::endl;
}

struct TrainTaggerArgs {
  std::string input, output, lexicon;
  std::size_t epochs = 5;
  std::uint64_t seed = 0;
};

void run_train_tagger(const TrainTaggerArgs& a, const Globals&) {
  require_file(a.input);
  std::vector<std::string> inputs{a.input};
  std::vector<std::string> lexicon;
  if (!a.lexicon.empty()) {
    require_file(a.lexicon);
    inputs.push_back(a.lexicon);
    lexicon = tagfill::Lexicon::load(a.lexicon).words();
  }
  const json meta = make_meta("train-tagger", a.seed, inputs);
  std::vector<tagfill::TaggedTokens> dataset;
  for (const auto& line : tagfill::io::read_json_lines(a.input)) {
    const std::string where = a.input + ":" + std::to_string(line.line_number);
    try {
      auto tags = tagfill::tags_from_json(line.value);
      std::vector<std::string> tokens;
      if (line.value.contains("tokens")) {
        tokens = line.value["tokens"].get<std::vector<std::string>>();
      } else if (line.value.contains("source")) {
        tokens = tagfill::tokenize_texts(line.value["source"].get<std::string>());
      } else {
        tagfill::fail(tagfill::ErrorKind::kFormat, "record has neither tokens nor source");
      }
      if (!tags.valid_for(tokens.size())) {
        tagfill::fail(tagfill::ErrorKind::kFormat, "tag and token counts differ");
      }
      dataset.push_back({std::move(tokens), std::move(tags)});
    } catch (const tagfill::Error& e) {
      tagfill::fail(e.kind(), where + ": " + e.what());
    } catch (const json::exception& e) {
      tagfill::fail(tagfill::ErrorKind::kFormat, where + ": " + e.what());
    }
  }
  const auto model = tagfill::train_perceptron(dataset, a.epochs, a.seed, lexicon);
  tagfill::save_perceptron(model, a.output, meta);
}

struct TrainClfArgs {
  std::string input, output, lexicon;
  std::size_t epochs = 10;
  std::size_t dimension = std::size_t{1} << 18;
  std::uint64_t seed = 0;
  bool augment = false;
};

void run_train_clf(const TrainClfArgs& a, const Globals&) {
  require_file(a.input);
  std::vector<std::string> inputs{a.input};
  tagfill::Lexicon lexicon;
  if (!a.lexicon.empty()) {
    require_file(a.lexicon);
    inputs.push_back(a.lexicon);
    lexicon = tagfill::Lexicon::load(a.lexicon);
  }
  const json meta = make_meta("train-clf", a.seed, inputs);
  auto corpus = tagfill::load_labeled(a.input);
  if (a.augment) corpus = tagfill::augment_corpus(corpus, tagfill::default_checklist(), lexicon, a.seed);
  tagfill::ClfOptions options;
  options.epochs = a.epochs;
  options.seed = a.seed;
  options.dimension = a.dimension;
  tagfill::save_clf(tagfill::train_clf(corpus, options), a.output, meta);
}

struct DetoxArgs {
  std::string input, output, tagger = "salience", generator = "delete";
  std::string salience_corpus, rerank_classifier;
  double salience_threshold = 3.0, salience_lambda = 1.0;
  bool source_first = false;
  std::string separator = " [SEP] ";
  std::uint64_t seed = 0;
};

std::unique_ptr<tagfill::Tagger> make_tagger(const DetoxArgs& a) {
  const Spec spec = parse_spec(a.tagger);
  if (spec.kind == "salience") {
    if (a.salience_corpus.empty()) {
      tagfill::fail(tagfill::ErrorKind::kIo, "--tagger salience needs --salience-corpus");
    }
    return std::make_unique<tagfill::SalienceTagger>(
        tagfill::SalienceTable::from_corpus(tagfill::load_labeled(a.salience_corpus),
                                            a.salience_lambda),
        a.salience_threshold);
  }
  if (spec.kind == "perceptron") {
    return std::make_unique<tagfill::PerceptronTagger>(tagfill::load_perceptron(spec.arg));
  }
  if (spec.kind == "extern") {
    return std::make_unique<tagfill::ExternalTagger>(tagfill::PluginChannel::command(spec.arg));
  }
  if (spec.kind == "file") {
    return std::make_unique<tagfill::ExternalTagger>(tagfill::PluginChannel::response_file(spec.arg));
  }
  tagfill::fail(tagfill::ErrorKind::kFormat, "unknown tagger \"" + a.tagger + "\"");
}

std::unique_ptr<tagfill::Generator> make_generator(const DetoxArgs& a,
                                                   std::shared_ptr<tagfill::TextScorer> reranker) {
  const Spec spec = parse_spec(a.generator);
  if (spec.kind == "delete") return std::make_unique<tagfill::DeleteGenerator>();
  if (spec.kind == "lexicon") {
    return std::make_unique<tagfill::LexiconGenerator>(tagfill::Lexicon::load(spec.arg));
  }
  if (spec.kind == "extern" || spec.kind == "file") {
    auto channel = spec.kind == "extern" ? tagfill::PluginChannel::command(spec.arg)
                                         : tagfill::PluginChannel::response_file(spec.arg);
    tagfill::HypothesisScorer scorer;
    if (reranker) {
      scorer = [reranker](const tagfill::FillRequest& request,
                          const std::vector<std::string>& output) {
        const std::string text = tagfill::detokenize(output);
        return (1.0 - reranker->score(text)) * tagfill::chrf(request.source_text, text);
      };
    }
    return std::make_unique<tagfill::ExternalGenerator>(
        std::move(channel), generator_format(a.source_first, a.separator), scorer);
  }
  tagfill::fail(tagfill::ErrorKind::kFormat, "unknown generator \"" + a.generator + "\"");
}

void run_detox(const DetoxArgs& a, const Globals& g) {
  require_file(a.input);
  std::vector<std::string> inputs{a.input};
  collect_spec_input(a.tagger, inputs);
  collect_spec_input(a.generator, inputs);
  if (!a.salience_corpus.empty()) {
    require_file(a.salience_corpus);
    inputs.push_back(a.salience_corpus);
  }
  std::shared_ptr<tagfill::TextScorer> reranker;
  if (!a.rerank_classifier.empty()) {
    collect_spec_input(a.rerank_classifier, inputs);
    reranker = make_classifier(a.rerank_classifier);
  }
  json meta = make_meta("detox", a.seed, inputs);
  const auto tagger = make_tagger(a);
  const auto generator = make_generator(a, reranker);
  const auto summary = tagfill::detoxify_batch(a.input, a.output, *tagger, *generator, g.jobs);
  meta["summary"] = summary.to_json();
  tagfill::io::write_file(a.output + ".meta.json", meta.dump(1) + "\n");
  std::cout << summary.to_json().dump() << std::endl;
}

struct ChecklistArgs {
  std::string classifier, corpus, lexicon, output;
  std::uint64_t seed = 0;
};

void run_checklist(const ChecklistArgs& a, const Globals& g) {
  require_file(a.corpus);
  std::vector<std::string> inputs{a.corpus};
  collect_spec_input(a.classifier, inputs);
  tagfill::Lexicon lexicon;
  if (!a.lexicon.empty()) {
    require_file(a.lexicon);
    inputs.push_back(a.lexicon);
    lexicon = tagfill::Lexicon::load(a.lexicon);
  }
  const json meta = make_meta("checklist", a.seed, inputs);
  const auto classifier = make_classifier(a.classifier);
  const auto corpus = tagfill::load_labeled(a.corpus);
  if (corpus.empty()) tagfill::fail(tagfill::ErrorKind::kData, "checklist corpus is empty");
  const auto results = tagfill::run_checklist(*classifier, corpus, tagfill::default_checklist(),
                                              lexicon, a.seed, g.jobs);
  const json report = {{"meta", meta}, {"tests", tagfill::checklist_to_json(results)}};
  tagfill::io::write_file(a.output, report.dump(1) + "\n");
}

struct EvalClfArgs {
  std::string classifier, input, output;
};

void run_eval_clf(const EvalClfArgs& a, const Globals& g) {
  require_file(a.input);
  std::vector<std::string> inputs{a.input};
  collect_spec_input(a.classifier, inputs);
  const json meta = make_meta("eval-clf", 0, inputs);
  const auto classifier = make_classifier(a.classifier);
  const auto report = tagfill::evaluate_clf(*classifier, tagfill::load_labeled(a.input), g.jobs);
  tagfill::io::write_file(a.output, json{{"meta", meta}, {"report", report.to_json()}}.dump(1) + "\n");
}

struct EvalArgs {
  std::string input, output, classifier, fluency, similarity = "chrf";
  double beta = 2.0;
  std::uint64_t seed = 0;
};

void run_eval(const EvalArgs& a, const Globals& g) {
  require_file(a.input);
  std::vector<std::string> inputs{a.input};
  collect_spec_input(a.classifier, inputs);
  collect_spec_input(a.fluency, inputs);
  collect_spec_input(a.similarity, inputs);
  const json meta = make_meta("eval", a.seed, inputs);
  const auto rows = tagfill::parse_eval_rows(tagfill::io::read_file(a.input), a.input);
  const auto classifier = make_classifier(a.classifier);
  const auto fluency = make_fluency(a.fluency);
  const auto similarity = make_similarity(a.similarity, a.beta);
  const auto report = tagfill::evaluate_transfer(rows, *classifier, *similarity, *fluency, g.jobs);
  json out = report.to_json();
  out["meta"] = meta;
  tagfill::io::write_file(a.output, out.dump(1) + "\n");
}

struct AgreementArgs {
  std::string input, output;
};

void run_agreement(const AgreementArgs& a, const Globals&) {
  require_file(a.input);
  const json meta = make_meta("agreement", 0, {a.input});
  const auto records = tagfill::parse_annotations(tagfill::io::read_file(a.input), a.input);
  json votes = json::array();
  for (const auto& [sample, label] : tagfill::majority_vote(records)) {
    votes.push_back({{"sample_id", sample}, {"label", label}});
  }
  const auto agreement = tagfill::krippendorff_alpha(records);
  json out = {{"meta", meta}, {"agreement", agreement.to_json()}, {"majority", std::move(votes)}};
  tagfill::io::write_file(a.output, out.dump(1) + "\n");
}

constexpr const char* kFormatsHelp = R"(File formats:
  parallel TSV     source<TAB>reference[<TAB>reference...], UTF-8, LF
  labeled TSV      text<TAB>label, label in {toxic, neutral}
  lexicon          word[<TAB>replacement...] per line
  tag records      JSON lines {source, target, tokens, tags, gaps, ops}
  generator recs   tag record + {template, segments, fills, input, output}
  eval TSV         source<TAB>output[<TAB>reference...]
  annotations TSV  sample_id<TAB>worker_id<TAB>answer
JSON-lines outputs start with a {"_meta": {...}} provenance record.

Component specs:
  --tagger      salience | perceptron:MODEL | extern:CMD | file:RESPONSES
  --generator   delete | lexicon:FILE | extern:CMD | file:RESPONSES
  --classifier  MODEL | clf:MODEL | const:P | extern:CMD | file:RESPONSES
  --fluency     lm:CORPUS | const:P | extern:CMD | file:RESPONSES
  --similarity  chrf | extern:CMD | file:RESPONSES
Plugins read JSON-lines requests on stdin and write responses with the same "id":
  tagger      {id, text, tokens}                        -> {id, tags, gaps}
  generator   {id, template, source, masked_spans, input} -> {id, fills[, hypotheses]}
  scorers     {id, text[, source]}                      -> {id, score}

Exit codes: 0 ok, 2 usage, 3 io, 4 format, 5 plugin protocol, 6 structural, 7 data.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tag-then-fill text detoxification toolkit"};
  app.footer(kFormatsHelp);
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value configuration file");
  Globals globals;
  app.add_option("-j,--jobs", globals.jobs, "Worker threads")->check(CLI::PositiveNumber);

  DeriveArgs derive;
  auto* derive_cmd = app.add_subcommand("derive", "Derive tagger and generator datasets from a parallel TSV");
  derive_cmd->add_option("-i,--input", derive.input, "Parallel TSV")->required();
  derive_cmd->add_option("--tags-out", derive.tags_out, "Tagger dataset (JSON lines)")->required();
  derive_cmd->add_option("--generator-out", derive.generator_out, "Generator dataset (JSON lines)");
  derive_cmd->add_flag("--skip-header", derive.skip_header, "Ignore the first row");
  derive_cmd->add_flag("--case-fold", derive.case_fold, "Align case- and yo-insensitively");
  derive_cmd->add_flag("--source-first", derive.source_first, "Generator input is source + SEP + template");
  derive_cmd->add_option("--separator", derive.separator, "Generator input separator");
  derive_cmd->add_option("--seed", derive.seed, "Recorded seed");

  TrainTaggerArgs train_tagger;
  auto* tagger_cmd = app.add_subcommand("train-tagger", "Train the averaged-perceptron tagger");
  tagger_cmd->add_option("-i,--input", train_tagger.input, "Tag records (JSON lines)")->required();
  tagger_cmd->add_option("-o,--output", train_tagger.output, "Model file")->required();
  tagger_cmd->add_option("--lexicon", train_tagger.lexicon, "Toxic word list");
  tagger_cmd->add_option("--epochs", train_tagger.epochs, "Training epochs");
  tagger_cmd->add_option("--seed", train_tagger.seed, "Shuffle seed");

  TrainClfArgs train_clf;
  auto* clf_cmd = app.add_subcommand("train-clf", "Train the char n-gram toxicity classifier");
  clf_cmd->add_option("-i,--input", train_clf.input, "Labeled TSV")->required();
  clf_cmd->add_option("-o,--output", train_clf.output, "Model file")->required();
  clf_cmd->add_option("--lexicon", train_clf.lexicon, "Toxic word list (for --augment)");
  clf_cmd->add_option("--epochs", train_clf.epochs, "Training epochs");
  clf_cmd->add_option("--dimension", train_clf.dimension, "Hash dimension (power of two)");
  clf_cmd->add_option("--seed", train_clf.seed, "Shuffle seed");
  clf_cmd->add_flag("--augment", train_clf.augment, "Add checklist transformations to the corpus");

  DetoxArgs detox;
  auto* detox_cmd = app.add_subcommand("detox", "Rewrite sentences with a tagger and a generator");
  detox_cmd->add_option("-i,--input", detox.input, "One sentence per line")->required();
  detox_cmd->add_option("-o,--output", detox.output, "Output file")->required();
  detox_cmd->add_option("--tagger", detox.tagger, "Tagger spec");
  detox_cmd->add_option("--generator", detox.generator, "Generator spec");
  detox_cmd->add_option("--salience-corpus", detox.salience_corpus, "Labeled TSV for the salience tagger");
  detox_cmd->add_option("--salience-threshold", detox.salience_threshold, "Salience DELETE threshold");
  detox_cmd->add_option("--salience-lambda", detox.salience_lambda, "Salience smoothing");
  detox_cmd->add_option("--rerank-classifier", detox.rerank_classifier,
                        "Rerank generator hypotheses by (1 - toxicity) * chrF (off by default)");
  detox_cmd->add_flag("--source-first", detox.source_first, "Generator input is source + SEP + template");
  detox_cmd->add_option("--separator", detox.separator, "Generator input separator");
  detox_cmd->add_option("--seed", detox.seed, "Recorded seed");

  ChecklistArgs checklist;
  auto* checklist_cmd = app.add_subcommand("checklist", "Run the classifier robustness battery");
  checklist_cmd->add_option("--classifier", checklist.classifier, "Classifier spec")->required();
  checklist_cmd->add_option("--corpus", checklist.corpus, "Labeled TSV")->required();
  checklist_cmd->add_option("--lexicon", checklist.lexicon, "Toxic word list");
  checklist_cmd->add_option("-o,--output", checklist.output, "Report (JSON)")->required();
  checklist_cmd->add_option("--seed", checklist.seed, "Transformation seed");

  EvalClfArgs eval_clf;
  auto* eval_clf_cmd = app.add_subcommand("eval-clf", "AUC, accuracy and F1 of a classifier");
  eval_clf_cmd->add_option("--classifier", eval_clf.classifier, "Classifier spec")->required();
  eval_clf_cmd->add_option("-i,--input", eval_clf.input, "Labeled TSV")->required();
  eval_clf_cmd->add_option("-o,--output", eval_clf.output, "Report (JSON)")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "STA / SIM / FL / J for source-output pairs");
  eval_cmd->add_option("-i,--input", eval.input, "Eval TSV")->required();
  eval_cmd->add_option("-o,--output", eval.output, "Metrics (JSON)")->required();
  eval_cmd->add_option("--classifier", eval.classifier, "Toxicity classifier spec")->required();
  eval_cmd->add_option("--fluency", eval.fluency, "Fluency scorer spec")->required();
  eval_cmd->add_option("--similarity", eval.similarity, "Similarity scorer spec");
  eval_cmd->add_option("--beta", eval.beta, "chrF beta");
  eval_cmd->add_option("--seed", eval.seed, "Recorded seed");

  AgreementArgs agreement;
  auto* agreement_cmd = app.add_subcommand("agreement", "Majority votes and Krippendorff's alpha");
  agreement_cmd->add_option("-i,--input", agreement.input, "Annotations TSV")->required();
  agreement_cmd->add_option("-o,--output", agreement.output, "Report (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", kUsage, e.what());
  }

  try {
    if (*derive_cmd) run_derive(derive, globals);
    else if (*tagger_cmd) run_train_tagger(train_tagger, globals);
    else if (*clf_cmd) run_train_clf(train_clf, globals);
    else if (*detox_cmd) run_detox(detox, globals);
    else if (*checklist_cmd) run_checklist(checklist, globals);
    else if (*eval_clf_cmd) run_eval_clf(eval_clf, globals);
    else if (*eval_cmd) run_eval(eval, globals);
    else if (*agreement_cmd) run_agreement(agreement, globals);
  } catch (const tagfill::Error& e) {
    return report_error(tagfill::error_kind_name(e.kind()), exit_code_for(e.kind()), e.what());
  } catch (const std::exception& e) {
    return report_error("internal", kInternal, e.what());
  }
  return kOk;
}
