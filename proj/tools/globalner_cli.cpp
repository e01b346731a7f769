// Command-line front end for the retrieval-augmented tagging pipeline:
// index building, per-stage runs, training, tagging, and evaluation.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "globalner/conll.hpp"
#include "globalner/corpus_index.hpp"
#include "globalner/crf.hpp"
#include "globalner/errors.hpp"
#include "globalner/eval.hpp"
#include "globalner/pipeline.hpp"
#include "globalner/text.hpp"
#include "globalner/wiki_index.hpp"

using namespace globalner;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBackend = 3;

struct CommonFlags {
  std::string config_path;
  std::string strategy;
  std::size_t top_n = 0;
  bool gold_mentions = false;
  bool offline = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_config = true) {
  auto* config = cmd->add_option("--config", flags.config_path,
                                 "pipeline configuration file (JSON)");
  if (needs_config) config->required();
  cmd->add_option("--strategy", flags.strategy,
                  "re-ranking weights: equal, hard or soft")
      ->check(CLI::IsMember({"equal", "hard", "soft"}));
  cmd->add_option("--top-n", flags.top_n, "references kept after re-ranking");
  cmd->add_flag("--gold-mentions", flags.gold_mentions,
                "take mention spans from the input labels");
  cmd->add_flag("--offline", flags.offline, "disable the internet backend");
  cmd->add_option("--seed", flags.seed, "override model and shuffle seeds")
      ->each([&](const std::string&) { flags.seed_set = true; });
}

PipelineConfig effective_config(const CommonFlags& flags) {
  PipelineConfig cfg = flags.config_path.empty()
                           ? PipelineConfig{}
                           : PipelineConfig::load(flags.config_path);
  if (!flags.strategy.empty()) cfg.rerank.strategy = flags.strategy;
  if (flags.top_n > 0) cfg.rerank.top_n = flags.top_n;
  if (flags.seed_set) {
    cfg.model_seed = flags.seed;
    cfg.train.shuffle_seed = flags.seed;
  }
  return cfg;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write output file: " + path);
  return out;
}

// Documents for index-corpus: a .conll file is one document of its
// sentences; a plain-text file holds blank-line-separated documents with
// one sentence per line.
std::vector<CorpusIndex::DocRecord> read_corpus_documents(
    const std::vector<std::string>& paths) {
  std::vector<CorpusIndex::DocRecord> docs;
  for (const auto& path : paths) {
    std::string stem = std::filesystem::path(path).stem().string();
    if (path.size() > 6 && path.substr(path.size() - 6) == ".conll") {
      CorpusIndex::DocRecord doc{stem, {}};
      for (const auto& sentence : read_conll_file(path)) {
        doc.sentences.push_back(
            join_tokens(to_local_sentence(sentence).tokens));
      }
      docs.push_back(std::move(doc));
      continue;
    }
    std::ifstream in(path);
    if (!in) throw DataError("cannot open corpus file: " + path);
    CorpusIndex::DocRecord doc{stem, {}};
    std::size_t part = 0;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) {
        if (!doc.sentences.empty()) {
          docs.push_back(doc);
          ++part;
          doc = {stem + "#" + std::to_string(part), {}};
        }
        continue;
      }
      doc.sentences.push_back(line);
    }
    if (!doc.sentences.empty()) docs.push_back(std::move(doc));
  }
  if (docs.empty()) throw DataError("no documents found in the corpus input");
  return docs;
}

CrfModel load_model_for(const Pipeline& pipeline, const std::string& override_path) {
  std::string path = override_path.empty()
                         ? pipeline.config().tagger.checkpoint
                         : override_path;
  if (path.empty()) {
    throw DataError("no model given: set tagger.checkpoint or pass --model");
  }
  CrfModel model = load_crf_file(path);
  if (model.feature_dim != pipeline.features().dim()) {
    throw DataError("model expects feature dim " +
                    std::to_string(model.feature_dim) +
                    " but the configured provider produces " +
                    std::to_string(pipeline.features().dim()));
  }
  return model;
}

int cmd_index_wiki(const std::string& input, const std::string& output) {
  auto index = WikiIndex::build_from_jsonl_file(input);
  index.save_file(output);
  std::cout << "indexed " << index.docs().size() << " paragraphs -> " << output
            << "\n";
  return kExitOk;
}

int cmd_index_corpus(const std::vector<std::string>& inputs,
                     const std::string& output, std::size_t clusters,
                     std::uint64_t seed) {
  auto docs = read_corpus_documents(inputs);
  auto index = CorpusIndex::build(docs, clusters, seed);
  index.save_file(output);
  std::cout << "indexed " << docs.size() << " documents into "
            << index.num_clusters() << " clusters (seed " << seed << ") -> "
            << output << "\n";
  return kExitOk;
}

int cmd_retrieve(const CommonFlags& flags, const std::string& input,
                 const std::string& output) {
  Pipeline pipeline(effective_config(flags), flags.offline);
  auto sentences = read_conll_file(input);
  auto out = open_output(output);
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    auto local = pipeline.detect(sentences[s], flags.gold_mentions);
    for (const auto& candidate : pipeline.retrieve(local)) {
      out << json{{"sentence", s},
                  {"text", candidate.raw_text},
                  {"source", to_string(candidate.source.kind)},
                  {"backend", candidate.source.backend},
                  {"origin_query", candidate.origin_query}}
                 .dump()
          << '\n';
    }
  }
  return kExitOk;
}

std::map<std::size_t, std::vector<ReferenceSentence>> read_candidates(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open candidates file: " + path);
  std::map<std::size_t, std::vector<ReferenceSentence>> by_sentence;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("candidates line " + std::to_string(line_no) + ": " +
                      e.what());
    }
    std::string text = record.at("text").get<std::string>();
    by_sentence[record.at("sentence").get<std::size_t>()].push_back(
        {tokenize(text),
         {source_kind_from_string(record.value("source", "internet")),
          record.value("backend", "unknown")},
         record.value("origin_query", ""),
         text});
  }
  return by_sentence;
}

int cmd_rerank(const CommonFlags& flags, const std::string& input,
               const std::string& candidates_path, const std::string& output) {
  Pipeline pipeline(effective_config(flags), flags.offline);
  auto sentences = read_conll_file(input);
  auto candidates = read_candidates(candidates_path);
  auto out = open_output(output);
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    auto it = candidates.find(s);
    if (it == candidates.end()) continue;
    auto local = pipeline.detect(sentences[s], flags.gold_mentions);
    auto selected = pipeline.rerank(local, it->second);
    for (std::size_t r = 0; r < selected.size(); ++r) {
      out << json{{"sentence", s},
                  {"rank", r},
                  {"score", selected[r].score},
                  {"strategy", to_string(selected[r].strategy_used)},
                  {"source", to_string(selected[r].reference.source.kind)},
                  {"backend", selected[r].reference.source.backend},
                  {"text", selected[r].reference.raw_text}}
                 .dump()
          << '\n';
    }
  }
  return kExitOk;
}

int cmd_assemble(const CommonFlags& flags, const std::string& input,
                 const std::string& ranked_path, const std::string& output) {
  Pipeline pipeline(effective_config(flags), flags.offline);
  auto sentences = read_conll_file(input);
  auto ranked = read_candidates(ranked_path);  // rank order is file order
  auto out = open_output(output);
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    auto local = pipeline.detect(sentences[s], flags.gold_mentions);
    std::vector<ScoredReference> selected;
    auto it = ranked.find(s);
    if (it != ranked.end()) {
      for (const auto& reference : it->second) {
        selected.push_back({reference, 0.0, ScoreStrategy::fallback});
      }
    }
    auto assembled = pipeline.assemble(local, selected);
    json tokens = json::array();
    for (const auto& token : assembled.tokens) tokens.push_back(token.text);
    out << json{{"sentence", s},
                {"tokens", tokens},
                {"mask", assembled.mask},
                {"local_begin", assembled.local_begin},
                {"local_end", assembled.local_end}}
               .dump()
        << '\n';
  }
  return kExitOk;
}

int cmd_train(const CommonFlags& flags, const std::string& train_path,
              const std::string& dev_path, const std::string& output,
              bool with_context) {
  auto cfg = effective_config(flags);
  Pipeline pipeline(cfg, flags.offline);
  auto train_sentences = read_conll_file(train_path);
  auto examples =
      pipeline.build_examples(train_sentences, with_context, flags.gold_mentions);

  std::vector<TrainExample> dev_examples;
  bool has_dev = !dev_path.empty();
  if (has_dev) {
    dev_examples = pipeline.build_examples(read_conll_file(dev_path),
                                           with_context, flags.gold_mentions);
  }

  auto model = CrfModel::init(cfg.tagger.labels, pipeline.features().dim(),
                              cfg.model_seed);
  auto result = train(std::move(model), examples, pipeline.features(),
                      cfg.train, has_dev ? &dev_examples : nullptr);
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
    std::cout << "epoch " << (e + 1) << " loss " << result.epoch_loss[e];
    if (e < result.dev_f1.size()) std::cout << " dev_f1 " << result.dev_f1[e];
    std::cout << "\n";
  }
  if (result.best_epoch > 0) {
    std::cout << "best epoch " << result.best_epoch << "\n";
  }
  save_crf_file(result.model, output);
  std::cout << "saved model -> " << output << "\n";
  return kExitOk;
}

int cmd_tag(const CommonFlags& flags, const std::string& model_path,
            const std::string& input, const std::string& output) {
  auto cfg = effective_config(flags);
  // Bare tagging: no retrieval, local sentences only.
  cfg.wiki.enabled = false;
  cfg.corpus.enabled = false;
  cfg.internet.enabled = false;
  Pipeline pipeline(cfg, /*offline=*/true);
  auto model = load_model_for(pipeline, model_path);
  auto outputs =
      pipeline.run(read_conll_file(input), model, flags.gold_mentions);
  auto out = open_output(output);
  write_conll(out, predictions_of(outputs));
  return kExitOk;
}

int cmd_pipeline(const CommonFlags& flags, const std::string& model_path,
                 const std::string& input, const std::string& output,
                 const std::string& dump_path) {
  Pipeline pipeline(effective_config(flags), flags.offline);
  auto model = load_model_for(pipeline, model_path);
  auto outputs =
      pipeline.run(read_conll_file(input), model, flags.gold_mentions);
  auto out = open_output(output);
  write_conll(out, predictions_of(outputs));
  if (!dump_path.empty()) {
    auto dump = open_output(dump_path);
    write_reference_dump(dump, outputs);
  }
  return kExitOk;
}

int cmd_eval(const std::string& gold, const std::string& predicted) {
  auto result = evaluate_micro_f1_files(gold, predicted);
  std::cout << "precision " << result.precision << " (" << result.true_positives
            << "/" << result.predicted << ")\n"
            << "recall " << result.recall << " (" << result.true_positives
            << "/" << result.gold << ")\n"
            << "micro_f1 " << result.f1 << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retrieval-augmented named-entity tagging pipeline"};
  app.require_subcommand(0, 1);

  bool print_config = false;
  std::string print_config_path;
  app.add_flag("--print-config", print_config,
               "print the effective configuration and exit");
  app.add_option("--config", print_config_path,
                 "configuration to print with --print-config");

  CommonFlags flags;
  std::string input, output, candidates, ranked, model_path, dev_path,
      dump_path, gold_path;
  std::vector<std::string> inputs;
  std::size_t clusters = RetrievalConfig{}.k_clusters;
  std::uint64_t index_seed = 1;
  bool with_context = false;

  auto* index_wiki = app.add_subcommand("index-wiki",
                                        "build a wikipedia paragraph index");
  index_wiki->add_option("--input", input, "JSONL paragraphs {id, text}")
      ->required();
  index_wiki->add_option("--output", output, "index file")->required();

  auto* index_corpus =
      app.add_subcommand("index-corpus", "cluster and index a source corpus");
  index_corpus->add_option("--input", inputs, "corpus files (.conll or text)")
      ->required();
  index_corpus->add_option("--output", output, "index file")->required();
  index_corpus->add_option("--clusters", clusters, "number of clusters");
  index_corpus->add_option("--seed", index_seed, "clustering seed");

  auto* retrieve = app.add_subcommand("retrieve",
                                      "run detection, queries and retrieval");
  add_common(retrieve, flags);
  retrieve->add_option("--input", input, "CoNLL sentences")->required();
  retrieve->add_option("--output", output, "candidates JSONL")->required();

  auto* rerank = app.add_subcommand("rerank", "score and select candidates");
  add_common(rerank, flags);
  rerank->add_option("--input", input, "CoNLL sentences")->required();
  rerank->add_option("--candidates", candidates, "candidates JSONL")
      ->required();
  rerank->add_option("--output", output, "ranked JSONL")->required();

  auto* assemble = app.add_subcommand("assemble",
                                      "build masked tagger inputs");
  add_common(assemble, flags);
  assemble->add_option("--input", input, "CoNLL sentences")->required();
  assemble->add_option("--ranked", ranked, "ranked references JSONL")
      ->required();
  assemble->add_option("--output", output, "assembled JSONL")->required();

  auto* train_cmd = app.add_subcommand("train", "train the sequence tagger");
  add_common(train_cmd, flags);
  train_cmd->add_option("--train", input, "training CoNLL file")->required();
  train_cmd->add_option("--dev", dev_path, "development CoNLL file");
  train_cmd->add_option("--output", output, "model checkpoint")->required();
  train_cmd->add_flag("--with-context", with_context,
                      "train on retrieval-augmented inputs");

  auto* tag = app.add_subcommand("tag", "tag sentences without retrieval");
  add_common(tag, flags);
  tag->add_option("--model", model_path, "model checkpoint");
  tag->add_option("--input", input, "CoNLL sentences")->required();
  tag->add_option("--output", output, "predictions CoNLL")->required();

  auto* pipeline_cmd =
      app.add_subcommand("pipeline", "run the full five-stage pipeline");
  add_common(pipeline_cmd, flags);
  pipeline_cmd->add_option("--model", model_path, "model checkpoint");
  pipeline_cmd->add_option("--input", input, "CoNLL sentences")->required();
  pipeline_cmd->add_option("--output", output, "predictions CoNLL")
      ->required();
  pipeline_cmd->add_option("--dump-references", dump_path,
                           "selected references JSONL");

  auto* eval = app.add_subcommand("eval", "entity-level micro-F1");
  eval->add_option("--gold", gold_path, "gold CoNLL file")->required();
  eval->add_option("--pred", input, "predicted CoNLL file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (print_config) {
      PipelineConfig cfg = print_config_path.empty()
                               ? PipelineConfig{}
                               : PipelineConfig::load(print_config_path);
      std::cout << cfg.to_json_text();
      return kExitOk;
    }
    if (index_wiki->parsed()) return cmd_index_wiki(input, output);
    if (index_corpus->parsed()) {
      return cmd_index_corpus(inputs, output, clusters, index_seed);
    }
    if (retrieve->parsed()) return cmd_retrieve(flags, input, output);
    if (rerank->parsed()) return cmd_rerank(flags, input, candidates, output);
    if (assemble->parsed()) return cmd_assemble(flags, input, ranked, output);
    if (train_cmd->parsed()) {
      return cmd_train(flags, input, dev_path, output, with_context);
    }
    if (tag->parsed()) return cmd_tag(flags, model_path, input, output);
    if (pipeline_cmd->parsed()) {
      return cmd_pipeline(flags, model_path, input, output, dump_path);
    }
    if (eval->parsed()) return cmd_eval(gold_path, input);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
