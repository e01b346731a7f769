#include "globalner/pipeline.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "globalner/errors.hpp"
#include "globalner/text.hpp"

namespace globalner {

using nlohmann::json;

namespace {

json to_json(const PipelineConfig& c) {
  return json{
      {"encoder",
       {{"kind", c.encoder.kind},
        {"dim", c.encoder.dim},
        {"store", c.encoder.store},
        {"hash_fallback", c.encoder.hash_fallback}}},
      {"detector",
       {{"kind", c.detector.kind}, {"gazetteer", c.detector.gazetteer}}},
      {"retrieval",
       {{"top_g", c.retrieval.top_g},
        {"top_w", c.retrieval.top_w},
        {"top_r", c.retrieval.top_r},
        {"k_clusters", c.retrieval.k_clusters},
        {"blocked_domains", c.retrieval.blocked_domains},
        {"annotation_patterns", c.retrieval.annotation_patterns}}},
      {"wiki",
       {{"enabled", c.wiki.enabled},
        {"index", c.wiki.index},
        {"corpus", c.wiki.corpus}}},
      {"corpus",
       {{"enabled", c.corpus.enabled},
        {"index", c.corpus.index},
        {"local_doc", c.corpus.local_doc}}},
      {"internet",
       {{"enabled", c.internet.enabled},
        {"mode", c.internet.mode},
        {"endpoint", c.internet.endpoint},
        {"api_key_env", c.internet.api_key_env},
        {"fixture", c.internet.fixture},
        {"max_in_flight", c.internet.max_in_flight},
        {"min_interval_ms", c.internet.min_interval_ms},
        {"max_retries", c.internet.max_retries}}},
      {"rerank",
       {{"strategy", c.rerank.strategy},
        {"epsilon", c.rerank.epsilon},
        {"top_n", c.rerank.top_n}}},
      {"tagger",
       {{"features", c.tagger.features},
        {"window", c.tagger.window},
        {"labels", c.tagger.labels},
        {"budget", c.tagger.budget},
        {"checkpoint", c.tagger.checkpoint}}},
      {"train",
       {{"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size},
        {"accumulation", c.train.accumulation},
        {"lr", c.train.lr},
        {"beta1", c.train.beta1},
        {"beta2", c.train.beta2},
        {"epsilon", c.train.epsilon},
        {"linear_decay", c.train.linear_decay},
        {"shuffle_seed", c.train.shuffle_seed}}},
      {"model_seed", c.model_seed},
      {"workers", c.workers},
      {"fail_open", c.fail_open}};
}

template <typename T>
void read_into(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

PipelineConfig from_json(const json& j) {
  PipelineConfig c;
  if (j.contains("encoder")) {
    const auto& e = j.at("encoder");
    read_into(e, "kind", c.encoder.kind);
    read_into(e, "dim", c.encoder.dim);
    read_into(e, "store", c.encoder.store);
    read_into(e, "hash_fallback", c.encoder.hash_fallback);
  }
  if (j.contains("detector")) {
    const auto& d = j.at("detector");
    read_into(d, "kind", c.detector.kind);
    read_into(d, "gazetteer", c.detector.gazetteer);
  }
  if (j.contains("retrieval")) {
    const auto& r = j.at("retrieval");
    read_into(r, "top_g", c.retrieval.top_g);
    read_into(r, "top_w", c.retrieval.top_w);
    read_into(r, "top_r", c.retrieval.top_r);
    read_into(r, "k_clusters", c.retrieval.k_clusters);
    read_into(r, "blocked_domains", c.retrieval.blocked_domains);
    read_into(r, "annotation_patterns", c.retrieval.annotation_patterns);
  }
  if (j.contains("wiki")) {
    const auto& w = j.at("wiki");
    read_into(w, "enabled", c.wiki.enabled);
    read_into(w, "index", c.wiki.index);
    read_into(w, "corpus", c.wiki.corpus);
  }
  if (j.contains("corpus")) {
    const auto& s = j.at("corpus");
    read_into(s, "enabled", c.corpus.enabled);
    read_into(s, "index", c.corpus.index);
    read_into(s, "local_doc", c.corpus.local_doc);
  }
  if (j.contains("internet")) {
    const auto& i = j.at("internet");
    read_into(i, "enabled", c.internet.enabled);
    read_into(i, "mode", c.internet.mode);
    read_into(i, "endpoint", c.internet.endpoint);
    read_into(i, "api_key_env", c.internet.api_key_env);
    read_into(i, "fixture", c.internet.fixture);
    read_into(i, "max_in_flight", c.internet.max_in_flight);
    read_into(i, "min_interval_ms", c.internet.min_interval_ms);
    read_into(i, "max_retries", c.internet.max_retries);
  }
  if (j.contains("rerank")) {
    const auto& r = j.at("rerank");
    read_into(r, "strategy", c.rerank.strategy);
    read_into(r, "epsilon", c.rerank.epsilon);
    read_into(r, "top_n", c.rerank.top_n);
  }
  if (j.contains("tagger")) {
    const auto& t = j.at("tagger");
    read_into(t, "features", c.tagger.features);
    read_into(t, "window", c.tagger.window);
    read_into(t, "labels", c.tagger.labels);
    read_into(t, "budget", c.tagger.budget);
    read_into(t, "checkpoint", c.tagger.checkpoint);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    read_into(t, "epochs", c.train.epochs);
    read_into(t, "batch_size", c.train.batch_size);
    read_into(t, "accumulation", c.train.accumulation);
    read_into(t, "lr", c.train.lr);
    read_into(t, "beta1", c.train.beta1);
    read_into(t, "beta2", c.train.beta2);
    read_into(t, "epsilon", c.train.epsilon);
    read_into(t, "linear_decay", c.train.linear_decay);
    read_into(t, "shuffle_seed", c.train.shuffle_seed);
  }
  read_into(j, "model_seed", c.model_seed);
  read_into(j, "workers", c.workers);
  read_into(j, "fail_open", c.fail_open);
  return c;
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad config: ") + e.what());
  }
  return from_json(parsed);
}

std::string PipelineConfig::to_json_text() const {
  return to_json(*this).dump(2) + "\n";
}

Pipeline::Pipeline(PipelineConfig config, bool offline)
    : config_(std::move(config)) {
  if (config_.encoder.kind == "hash") {
    encoder_ = std::make_unique<HashNgramEncoder>(config_.encoder.dim);
  } else if (config_.encoder.kind == "file") {
    encoder_ = FileStoreEncoder::load(config_.encoder.store,
                                      config_.encoder.hash_fallback);
  } else {
    throw DataError("unknown encoder kind: " + config_.encoder.kind);
  }

  if (config_.tagger.features == "windowed") {
    features_ = std::make_unique<WindowedEmbeddingFeatures>(
        *encoder_, config_.tagger.window);
  } else if (config_.tagger.features == "token") {
    features_ = std::make_unique<TokenEmbeddingFeatures>(*encoder_);
  } else {
    throw DataError("unknown feature provider: " + config_.tagger.features);
  }

  if (config_.detector.kind == "gazetteer") {
    gazetteer_ = Gazetteer::from_file(config_.detector.gazetteer);
  } else if (config_.detector.kind != "gold" && config_.detector.kind != "none") {
    throw DataError("unknown detector kind: " + config_.detector.kind);
  }

  if (config_.wiki.enabled) {
    if (!config_.wiki.index.empty()) {
      wiki_index_ = WikiIndex::load_file(config_.wiki.index);
    } else if (!config_.wiki.corpus.empty()) {
      wiki_index_ = WikiIndex::build_from_jsonl_file(config_.wiki.corpus);
    } else {
      throw DataError("wiki backend enabled but no index or corpus given");
    }
  }
  if (config_.corpus.enabled) {
    if (config_.corpus.index.empty()) {
      throw DataError("corpus backend enabled but no index given");
    }
    corpus_index_ = CorpusIndex::load_file(config_.corpus.index);
  }
  if (config_.internet.enabled && !offline) {
    if (config_.internet.mode == "fixture") {
      internet_client_ =
          std::make_shared<FixtureSearchClient>(config_.internet.fixture);
    } else if (config_.internet.mode == "http") {
      HttpClientConfig http;
      http.endpoint = config_.internet.endpoint;
      http.api_key_env = config_.internet.api_key_env;
      http.max_in_flight = config_.internet.max_in_flight;
      http.min_interval =
          std::chrono::milliseconds(config_.internet.min_interval_ms);
      http.max_retries = config_.internet.max_retries;
      internet_client_ = std::make_shared<HttpSearchClient>(std::move(http));
    } else {
      throw DataError("unknown internet mode: " + config_.internet.mode);
    }
  }
}

AlphaStrategy Pipeline::strategy() const {
  return alpha_strategy_from_string(config_.rerank.strategy,
                                    config_.rerank.epsilon);
}

LocalSentence Pipeline::detect(const ConllSentence& sentence,
                               bool gold_mentions) const {
  bool use_gold = gold_mentions || config_.detector.kind == "gold";
  LocalSentence local = to_local_sentence(sentence, use_gold);
  if (!use_gold && gazetteer_.has_value()) {
    local.mentions = detect_mentions(local, *gazetteer_);
  }
  return local;
}

std::vector<ReferenceSentence> Pipeline::retrieve(
    const LocalSentence& local) const {
  std::vector<ReferenceSentence> pooled;
  std::string local_text = join_tokens(local.tokens);

  auto collect = [&](auto&& search, const char* backend) {
    try {
      auto results = search();
      pooled.insert(pooled.end(), results.begin(), results.end());
    } catch (const BackendError& e) {
      if (!config_.fail_open) throw;
      std::cerr << "warning: " << backend << " backend failed: " << e.what()
                << "\n";
    }
  };

  for (const auto& query : generate_queries(local)) {
    if (internet_client_) {
      collect(
          [&] {
            return internet_search(query, config_.retrieval, *internet_client_);
          },
          "internet");
    }
    if (wiki_index_) {
      collect([&] { return search_wiki(*wiki_index_, query,
                                       config_.retrieval.top_w); },
              "wikipedia");
    }
    if (corpus_index_) {
      collect(
          [&] {
            return search_corpus(*corpus_index_, config_.corpus.local_doc,
                                 query, config_.retrieval.top_r, local_text);
          },
          "source-corpus");
    }
  }
  return merge_dedup(pooled);
}

std::vector<ScoredReference> Pipeline::rerank(
    const LocalSentence& local,
    const std::vector<ReferenceSentence>& candidates) const {
  return rank_and_select(local, candidates, strategy(), config_.rerank.top_n,
                         *encoder_);
}

AssembledInput Pipeline::assemble(
    const LocalSentence& local,
    const std::vector<ScoredReference>& selected) const {
  return assemble_masked_input(local, selected, config_.tagger.budget);
}

Pipeline::SentenceOutput Pipeline::process(const ConllSentence& sentence,
                                           const CrfModel& model,
                                           bool gold_mentions) const {
  LocalSentence local = detect(sentence, gold_mentions);
  auto selected = rerank(local, retrieve(local));
  auto input = assemble(local, selected);
  auto labels = viterbi_decode(model, input, *features_);
  return {{sentence.tokens, std::move(labels)}, std::move(selected)};
}

std::vector<Pipeline::SentenceOutput> Pipeline::run(
    const std::vector<ConllSentence>& input, const CrfModel& model,
    bool gold_mentions) const {
  std::vector<SentenceOutput> outputs(input.size());
  std::size_t workers = std::max<std::size_t>(1, config_.workers);
  workers = std::min(workers, input.size() ? input.size() : std::size_t{1});
  if (workers <= 1) {
    for (std::size_t i = 0; i < input.size(); ++i) {
      outputs[i] = process(input[i], model, gold_mentions);
    }
    return outputs;
  }

  std::atomic<std::size_t> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = cursor.fetch_add(1);
      if (i >= input.size()) return;
      try {
        outputs[i] = process(input[i], model, gold_mentions);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return outputs;
}

std::vector<TrainExample> Pipeline::build_examples(
    const std::vector<ConllSentence>& input, bool with_context,
    bool gold_mentions) const {
  std::vector<TrainExample> examples;
  examples.reserve(input.size());
  for (const auto& sentence : input) {
    LocalSentence local = detect(sentence, gold_mentions);
    std::vector<ScoredReference> selected;
    if (with_context) selected = rerank(local, retrieve(local));
    examples.push_back({assemble(local, selected), sentence.labels});
  }
  return examples;
}

void write_reference_dump(
    std::ostream& out, const std::vector<Pipeline::SentenceOutput>& outputs) {
  for (std::size_t s = 0; s < outputs.size(); ++s) {
    for (std::size_t r = 0; r < outputs[s].selected.size(); ++r) {
      const auto& scored = outputs[s].selected[r];
      out << json{{"sentence", s},
                  {"rank", r},
                  {"score", scored.score},
                  {"strategy", to_string(scored.strategy_used)},
                  {"source", to_string(scored.reference.source.kind)},
                  {"backend", scored.reference.source.backend},
                  {"text", scored.reference.raw_text}}
                 .dump()
          << '\n';
    }
  }
}

std::vector<ConllSentence> predictions_of(
    const std::vector<Pipeline::SentenceOutput>& outputs) {
  std::vector<ConllSentence> predictions;
  predictions.reserve(outputs.size());
  for (const auto& output : outputs) predictions.push_back(output.prediction);
  return predictions;
}

}  // namespace globalner
