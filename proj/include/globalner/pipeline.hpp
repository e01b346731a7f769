#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "globalner/conll.hpp"
#include "globalner/corpus_index.hpp"
#include "globalner/crf.hpp"
#include "globalner/encoder.hpp"
#include "globalner/features.hpp"
#include "globalner/gazetteer.hpp"
#include "globalner/internet.hpp"
#include "globalner/reranker.hpp"
#include "globalner/retrieval.hpp"
#include "globalner/train.hpp"
#include "globalner/wiki_index.hpp"

namespace globalner {

struct EncoderConfig {
  std::string kind = "hash";  // hash | file
  std::size_t dim = 64;
  std::string store;          // embedding store path for kind == file
  bool hash_fallback = false;
};

struct DetectorConfig {
  std::string kind = "gazetteer";  // gazetteer | gold | none
  std::string gazetteer;
};

struct WikiBackendConfig {
  bool enabled = false;
  std::string index;   // saved index file
  std::string corpus;  // or raw JSONL corpus to build from
};

struct CorpusBackendConfig {
  bool enabled = false;
  std::string index;
  std::string local_doc;  // document the tagged sentences belong to
};

struct InternetBackendConfig {
  bool enabled = false;
  std::string mode = "fixture";  // fixture | http
  std::string endpoint;
  std::string api_key_env = "SEARCH_API_KEY";
  std::string fixture;
  std::size_t max_in_flight = 4;
  int min_interval_ms = 0;
  std::size_t max_retries = 2;
};

struct RerankConfig {
  std::string strategy = "soft";
  double epsilon = 1e-6;
  std::size_t top_n = 6;
};

struct TaggerConfig {
  std::string features = "windowed";  // windowed | token
  std::size_t window = 3;
  std::vector<std::string> labels{"O", "B", "I"};
  std::size_t budget = kDefaultLengthBudget;
  std::string checkpoint;
};

struct PipelineConfig {
  EncoderConfig encoder;
  DetectorConfig detector;
  RetrievalConfig retrieval;
  WikiBackendConfig wiki;
  CorpusBackendConfig corpus;
  InternetBackendConfig internet;
  RerankConfig rerank;
  TaggerConfig tagger;
  TrainConfig train;
  std::uint64_t model_seed = 1;
  std::size_t workers = 1;
  bool fail_open = true;

  static PipelineConfig load(const std::string& path);
  static PipelineConfig from_json_text(const std::string& text);
  std::string to_json_text() const;  // all fields, defaults included
};

// Loads every resource the config names and runs the five stages. Offline
// mode drops the internet backend regardless of config.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config, bool offline = false);

  struct SentenceOutput {
    ConllSentence prediction;
    std::vector<ScoredReference> selected;
  };

  LocalSentence detect(const ConllSentence& sentence,
                       bool gold_mentions) const;
  std::vector<ReferenceSentence> retrieve(const LocalSentence& local) const;
  std::vector<ScoredReference> rerank(
      const LocalSentence& local,
      const std::vector<ReferenceSentence>& candidates) const;
  AssembledInput assemble(const LocalSentence& local,
                          const std::vector<ScoredReference>& selected) const;

  SentenceOutput process(const ConllSentence& sentence, const CrfModel& model,
                         bool gold_mentions) const;

  // Bounded worker pool; outputs ordered by input index.
  std::vector<SentenceOutput> run(const std::vector<ConllSentence>& input,
                                  const CrfModel& model,
                                  bool gold_mentions) const;

  // Assembled (optionally context-enriched) training examples with gold
  // labels from the dataset.
  std::vector<TrainExample> build_examples(
      const std::vector<ConllSentence>& input, bool with_context,
      bool gold_mentions) const;

  const Encoder& encoder() const { return *encoder_; }
  const FeatureProvider& features() const { return *features_; }
  const PipelineConfig& config() const { return config_; }
  AlphaStrategy strategy() const;

 private:
  PipelineConfig config_;
  std::unique_ptr<Encoder> encoder_;
  std::unique_ptr<FeatureProvider> features_;
  std::optional<Gazetteer> gazetteer_;
  std::optional<WikiIndex> wiki_index_;
  std::optional<CorpusIndex> corpus_index_;
  std::shared_ptr<const SearchClient> internet_client_;
};

// JSONL dump of the selected references, one record per (sentence, rank).
void write_reference_dump(std::ostream& out,
                          const std::vector<Pipeline::SentenceOutput>& outputs);

std::vector<ConllSentence> predictions_of(
    const std::vector<Pipeline::SentenceOutput>& outputs);

}  // namespace globalner
