#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "globalner/query.hpp"
#include "globalner/retrieval.hpp"
#include "globalner/types.hpp"

namespace globalner {

// Sparse vector entries sorted by term id.
using SparseVec = std::vector<std::pair<std::uint32_t, double>>;

struct TfidfResult {
  std::vector<SparseVec> vectors;        // one per document, L2-normalized
  std::vector<std::string> vocabulary;   // term id -> term
  std::vector<double> idf;               // per term id
};

// weight(t, d) = tf(t, d) * idf(t) with idf(t) = ln((1+N)/(1+df(t))) + 1,
// each document vector L2-normalized. Term ids follow first appearance.
TfidfResult tfidf_vectorize(const std::vector<std::vector<std::string>>& docs);

struct KMeansResult {
  std::vector<std::vector<double>> centroids;  // dense, size = effective k
  std::vector<std::size_t> assignment;         // per input vector
  std::vector<double> objective_history;       // WCSS after each assignment
  std::size_t iterations = 0;
};

// Lloyd iterations from a k-means++ style seeded start. Stops when
// assignments are stable or max_iters is reached; an emptied cluster is
// reseeded with the point farthest from its centroid. For k > N every
// point gets its own cluster and the surplus centroids are dropped.
KMeansResult kmeans(const std::vector<SparseVec>& vectors, std::size_t dim,
                    std::size_t k, std::uint64_t seed,
                    std::size_t max_iters = 50);

struct CorpusSentence {
  std::size_t id = 0;  // global, assigned at build time
  std::string doc_id;
  std::string text;
  std::vector<std::string> terms;  // lowercased tokens
};

// Unique-token recall of the query against each sentence, ties broken by
// shorter sentence then lower id; only positive scores are returned.
std::vector<ReferenceSentence> partial_match_search(
    const std::vector<const CorpusSentence*>& sentences, const Query& query,
    std::size_t top_r, const std::string& backend_name = "as-retrieval");

// Document-clustered sentence store for the two-stage source-corpus search:
// stage 1 picks the cluster of the querying document, stage 2 runs the
// partial matcher inside it.
class CorpusIndex {
 public:
  struct DocRecord {
    std::string id;
    std::vector<std::string> sentences;
  };

  static CorpusIndex build(const std::vector<DocRecord>& docs, std::size_t k,
                           std::uint64_t seed);

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static CorpusIndex load(std::istream& in);
  static CorpusIndex load_file(const std::string& path);

  bool has_doc(const std::string& doc_id) const;
  std::size_t cluster_of(const std::string& doc_id) const;  // throws DataError
  std::vector<const CorpusSentence*> cluster_sentences(std::size_t cluster) const;
  const std::vector<CorpusSentence>& sentences() const { return sentences_; }
  std::size_t num_clusters() const { return num_clusters_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<SparseVec>& doc_vectors() const { return doc_vectors_; }
  const std::vector<std::vector<double>>& centroids() const { return centroids_; }

 private:
  std::vector<CorpusSentence> sentences_;
  std::vector<std::string> doc_order_;
  std::unordered_map<std::string, std::size_t> doc_pos_;
  std::vector<std::size_t> doc_cluster_;
  std::vector<SparseVec> doc_vectors_;
  std::vector<std::vector<double>> centroids_;
  std::size_t num_clusters_ = 0;
  std::uint64_t seed_ = 0;
};

// Two-stage search. local_text is the sentence being tagged; it is excluded
// from the results (matched by normalized text within its own document).
// Throws DataError for an unknown doc id.
std::vector<ReferenceSentence> search_corpus(const CorpusIndex& index,
                                             const std::string& local_doc_id,
                                             const Query& query,
                                             std::size_t top_r,
                                             const std::string& local_text);

class CorpusBackend : public SearchBackend {
 public:
  CorpusBackend(const CorpusIndex& index, std::string local_doc_id,
                std::string local_text)
      : index_(&index),
        local_doc_id_(std::move(local_doc_id)),
        local_text_(std::move(local_text)) {}

  SourceTag source() const override {
    return {SourceKind::source_corpus, "as-retrieval"};
  }
  std::vector<ReferenceSentence> search(const Query& query,
                                        std::size_t top_k) const override;

 private:
  const CorpusIndex* index_;
  std::string local_doc_id_;
  std::string local_text_;
};

}  // namespace globalner
