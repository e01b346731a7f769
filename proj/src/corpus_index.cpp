#include "globalner/corpus_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

#include <json.hpp>

#include "globalner/errors.hpp"
#include "globalner/rng.hpp"
#include "globalner/text.hpp"

namespace globalner {

TfidfResult tfidf_vectorize(const std::vector<std::vector<std::string>>& docs) {
  if (docs.empty()) throw DataError("tfidf_vectorize: no documents");
  TfidfResult result;
  std::unordered_map<std::string, std::uint32_t> term_id;
  std::vector<std::size_t> df;
  std::vector<std::unordered_map<std::uint32_t, std::size_t>> counts(docs.size());

  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& term : docs[d]) {
      auto [it, inserted] = term_id.emplace(
          term, static_cast<std::uint32_t>(result.vocabulary.size()));
      if (inserted) {
        result.vocabulary.push_back(term);
        df.push_back(0);
      }
      auto [cit, first_in_doc] = counts[d].emplace(it->second, 0);
      if (first_in_doc) ++df[it->second];
      ++cit->second;
    }
  }

  const double n = static_cast<double>(docs.size());
  result.idf.resize(result.vocabulary.size());
  for (std::size_t t = 0; t < result.idf.size(); ++t) {
    result.idf[t] =
        std::log((1.0 + n) / (1.0 + static_cast<double>(df[t]))) + 1.0;
  }

  result.vectors.resize(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    SparseVec vec;
    vec.reserve(counts[d].size());
    for (const auto& [t, tf] : counts[d]) {
      vec.emplace_back(t, static_cast<double>(tf) * result.idf[t]);
    }
    std::sort(vec.begin(), vec.end());
    double norm_sq = 0.0;
    for (const auto& [t, w] : vec) norm_sq += w * w;
    if (norm_sq > 0.0) {
      double inv = 1.0 / std::sqrt(norm_sq);
      for (auto& [t, w] : vec) w *= inv;
    }
    result.vectors[d] = std::move(vec);
  }
  return result;
}

namespace {

double norm_sq_sparse(const SparseVec& v) {
  double s = 0.0;
  for (const auto& [t, w] : v) s += w * w;
  return s;
}

double dot_sparse_dense(const SparseVec& v, const std::vector<double>& c) {
  double s = 0.0;
  for (const auto& [t, w] : v) s += w * c[t];
  return s;
}

// ||v - c||^2 given precomputed ||v||^2 and ||c||^2.
double dist_sq(const SparseVec& v, double v_norm_sq,
               const std::vector<double>& c, double c_norm_sq) {
  return std::max(0.0, v_norm_sq - 2.0 * dot_sparse_dense(v, c) + c_norm_sq);
}

}  // namespace

KMeansResult kmeans(const std::vector<SparseVec>& vectors, std::size_t dim,
                    std::size_t k, std::uint64_t seed,
                    std::size_t max_iters) {
  if (vectors.empty()) throw DataError("kmeans: no vectors");
  if (k == 0) throw DataError("kmeans: k must be >= 1");
  const std::size_t n = vectors.size();

  KMeansResult result;
  if (k >= n) {
    // Every point its own cluster; surplus centroids dropped.
    result.assignment.resize(n);
    result.centroids.assign(n, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      result.assignment[i] = i;
      for (const auto& [t, w] : vectors[i]) result.centroids[i][t] = w;
    }
    result.objective_history.push_back(0.0);
    return result;
  }

  std::vector<double> point_norm_sq(n);
  for (std::size_t i = 0; i < n; ++i) point_norm_sq[i] = norm_sq_sparse(vectors[i]);

  // k-means++ style seeding.
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> centroids;
  std::vector<double> centroid_norm_sq;
  auto add_centroid = [&](std::size_t i) {
    std::vector<double> c(dim, 0.0);
    for (const auto& [t, w] : vectors[i]) c[t] = w;
    centroid_norm_sq.push_back(point_norm_sq[i]);
    centroids.push_back(std::move(c));
  };
  add_centroid(rand_index(rng, n));
  std::vector<double> best_dist(n, std::numeric_limits<double>::infinity());
  while (centroids.size() < k) {
    const auto& c = centroids.back();
    double c_norm = centroid_norm_sq.back();
    for (std::size_t i = 0; i < n; ++i) {
      best_dist[i] = std::min(best_dist[i],
                              dist_sq(vectors[i], point_norm_sq[i], c, c_norm));
    }
    double total = 0.0;
    for (double d : best_dist) total += d;
    // All remaining points coincide with chosen centroids: pick uniformly.
    std::size_t next = total > 0.0 ? rand_weighted(rng, best_dist)
                                   : rand_index(rng, n);
    add_centroid(next);
  }

  std::vector<std::size_t> assignment(n, 0);
  std::vector<std::size_t> prev_assignment;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    // Assignment step.
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_c = 0;
      for (std::size_t c = 0; c < centroids.size(); ++c) {
        double d = dist_sq(vectors[i], point_norm_sq[i], centroids[c],
                           centroid_norm_sq[c]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      assignment[i] = best_c;
      objective += best;
    }
    result.objective_history.push_back(objective);
    result.iterations = iter + 1;
    if (assignment == prev_assignment) break;
    prev_assignment = assignment;

    // Update step: centroids become cluster means.
    std::vector<std::size_t> sizes(centroids.size(), 0);
    for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ++sizes[assignment[i]];
      for (const auto& [t, w] : vectors[i]) centroids[assignment[i]][t] += w;
    }
    std::vector<std::size_t> empty_clusters;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      if (sizes[c] == 0) {
        empty_clusters.push_back(c);
        continue;
      }
      double inv = 1.0 / static_cast<double>(sizes[c]);
      double norm_sq = 0.0;
      for (double& x : centroids[c]) {
        x *= inv;
        norm_sq += x * x;
      }
      centroid_norm_sq[c] = norm_sq;
    }
    // Reseed emptied clusters with the point farthest from its own
    // (already updated) centroid. A point's home cluster is never empty.
    for (std::size_t c : empty_clusters) {
      double far_dist = -1.0;
      std::size_t far_i = 0;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t home = assignment[i];
        double d = dist_sq(vectors[i], point_norm_sq[i], centroids[home],
                           centroid_norm_sq[home]);
        if (d > far_dist) {
          far_dist = d;
          far_i = i;
        }
      }
      std::fill(centroids[c].begin(), centroids[c].end(), 0.0);
      for (const auto& [t, w] : vectors[far_i]) centroids[c][t] = w;
      centroid_norm_sq[c] = point_norm_sq[far_i];
    }
  }

  result.centroids = std::move(centroids);
  result.assignment = std::move(assignment);
  return result;
}

std::vector<ReferenceSentence> partial_match_search(
    const std::vector<const CorpusSentence*>& sentences, const Query& query,
    std::size_t top_r, const std::string& backend_name) {
  std::unordered_set<std::string> query_terms;
  for (auto& term : index_terms(query.text)) query_terms.insert(std::move(term));
  if (query_terms.empty()) return {};

  struct Scored {
    const CorpusSentence* sentence;
    double score;
  };
  std::vector<Scored> scored;
  for (const CorpusSentence* sentence : sentences) {
    std::unordered_set<std::string> present;
    for (const auto& term : sentence->terms) {
      if (query_terms.count(term)) present.insert(term);
    }
    if (present.empty()) continue;
    scored.push_back({sentence, static_cast<double>(present.size()) /
                                    static_cast<double>(query_terms.size())});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.sentence->terms.size() != b.sentence->terms.size()) {
      return a.sentence->terms.size() < b.sentence->terms.size();
    }
    return a.sentence->id < b.sentence->id;
  });
  if (scored.size() > top_r) scored.resize(top_r);

  std::vector<ReferenceSentence> results;
  results.reserve(scored.size());
  for (const auto& [sentence, score] : scored) {
    results.push_back({tokenize(sentence->text),
                       {SourceKind::source_corpus, backend_name},
                       query.text,
                       sentence->text});
  }
  return results;
}

CorpusIndex CorpusIndex::build(const std::vector<DocRecord>& docs,
                               std::size_t k, std::uint64_t seed) {
  if (docs.empty()) throw DataError("source corpus is empty");
  if (k == 0) throw DataError("k_clusters must be >= 1");
  CorpusIndex index;
  index.seed_ = seed;
  std::vector<std::vector<std::string>> doc_terms;
  for (const auto& doc : docs) {
    if (index.doc_pos_.count(doc.id)) {
      throw DataError("duplicate document id: " + doc.id);
    }
    index.doc_pos_[doc.id] = index.doc_order_.size();
    index.doc_order_.push_back(doc.id);
    std::vector<std::string> terms;
    for (const auto& sentence : doc.sentences) {
      auto sentence_terms = index_terms(sentence);
      terms.insert(terms.end(), sentence_terms.begin(), sentence_terms.end());
      index.sentences_.push_back({index.sentences_.size(), doc.id, sentence,
                                  std::move(sentence_terms)});
    }
    doc_terms.push_back(std::move(terms));
  }

  auto tfidf = tfidf_vectorize(doc_terms);
  auto clustering = kmeans(tfidf.vectors, tfidf.vocabulary.size(), k, seed);
  index.doc_vectors_ = std::move(tfidf.vectors);
  index.centroids_ = std::move(clustering.centroids);
  index.doc_cluster_ = std::move(clustering.assignment);
  index.num_clusters_ = index.centroids_.size();
  return index;
}

void CorpusIndex::save(std::ostream& out) const {
  nlohmann::json docs = nlohmann::json::array();
  for (std::size_t d = 0; d < doc_order_.size(); ++d) {
    nlohmann::json sentences = nlohmann::json::array();
    for (const auto& sentence : sentences_) {
      if (sentence.doc_id == doc_order_[d]) sentences.push_back(sentence.text);
    }
    docs.push_back({{"id", doc_order_[d]},
                    {"cluster", doc_cluster_[d]},
                    {"sentences", sentences}});
  }
  out << nlohmann::json{{"format", "globalner-corpus"},
                        {"version", 1},
                        {"k", num_clusters_},
                        {"seed", seed_},
                        {"docs", docs}}
             .dump()
      << '\n';
}

void CorpusIndex::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus index: " + path);
  save(out);
}

CorpusIndex CorpusIndex::load(std::istream& in) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad corpus index file: ") + e.what());
  }
  if (parsed.value("format", "") != "globalner-corpus") {
    throw DataError("not a corpus index file");
  }
  CorpusIndex index;
  index.seed_ = parsed.value("seed", 0ULL);
  index.num_clusters_ = parsed.at("k").get<std::size_t>();
  for (const auto& doc : parsed.at("docs")) {
    std::string id = doc.at("id").get<std::string>();
    index.doc_pos_[id] = index.doc_order_.size();
    index.doc_order_.push_back(id);
    index.doc_cluster_.push_back(doc.at("cluster").get<std::size_t>());
    for (const auto& text : doc.at("sentences")) {
      std::string sentence = text.get<std::string>();
      index.sentences_.push_back({index.sentences_.size(), id, sentence,
                                  index_terms(sentence)});
    }
  }
  if (index.doc_order_.empty()) throw DataError("corpus index has no documents");
  return index;
}

CorpusIndex CorpusIndex::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus index: " + path);
  return load(in);
}

bool CorpusIndex::has_doc(const std::string& doc_id) const {
  return doc_pos_.count(doc_id) > 0;
}

std::size_t CorpusIndex::cluster_of(const std::string& doc_id) const {
  auto it = doc_pos_.find(doc_id);
  if (it == doc_pos_.end()) {
    throw DataError("unknown document id: " + doc_id);
  }
  return doc_cluster_[it->second];
}

std::vector<const CorpusSentence*> CorpusIndex::cluster_sentences(
    std::size_t cluster) const {
  std::vector<const CorpusSentence*> members;
  for (const auto& sentence : sentences_) {
    auto it = doc_pos_.find(sentence.doc_id);
    if (it != doc_pos_.end() && doc_cluster_[it->second] == cluster) {
      members.push_back(&sentence);
    }
  }
  return members;
}

std::vector<ReferenceSentence> search_corpus(const CorpusIndex& index,
                                             const std::string& local_doc_id,
                                             const Query& query,
                                             std::size_t top_r,
                                             const std::string& local_text) {
  std::size_t cluster = index.cluster_of(local_doc_id);
  std::string local_key = normalize_for_dedup(local_text);
  std::vector<const CorpusSentence*> candidates;
  for (const CorpusSentence* sentence : index.cluster_sentences(cluster)) {
    if (sentence->doc_id == local_doc_id &&
        normalize_for_dedup(sentence->text) == local_key) {
      continue;  // never return the sentence being tagged
    }
    candidates.push_back(sentence);
  }
  return partial_match_search(candidates, query, top_r);
}

std::vector<ReferenceSentence> CorpusBackend::search(const Query& query,
                                                     std::size_t top_k) const {
  return search_corpus(*index_, local_doc_id_, query, top_k, local_text_);
}

}  // namespace globalner
