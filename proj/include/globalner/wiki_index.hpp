#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "globalner/query.hpp"
#include "globalner/retrieval.hpp"
#include "globalner/types.hpp"

namespace globalner {

// In-memory inverted index over paragraphs with BM25 ranking
// (k1 = 1.2, b = 0.75, idf = ln(1 + (N - df + 0.5) / (df + 0.5))).
class WikiIndex {
 public:
  struct Doc {
    std::string id;
    std::string text;
    std::size_t length = 0;  // token count
  };
  struct Posting {
    std::size_t doc = 0;  // index into docs()
    std::size_t tf = 0;
  };
  struct Hit {
    std::size_t doc = 0;
    double score = 0.0;
  };

  // Throws DataError on an empty corpus.
  static WikiIndex build(const std::vector<std::pair<std::string, std::string>>& paragraphs);

  // Line-delimited JSON records {"id": ..., "text": ...}.
  static WikiIndex build_from_jsonl(std::istream& in);
  static WikiIndex build_from_jsonl_file(const std::string& path);

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static WikiIndex load(std::istream& in);
  static WikiIndex load_file(const std::string& path);

  // BM25-scored documents for the query's unique terms, best first,
  // positive scores only. Ties broken by lower document index.
  std::vector<Hit> search_bm25(const std::string& query_text,
                               std::size_t top_k) const;

  const std::vector<Doc>& docs() const { return docs_; }
  std::size_t doc_frequency(const std::string& term) const;
  const std::vector<Posting>* postings(const std::string& term) const;
  double average_doc_length() const { return avg_len_; }

 private:
  std::vector<Doc> docs_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  double avg_len_ = 0.0;
};

class WikiBackend : public SearchBackend {
 public:
  explicit WikiBackend(const WikiIndex& index) : index_(&index) {}
  SourceTag source() const override {
    return {SourceKind::wikipedia, "wiki-bm25"};
  }
  std::vector<ReferenceSentence> search(const Query& query,
                                        std::size_t top_k) const override;

 private:
  const WikiIndex* index_;
};

std::vector<ReferenceSentence> search_wiki(const WikiIndex& index,
                                           const Query& query,
                                           std::size_t top_w);

}  // namespace globalner
