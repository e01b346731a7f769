#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "globalner/types.hpp"

namespace globalner {

// Row-major matrix of per-token embedding rows, each L2-normalized.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
  std::span<double> row(std::size_t i) {
    return {values.data() + i * dim, dim};
  }
};

// Contract for per-token embedding producers. encode() must be a pure
// function of the token texts and safe to call concurrently.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual const std::string& name() const = 0;
  virtual std::size_t dim() const = 0;

  // Throws DataError on an empty token list.
  virtual EmbeddingMatrix encode(const std::vector<Token>& tokens) const = 0;
};

// Hashed character n-gram vector for one token: the lowercased text is
// wrapped in boundary markers, its n-grams (n = 2..4) are hashed into dim
// buckets with a sign bit, and the result is L2-normalized. dim must be >= 8.
std::vector<double> hash_ngram_encode(const Token& token, std::size_t dim);

// Offline reference encoder: context-free, deterministic, cached per token.
class HashNgramEncoder : public Encoder {
 public:
  explicit HashNgramEncoder(std::size_t dim = 64);

  const std::string& name() const override { return name_; }
  std::size_t dim() const override { return dim_; }
  EmbeddingMatrix encode(const std::vector<Token>& tokens) const override;

 private:
  std::span<const double> cached_vector(const std::string& lower) const;

  std::string name_;
  std::size_t dim_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::string, std::vector<double>> cache_;
};

// File-backed store of externally computed vectors, one record per line:
//   token<TAB>v1 v2 ... vd
// Rows are re-normalized on load. Unknown tokens either fall back to the
// hash encoder (same dim) or raise DataError, depending on hash_fallback.
class FileStoreEncoder : public Encoder {
 public:
  FileStoreEncoder(std::istream& in, bool hash_fallback = false,
                   std::string name = "file-store");
  static std::unique_ptr<FileStoreEncoder> load(const std::string& path,
                                                bool hash_fallback = false);

  const std::string& name() const override { return name_; }
  std::size_t dim() const override { return dim_; }
  EmbeddingMatrix encode(const std::vector<Token>& tokens) const override;

 private:
  std::string name_;
  std::size_t dim_ = 0;
  bool hash_fallback_;
  std::unordered_map<std::string, std::vector<double>> store_;
};

}  // namespace globalner
