#include "globalner/encoder.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "globalner/errors.hpp"
#include "globalner/text.hpp"

namespace globalner {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

void l2_normalize(std::span<double> v) {
  double norm_sq = 0.0;
  for (double x : v) norm_sq += x * x;
  if (norm_sq <= 0.0) return;
  double inv = 1.0 / std::sqrt(norm_sq);
  for (double& x : v) x *= inv;
}

}  // namespace

std::vector<double> hash_ngram_encode(const Token& token, std::size_t dim) {
  if (dim < 8) throw std::invalid_argument("hash_ngram_encode: dim must be >= 8");
  // Boundary markers guarantee at least one n-gram for 1-char tokens.
  std::string padded = "^" + lowercase_ascii(token.text) + "$";
  std::vector<double> v(dim, 0.0);
  for (std::size_t n = 2; n <= 4; ++n) {
    if (padded.size() < n) break;
    for (std::size_t i = 0; i + n <= padded.size(); ++i) {
      std::uint64_t h = fnv1a(std::string_view(padded).substr(i, n));
      double sign = (h & 0x8000000000000000ULL) ? -1.0 : 1.0;
      v[h % dim] += sign;
    }
  }
  double norm_sq = 0.0;
  for (double x : v) norm_sq += x * x;
  if (norm_sq <= 0.0) {
    // All signed counts cancelled; pin a single bucket so the row stays unit.
    v[fnv1a(padded) % dim] = 1.0;
    return v;
  }
  l2_normalize(v);
  return v;
}

HashNgramEncoder::HashNgramEncoder(std::size_t dim)
    : name_("hash-ngram"), dim_(dim) {
  if (dim < 8) throw std::invalid_argument("HashNgramEncoder: dim must be >= 8");
}

std::span<const double> HashNgramEncoder::cached_vector(
    const std::string& lower) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = cache_.find(lower);
  if (it == cache_.end()) {
    Token t{lower, 0, lower.size()};
    it = cache_.emplace(lower, hash_ngram_encode(t, dim_)).first;
  }
  return {it->second.data(), dim_};
}

EmbeddingMatrix HashNgramEncoder::encode(
    const std::vector<Token>& tokens) const {
  if (tokens.empty()) throw DataError("empty sentence");
  EmbeddingMatrix m{tokens.size(), dim_, std::vector<double>(tokens.size() * dim_)};
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto v = cached_vector(lowercase_ascii(tokens[i].text));
    std::copy(v.begin(), v.end(), m.row(i).begin());
  }
  return m;
}

FileStoreEncoder::FileStoreEncoder(std::istream& in, bool hash_fallback,
                                   std::string name)
    : name_(std::move(name)), hash_fallback_(hash_fallback) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError("embedding store line " + std::to_string(line_no) +
                      ": expected token<TAB>values");
    }
    std::string token = line.substr(0, tab);
    std::istringstream values(line.substr(tab + 1));
    std::vector<double> row;
    double x;
    while (values >> x) row.push_back(x);
    if (row.empty()) {
      throw DataError("embedding store line " + std::to_string(line_no) +
                      ": no values");
    }
    if (dim_ == 0) dim_ = row.size();
    if (row.size() != dim_) {
      throw DataError("embedding store line " + std::to_string(line_no) +
                      ": dimension mismatch");
    }
    double norm_sq = 0.0;
    for (double r : row) norm_sq += r * r;
    if (norm_sq <= 0.0) {
      throw DataError("embedding store line " + std::to_string(line_no) +
                      ": zero vector for token '" + token + "'");
    }
    l2_normalize(row);
    store_[token] = std::move(row);
  }
  if (store_.empty()) throw DataError("embedding store is empty");
}

std::unique_ptr<FileStoreEncoder> FileStoreEncoder::load(
    const std::string& path, bool hash_fallback) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding store: " + path);
  return std::make_unique<FileStoreEncoder>(in, hash_fallback,
                                            "file:" + path);
}

EmbeddingMatrix FileStoreEncoder::encode(
    const std::vector<Token>& tokens) const {
  if (tokens.empty()) throw DataError("empty sentence");
  EmbeddingMatrix m{tokens.size(), dim_, std::vector<double>(tokens.size() * dim_)};
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = store_.find(tokens[i].text);
    if (it == store_.end()) {
      if (!hash_fallback_) {
        throw DataError("embedding store has no vector for token '" +
                        tokens[i].text + "'");
      }
      auto v = hash_ngram_encode(tokens[i], dim_);
      std::copy(v.begin(), v.end(), m.row(i).begin());
      continue;
    }
    std::copy(it->second.begin(), it->second.end(), m.row(i).begin());
  }
  return m;
}

}  // namespace globalner
