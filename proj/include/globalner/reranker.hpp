#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "globalner/encoder.hpp"
#include "globalner/types.hpp"

namespace globalner {

// How per-token importance weights are formed when scoring a reference.
//   equal: all ones (plain recall)
//   hard:  1 on mention tokens, 0 elsewhere
//   soft:  -ln(1 - m_i + epsilon), m_i the token's best similarity to any
//          mention token (clamped to [-1, 1] first)
struct AlphaStrategy {
  enum class Kind { equal, hard, soft };
  Kind kind = Kind::soft;
  double epsilon = 1e-6;

  static AlphaStrategy equal() { return {Kind::equal, 1e-6}; }
  static AlphaStrategy hard() { return {Kind::hard, 1e-6}; }
  static AlphaStrategy soft(double eps = 1e-6) { return {Kind::soft, eps}; }
};

AlphaStrategy alpha_strategy_from_string(const std::string& name,
                                         double epsilon = 1e-6);
const char* to_string(AlphaStrategy::Kind kind);

// Pairwise inner products of unit-norm rows: entry (i, j) = local_i . ref_j.
struct SimilarityMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

// Throws DataError on dimension mismatch or empty input.
SimilarityMatrix similarity_matrix(const EmbeddingMatrix& local,
                                   const EmbeddingMatrix& reference);

// Largest value along each row.
std::vector<double> max_pool_rows(const SimilarityMatrix& m);

// Importance weights per local token. hard/soft require a non-empty mention
// list (DataError "no mentions" otherwise; callers fall back to equal).
std::vector<double> alpha_weights(const EmbeddingMatrix& local,
                                  const std::vector<MentionSpan>& mentions,
                                  const AlphaStrategy& strategy);

// Weighted recall: sum_i alpha_i * max_j sim(i, j) / sum_i alpha_i.
// Throws DataError "degenerate weights" when sum alpha <= 0.
double mention_recall(const EmbeddingMatrix& local,
                      const EmbeddingMatrix& reference,
                      const std::vector<double>& alpha);

struct BertScore {
  double recall = 0.0;     // row-wise max, averaged
  double precision = 0.0;  // column-wise max, averaged
  double f1 = 0.0;         // 0 when precision + recall == 0
};

BertScore bertscore(const EmbeddingMatrix& local,
                    const EmbeddingMatrix& reference);

enum class ScoreStrategy { equal, hard, soft, fallback };
const char* to_string(ScoreStrategy strategy);

struct ScoredReference {
  ReferenceSentence reference;
  double score = 0.0;
  ScoreStrategy strategy_used = ScoreStrategy::fallback;
};

// Scores every candidate against the local sentence — mention-weighted
// recall when the sentence has mentions, plain recall otherwise — then
// returns the top_n best. Ties break by source trust, then input order.
std::vector<ScoredReference> rank_and_select(
    const LocalSentence& local, const std::vector<ReferenceSentence>& candidates,
    const AlphaStrategy& strategy, std::size_t top_n, const Encoder& encoder);

}  // namespace globalner
