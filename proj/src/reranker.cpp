#include "globalner/reranker.hpp"

#include <algorithm>
#include <cmath>

#include "globalner/errors.hpp"

namespace globalner {

AlphaStrategy alpha_strategy_from_string(const std::string& name,
                                         double epsilon) {
  if (name == "equal") return AlphaStrategy::equal();
  if (name == "hard") return AlphaStrategy::hard();
  if (name == "soft") return AlphaStrategy::soft(epsilon);
  throw DataError("unknown alpha strategy: " + name);
}

const char* to_string(AlphaStrategy::Kind kind) {
  switch (kind) {
    case AlphaStrategy::Kind::equal: return "equal";
    case AlphaStrategy::Kind::hard: return "hard";
    case AlphaStrategy::Kind::soft: return "soft";
  }
  return "soft";
}

const char* to_string(ScoreStrategy strategy) {
  switch (strategy) {
    case ScoreStrategy::equal: return "equal";
    case ScoreStrategy::hard: return "hard";
    case ScoreStrategy::soft: return "soft";
    case ScoreStrategy::fallback: return "fallback";
  }
  return "fallback";
}

SimilarityMatrix similarity_matrix(const EmbeddingMatrix& local,
                                   const EmbeddingMatrix& reference) {
  if (local.dim != reference.dim) {
    throw DataError("similarity_matrix: dimension mismatch");
  }
  if (local.rows == 0 || reference.rows == 0) {
    throw DataError("similarity_matrix: empty matrix");
  }
  SimilarityMatrix m{local.rows, reference.rows,
                     std::vector<double>(local.rows * reference.rows)};
  for (std::size_t i = 0; i < local.rows; ++i) {
    auto a = local.row(i);
    for (std::size_t j = 0; j < reference.rows; ++j) {
      auto b = reference.row(j);
      double dot = 0.0;
      for (std::size_t d = 0; d < local.dim; ++d) dot += a[d] * b[d];
      m.values[i * reference.rows + j] = dot;
    }
  }
  return m;
}

std::vector<double> max_pool_rows(const SimilarityMatrix& m) {
  std::vector<double> maxima(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double best = m.at(i, 0);
    for (std::size_t j = 1; j < m.cols; ++j) best = std::max(best, m.at(i, j));
    maxima[i] = best;
  }
  return maxima;
}

std::vector<double> alpha_weights(const EmbeddingMatrix& local,
                                  const std::vector<MentionSpan>& mentions,
                                  const AlphaStrategy& strategy) {
  const std::size_t n = local.rows;
  if (strategy.kind == AlphaStrategy::Kind::equal) {
    return std::vector<double>(n, 1.0);
  }

  std::vector<std::size_t> mention_tokens;
  for (const auto& span : mentions) {
    if (span.token_end > n || span.token_start >= span.token_end) {
      throw DataError("alpha_weights: mention span out of bounds");
    }
    for (std::size_t i = span.token_start; i < span.token_end; ++i) {
      mention_tokens.push_back(i);
    }
  }
  if (mention_tokens.empty()) throw DataError("no mentions");

  std::vector<double> alpha(n, 0.0);
  if (strategy.kind == AlphaStrategy::Kind::hard) {
    for (std::size_t i : mention_tokens) alpha[i] = 1.0;
    return alpha;
  }

  // Soft: per token, best similarity to any mention token, log-sharpened.
  if (strategy.epsilon <= 0.0) {
    throw DataError("alpha_weights: soft epsilon must be > 0");
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto a = local.row(i);
    double best = -1.0;
    for (std::size_t j : mention_tokens) {
      auto b = local.row(j);
      double dot = 0.0;
      for (std::size_t d = 0; d < local.dim; ++d) dot += a[d] * b[d];
      best = std::max(best, dot);
    }
    best = std::clamp(best, -1.0, 1.0);
    alpha[i] = -std::log(1.0 - best + strategy.epsilon);
  }
  return alpha;
}

double mention_recall(const EmbeddingMatrix& local,
                      const EmbeddingMatrix& reference,
                      const std::vector<double>& alpha) {
  if (alpha.size() != local.rows) {
    throw DataError("mention_recall: alpha length mismatch");
  }
  auto maxima = max_pool_rows(similarity_matrix(local, reference));
  double weight_sum = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    weight_sum += alpha[i];
    weighted += alpha[i] * maxima[i];
  }
  if (weight_sum <= 0.0) throw DataError("degenerate weights");
  return weighted / weight_sum;
}

BertScore bertscore(const EmbeddingMatrix& local,
                    const EmbeddingMatrix& reference) {
  auto sim = similarity_matrix(local, reference);
  BertScore score;
  for (double m : max_pool_rows(sim)) score.recall += m;
  score.recall /= static_cast<double>(sim.rows);
  for (std::size_t j = 0; j < sim.cols; ++j) {
    double best = sim.at(0, j);
    for (std::size_t i = 1; i < sim.rows; ++i) best = std::max(best, sim.at(i, j));
    score.precision += best;
  }
  score.precision /= static_cast<double>(sim.cols);
  double pr = score.precision + score.recall;
  score.f1 = pr == 0.0 ? 0.0 : 2.0 * score.precision * score.recall / pr;
  return score;
}

std::vector<ScoredReference> rank_and_select(
    const LocalSentence& local, const std::vector<ReferenceSentence>& candidates,
    const AlphaStrategy& strategy, std::size_t top_n, const Encoder& encoder) {
  if (candidates.empty()) return {};

  EmbeddingMatrix local_emb = encoder.encode(local.tokens);

  // Mention-weighted scoring needs at least one mention and a positive
  // weight mass; otherwise every candidate falls back to plain recall.
  std::vector<double> alpha;
  ScoreStrategy used = ScoreStrategy::fallback;
  if (!local.mentions.empty()) {
    alpha = alpha_weights(local_emb, local.mentions, strategy);
    double weight_sum = 0.0;
    for (double a : alpha) weight_sum += a;
    if (weight_sum > 0.0) {
      switch (strategy.kind) {
        case AlphaStrategy::Kind::equal: used = ScoreStrategy::equal; break;
        case AlphaStrategy::Kind::hard: used = ScoreStrategy::hard; break;
        case AlphaStrategy::Kind::soft: used = ScoreStrategy::soft; break;
      }
    }
  }

  std::vector<ScoredReference> scored;
  scored.reserve(candidates.size());
  for (const auto& candidate : candidates) {
    EmbeddingMatrix ref_emb = encoder.encode(candidate.tokens);
    double score = used != ScoreStrategy::fallback
                       ? mention_recall(local_emb, ref_emb, alpha)
                       : bertscore(local_emb, ref_emb).recall;
    scored.push_back({candidate, score, used});
  }

  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredReference& a, const ScoredReference& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return source_trust(a.reference.source.kind) >
                            source_trust(b.reference.source.kind);
                   });
  if (scored.size() > top_n) scored.resize(top_n);
  return scored;
}

}  // namespace globalner
