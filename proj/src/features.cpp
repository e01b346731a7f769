#include "globalner/features.hpp"

#include <algorithm>

namespace globalner {

std::vector<std::vector<double>> TokenEmbeddingFeatures::featurize(
    const AssembledInput& input) const {
  EmbeddingMatrix emb = encoder_->encode(input.tokens);
  std::vector<std::vector<double>> features(emb.rows);
  for (std::size_t i = 0; i < emb.rows; ++i) {
    auto row = emb.row(i);
    features[i].assign(row.begin(), row.end());
  }
  return features;
}

std::vector<std::vector<double>> WindowedEmbeddingFeatures::featurize(
    const AssembledInput& input) const {
  EmbeddingMatrix emb = encoder_->encode(input.tokens);
  const std::size_t d = emb.dim;
  const std::size_t n = emb.rows;
  const std::size_t width = 2 * window_ + 1;
  std::vector<std::vector<double>> features(n,
                                            std::vector<double>(width * d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t slot = 0; slot < width; ++slot) {
      std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i + slot) -
                         static_cast<std::ptrdiff_t>(window_);
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) continue;
      auto row = emb.row(static_cast<std::size_t>(j));
      std::copy(row.begin(), row.end(), features[i].begin() + slot * d);
    }
  }
  return features;
}

}  // namespace globalner
