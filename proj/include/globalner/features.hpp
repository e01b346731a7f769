#pragma once

#include <cstddef>
#include <vector>

#include "globalner/assemble.hpp"
#include "globalner/encoder.hpp"

namespace globalner {

// Per-position feature vectors for an assembled input. Stands in for the
// transformer encoder: context flows in only through whatever the provider
// derives from neighboring positions.
class FeatureProvider {
 public:
  virtual ~FeatureProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual std::vector<std::vector<double>> featurize(
      const AssembledInput& input) const = 0;
};

// Each position sees only its own token embedding. With this provider the
// tagger is exactly invariant to reference content.
class TokenEmbeddingFeatures : public FeatureProvider {
 public:
  explicit TokenEmbeddingFeatures(const Encoder& encoder)
      : encoder_(&encoder) {}

  std::size_t dim() const override { return encoder_->dim(); }
  std::vector<std::vector<double>> featurize(
      const AssembledInput& input) const override;

 private:
  const Encoder* encoder_;
};

// Concatenates the embeddings of positions i-window .. i+window (zero
// padding outside the sequence). The window crosses the separator, so
// retrieved context can influence local predictions.
class WindowedEmbeddingFeatures : public FeatureProvider {
 public:
  WindowedEmbeddingFeatures(const Encoder& encoder, std::size_t window = 3)
      : encoder_(&encoder), window_(window) {}

  std::size_t dim() const override {
    return encoder_->dim() * (2 * window_ + 1);
  }
  std::size_t window() const { return window_; }
  std::vector<std::vector<double>> featurize(
      const AssembledInput& input) const override;

 private:
  const Encoder* encoder_;
  std::size_t window_;
};

}  // namespace globalner
