#include "globalner/train.hpp"

#include <cmath>
#include <numeric>

#include "globalner/errors.hpp"
#include "globalner/rng.hpp"

namespace globalner {

namespace {

// Flat view over all model parameters, emission first.
struct ParamView {
  std::vector<std::vector<double>*> blocks;

  explicit ParamView(CrfModel& model)
      : blocks{&model.emission, &model.transitions, &model.start, &model.end} {}

  std::size_t total() const {
    std::size_t n = 0;
    for (auto* b : blocks) n += b->size();
    return n;
  }
};

struct GradView {
  std::vector<const std::vector<double>*> blocks;

  explicit GradView(const CrfGradient& grad)
      : blocks{&grad.emission, &grad.transitions, &grad.start, &grad.end} {}
};

}  // namespace

double dev_micro_f1(const CrfModel& model,
                    const std::vector<TrainExample>& examples,
                    const FeatureProvider& provider) {
  std::size_t tp = 0, pred_count = 0, gold_count = 0;
  for (const auto& example : examples) {
    auto predicted = viterbi_decode(model, example.input, provider);
    auto pred_entities = bio_decode(predicted);
    auto gold_entities = bio_decode(example.gold);
    pred_count += pred_entities.size();
    gold_count += gold_entities.size();
    for (const auto& entity : pred_entities) {
      for (const auto& gold : gold_entities) {
        if (entity == gold) {
          ++tp;
          break;
        }
      }
    }
  }
  double p = pred_count ? static_cast<double>(tp) / pred_count : 0.0;
  double r = gold_count ? static_cast<double>(tp) / gold_count : 0.0;
  return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

TrainResult train(CrfModel model, const std::vector<TrainExample>& data,
                  const FeatureProvider& provider, const TrainConfig& config,
                  const std::vector<TrainExample>* dev) {
  if (data.empty()) throw DataError("train: empty dataset");

  // Featurize once; inputs are static across epochs.
  std::vector<std::vector<std::vector<double>>> features(data.size());
  std::vector<std::vector<std::size_t>> gold_ids(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& example = data[i];
    if (example.gold.size() != example.input.local_length()) {
      throw DataError("train: gold length mismatch at example " +
                      std::to_string(i));
    }
    features[i] = provider.featurize(example.input);
    gold_ids[i].reserve(example.gold.size());
    for (const auto& label : example.gold) {
      gold_ids[i].push_back(model.label_index(label));
    }
  }

  TrainResult result;
  if (config.epochs == 0) {
    result.model = std::move(model);
    return result;
  }

  ParamView params(model);
  std::vector<double> m(params.total(), 0.0), v(params.total(), 0.0);
  const std::size_t window = config.batch_size * config.accumulation;
  const std::size_t steps_per_epoch = (data.size() + window - 1) / window;
  const std::size_t total_steps = steps_per_epoch * config.epochs;
  std::size_t step = 0;

  std::mt19937_64 shuffle_rng(config.shuffle_seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  CrfModel best_model = model;
  double best_f1 = -1.0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(order, shuffle_rng);
    double epoch_loss = 0.0;

    std::size_t cursor = 0;
    while (cursor < data.size()) {
      std::size_t take = std::min(window, data.size() - cursor);
      CrfGradient accum;
      bool first = true;
      for (std::size_t b = 0; b < take; ++b) {
        std::size_t i = order[cursor + b];
        const auto& input = data[i].input;
        auto grad = crf_gradient(model, features[i], input.local_begin,
                                 input.local_end, gold_ids[i]);
        if (!std::isfinite(grad.loss)) {
          throw DataError("train: non-finite loss at example " +
                          std::to_string(i) + ", epoch " +
                          std::to_string(epoch + 1));
        }
        epoch_loss += grad.loss;
        if (first) {
          accum = std::move(grad);
          first = false;
        } else {
          accum.accumulate(grad);
        }
      }
      cursor += take;
      accum.scale(1.0 / static_cast<double>(take));

      ++step;
      double lr = config.lr;
      if (config.linear_decay && total_steps > 0) {
        lr *= static_cast<double>(total_steps - (step - 1)) /
              static_cast<double>(total_steps);
      }
      double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));

      GradView grads(accum);
      std::size_t offset = 0;
      for (std::size_t blk = 0; blk < params.blocks.size(); ++blk) {
        auto& theta = *params.blocks[blk];
        const auto& g = *grads.blocks[blk];
        for (std::size_t i = 0; i < theta.size(); ++i) {
          std::size_t slot = offset + i;
          m[slot] = config.beta1 * m[slot] + (1.0 - config.beta1) * g[i];
          v[slot] = config.beta2 * v[slot] + (1.0 - config.beta2) * g[i] * g[i];
          double m_hat = m[slot] / bc1;
          double v_hat = v[slot] / bc2;
          theta[i] -= lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
        }
        offset += theta.size();
      }
    }

    result.epoch_loss.push_back(epoch_loss / static_cast<double>(data.size()));
    if (dev != nullptr) {
      double f1 = dev_micro_f1(model, *dev, provider);
      result.dev_f1.push_back(f1);
      if (f1 > best_f1) {
        best_f1 = f1;
        best_model = model;
        result.best_epoch = epoch + 1;
      }
    }
  }

  result.model = dev != nullptr ? std::move(best_model) : std::move(model);
  return result;
}

}  // namespace globalner
