#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "globalner/assemble.hpp"
#include "globalner/crf.hpp"
#include "globalner/features.hpp"

namespace globalner {

struct TrainExample {
  AssembledInput input;
  std::vector<BioLabel> gold;  // local positions only
};

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 2;
  std::size_t accumulation = 4;  // optimizer steps every batch_size*accumulation examples
  double lr = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-6;
  bool linear_decay = true;  // lr decays linearly to 0 over all steps
  std::uint64_t shuffle_seed = 1;
};

struct TrainResult {
  CrfModel model;                 // best by dev micro-F1, else final
  std::vector<double> epoch_loss; // mean NLL per epoch
  std::vector<double> dev_f1;     // per epoch, when a dev set is given
  std::size_t best_epoch = 0;     // 1-based; 0 = no dev evaluation
};

// Adam over the masked NLL. Gradients are averaged over each accumulation
// window; example order is reshuffled per epoch from shuffle_seed. A
// non-finite loss aborts with a diagnostic. Zero epochs returns the model
// unchanged.
TrainResult train(CrfModel model, const std::vector<TrainExample>& data,
                  const FeatureProvider& provider, const TrainConfig& config,
                  const std::vector<TrainExample>* dev = nullptr);

// Entity-level micro-F1 of the model's decoding against gold spans.
double dev_micro_f1(const CrfModel& model,
                    const std::vector<TrainExample>& examples,
                    const FeatureProvider& provider);

}  // namespace globalner
