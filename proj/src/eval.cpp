#include "globalner/eval.hpp"

#include "globalner/errors.hpp"

namespace globalner {

EvalResult evaluate_micro_f1(const std::vector<ConllSentence>& gold,
                             const std::vector<ConllSentence>& predicted) {
  if (gold.size() != predicted.size()) {
    throw DataError("gold has " + std::to_string(gold.size()) +
                    " sentences but predictions have " +
                    std::to_string(predicted.size()));
  }
  EvalResult result;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto& g = gold[s];
    const auto& p = predicted[s];
    if (g.tokens != p.tokens) {
      throw DataError("token mismatch at sentence " + std::to_string(s + 1));
    }
    auto gold_entities = bio_decode(g.labels);
    auto pred_entities = bio_decode(p.labels);
    result.gold += gold_entities.size();
    result.predicted += pred_entities.size();
    for (const auto& entity : pred_entities) {
      for (const auto& reference : gold_entities) {
        if (entity == reference) {
          ++result.true_positives;
          break;
        }
      }
    }
  }
  double tp = static_cast<double>(result.true_positives);
  result.precision = result.predicted ? tp / result.predicted : 0.0;
  result.recall = result.gold ? tp / result.gold : 0.0;
  double pr = result.precision + result.recall;
  result.f1 = pr > 0.0 ? 2.0 * result.precision * result.recall / pr : 0.0;
  return result;
}

EvalResult evaluate_micro_f1_files(const std::string& gold_path,
                                   const std::string& predicted_path) {
  return evaluate_micro_f1(read_conll_file(gold_path),
                           read_conll_file(predicted_path));
}

}  // namespace globalner
