#pragma once

#include <string>
#include <vector>

#include "globalner/conll.hpp"

namespace globalner {

struct EvalResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
};

// Entity-level micro-F1: a predicted entity counts iff its span and type
// both match a gold entity exactly. Zero predictions give precision 0.
// Throws DataError with the 1-based sentence index when the files do not
// align sentence-by-sentence and token-by-token.
EvalResult evaluate_micro_f1(const std::vector<ConllSentence>& gold,
                             const std::vector<ConllSentence>& predicted);
EvalResult evaluate_micro_f1_files(const std::string& gold_path,
                                   const std::string& predicted_path);

}  // namespace globalner
