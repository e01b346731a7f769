#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "globalner/bio.hpp"
#include "globalner/types.hpp"

namespace globalner {

// One sentence of a two-column CoNLL file (token TAB label).
struct ConllSentence {
  std::vector<std::string> tokens;
  std::vector<BioLabel> labels;
};

// Reads two-column sentences separated by blank lines. Malformed lines
// raise DataError with the 1-based line number.
std::vector<ConllSentence> read_conll(std::istream& in);
std::vector<ConllSentence> read_conll_file(const std::string& path);

void write_conll(std::ostream& out, const std::vector<ConllSentence>& sentences);
void write_conll_file(const std::string& path,
                      const std::vector<ConllSentence>& sentences);

// Typed-to-untyped conversion: strips entity types from every label,
// preserving sentence boundaries.
void convert_dataset(const std::string& input_path,
                     const std::string& output_path);

// Builds a LocalSentence over the single-space-joined token texts.
// When with_gold_mentions is set, mention spans come from the labels.
LocalSentence to_local_sentence(const ConllSentence& sentence,
                                bool with_gold_mentions = false);

}  // namespace globalner
