#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "globalner/reranker.hpp"
#include "globalner/types.hpp"

namespace globalner {

inline constexpr const char* kClsToken = "[CLS]";
inline constexpr const char* kSepToken = "[SEP]";
inline constexpr std::size_t kDefaultLengthBudget = 510;

// Tagger input: marker + local tokens [+ separator + reference tokens],
// with a mask selecting exactly the local-sentence positions.
struct AssembledInput {
  std::vector<Token> tokens;
  std::vector<std::uint8_t> mask;  // 1 = local token
  std::size_t local_begin = 0;     // [local_begin, local_end)
  std::size_t local_end = 0;

  std::size_t local_length() const { return local_end - local_begin; }
};

// References are appended in rank order. When the total length exceeds the
// budget, reference tokens are dropped from the tail; local tokens are never
// truncated, and the separator disappears with the last reference token.
AssembledInput assemble_masked_input(
    const LocalSentence& local, const std::vector<ScoredReference>& selected,
    std::size_t budget = kDefaultLengthBudget);

}  // namespace globalner
