#include "globalner/retrieval.hpp"

#include <unordered_map>

#include "globalner/text.hpp"

namespace globalner {

std::vector<ReferenceSentence> merge_dedup(
    const std::vector<ReferenceSentence>& results) {
  std::vector<ReferenceSentence> merged;
  std::unordered_map<std::string, std::size_t> kept;  // key -> index in merged
  merged.reserve(results.size());
  for (const auto& result : results) {
    std::string key = normalize_for_dedup(result.raw_text);
    auto [it, inserted] = kept.emplace(key, merged.size());
    if (inserted) {
      merged.push_back(result);
      continue;
    }
    ReferenceSentence& winner = merged[it->second];
    if (source_trust(result.source.kind) > source_trust(winner.source.kind)) {
      winner = result;
    }
  }
  return merged;
}

}  // namespace globalner
