#include "globalner/query.hpp"

#include <unordered_set>

#include "globalner/text.hpp"

namespace globalner {

std::vector<Query> generate_queries(const LocalSentence& sentence) {
  std::vector<Query> queries;
  std::unordered_set<std::string> seen;

  auto push = [&](std::string text, QueryKind kind,
                  std::optional<std::size_t> mention_index) {
    if (text.empty()) return;
    std::string key = lowercase_ascii(text);
    if (!seen.insert(std::move(key)).second) return;
    queries.push_back({std::move(text), kind, mention_index});
  };

  push(join_tokens(sentence.tokens), QueryKind::whole_sentence, std::nullopt);
  for (std::size_t m = 0; m < sentence.mentions.size(); ++m) {
    const auto& span = sentence.mentions[m];
    push(join_range(sentence.tokens, span.token_start, span.token_end),
         QueryKind::mention, m);
  }
  return queries;
}

}  // namespace globalner
