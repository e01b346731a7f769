#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "globalner/types.hpp"

namespace globalner {

enum class QueryKind { whole_sentence, mention };

struct Query {
  std::string text;
  QueryKind kind = QueryKind::whole_sentence;
  std::optional<std::size_t> mention_index;  // set iff kind == mention
};

// One query per sentence plus one per mention, sentence first, mentions in
// span order. Duplicate query texts are collapsed case-insensitively, so a
// sentence with M mentions yields at most M+1 queries.
std::vector<Query> generate_queries(const LocalSentence& sentence);

}  // namespace globalner
