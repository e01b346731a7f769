#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace globalner {

// One surface token plus character offsets into the string it came from.
struct Token {
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;  // exclusive

  bool operator==(const Token&) const = default;
};

// Half-open token index range [token_start, token_end) inside one sentence.
struct MentionSpan {
  std::size_t token_start = 0;
  std::size_t token_end = 0;

  bool operator==(const MentionSpan&) const = default;
  bool overlaps(const MentionSpan& other) const {
    return token_start < other.token_end && other.token_start < token_end;
  }
};

// The sentence to tag, with whatever mention spans were found in it.
// Immutable by convention once constructed.
struct LocalSentence {
  std::vector<Token> tokens;
  std::vector<MentionSpan> mentions;
};

enum class SourceKind { internet, wikipedia, source_corpus };

// Where a retrieved sentence came from; backend names the concrete engine.
struct SourceTag {
  SourceKind kind = SourceKind::internet;
  std::string backend;

  bool operator==(const SourceTag&) const = default;
};

// Higher value = more trusted (wikipedia > source corpus > internet).
inline int source_trust(SourceKind kind) {
  switch (kind) {
    case SourceKind::wikipedia: return 2;
    case SourceKind::source_corpus: return 1;
    case SourceKind::internet: return 0;
  }
  return 0;
}

const char* to_string(SourceKind kind);
SourceKind source_kind_from_string(const std::string& name);

// A retrieved candidate sentence with provenance.
struct ReferenceSentence {
  std::vector<Token> tokens;
  SourceTag source;
  std::string origin_query;
  std::string raw_text;
};

// Throws DataError if tokens are empty or any mention span is out of
// bounds, empty, overlapping, or out of order.
void validate_sentence(const LocalSentence& sentence);

}  // namespace globalner
