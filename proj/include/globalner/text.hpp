#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "globalner/types.hpp"

namespace globalner {

// Whitespace split, then leading/trailing ASCII punctuation characters are
// peeled off into their own tokens. Offsets index the input string.
// Whitespace-only input yields an empty list.
std::vector<Token> tokenize(std::string_view text);

// ASCII-only lowercasing; multibyte UTF-8 sequences pass through untouched.
std::string lowercase_ascii(std::string_view s);

// Token texts joined by single spaces.
std::string join_tokens(const std::vector<Token>& tokens);
std::string join_range(const std::vector<Token>& tokens, std::size_t begin,
                       std::size_t end);

// Lowercased token texts, in order.
std::vector<std::string> lowercased_texts(const std::vector<Token>& tokens);

// tokenize + lowercase in one step; the canonical term stream for indexes.
std::vector<std::string> index_terms(std::string_view text);

// Canonical form used for duplicate detection: lowercase, collapse
// whitespace runs to single spaces, strip surrounding punctuation.
std::string normalize_for_dedup(std::string_view text);

}  // namespace globalner
