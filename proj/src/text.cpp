#include "globalner/text.hpp"

#include <cctype>

#include "globalner/errors.hpp"

namespace globalner {

namespace {

bool is_ascii_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0 &&
         static_cast<unsigned char>(c) < 128;
}

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0 &&
         static_cast<unsigned char>(c) < 128;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (is_ascii_space(text[i])) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    while (i < n && !is_ascii_space(text[i])) ++i;
    std::size_t end = i;

    // Leading punctuation characters, one token each.
    while (begin < end && is_ascii_punct(text[begin])) {
      tokens.push_back({std::string(text.substr(begin, 1)), begin, begin + 1});
      ++begin;
    }
    // Trailing punctuation; remember, emit after the core in source order.
    std::size_t trail_begin = end;
    while (trail_begin > begin && is_ascii_punct(text[trail_begin - 1])) {
      --trail_begin;
    }
    if (begin < trail_begin) {
      tokens.push_back({std::string(text.substr(begin, trail_begin - begin)),
                        begin, trail_begin});
    }
    for (std::size_t p = trail_begin; p < end; ++p) {
      tokens.push_back({std::string(text.substr(p, 1)), p, p + 1});
    }
  }
  return tokens;
}

std::string lowercase_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string join_tokens(const std::vector<Token>& tokens) {
  return join_range(tokens, 0, tokens.size());
}

std::string join_range(const std::vector<Token>& tokens, std::size_t begin,
                       std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end && i < tokens.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += tokens[i].text;
  }
  return out;
}

std::vector<std::string> lowercased_texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lowercase_ascii(t.text));
  return out;
}

std::vector<std::string> index_terms(std::string_view text) {
  return lowercased_texts(tokenize(text));
}

std::string normalize_for_dedup(std::string_view text) {
  std::string collapsed;
  collapsed.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_ascii_space(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) {
      collapsed += ' ';
      pending_space = false;
    }
    collapsed += static_cast<char>(
        std::tolower(static_cast<unsigned char>(c)));
  }
  std::size_t begin = 0;
  std::size_t end = collapsed.size();
  while (begin < end &&
         (is_ascii_punct(collapsed[begin]) || collapsed[begin] == ' ')) {
    ++begin;
  }
  while (end > begin && (is_ascii_punct(collapsed[end - 1]) ||
                         collapsed[end - 1] == ' ')) {
    --end;
  }
  return collapsed.substr(begin, end - begin);
}

const char* to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::internet: return "internet";
    case SourceKind::wikipedia: return "wikipedia";
    case SourceKind::source_corpus: return "source_corpus";
  }
  return "internet";
}

SourceKind source_kind_from_string(const std::string& name) {
  if (name == "internet") return SourceKind::internet;
  if (name == "wikipedia") return SourceKind::wikipedia;
  if (name == "source_corpus") return SourceKind::source_corpus;
  throw DataError("unknown source kind: " + name);
}

void validate_sentence(const LocalSentence& sentence) {
  if (sentence.tokens.empty()) throw DataError("sentence has no tokens");
  std::size_t prev_end = 0;
  for (const auto& span : sentence.mentions) {
    if (span.token_start >= span.token_end ||
        span.token_end > sentence.tokens.size()) {
      throw DataError("mention span out of bounds");
    }
    if (span.token_start < prev_end) {
      throw DataError("mention spans overlap or are out of order");
    }
    prev_end = span.token_end;
  }
}

}  // namespace globalner
