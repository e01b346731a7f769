#include "globalner/gazetteer.hpp"

#include <algorithm>
#include <fstream>

#include "globalner/errors.hpp"
#include "globalner/text.hpp"

namespace globalner {

namespace {

std::string join_key(const std::vector<std::string>& tokens,
                     std::size_t begin, std::size_t length) {
  std::string key;
  for (std::size_t i = begin; i < begin + length; ++i) {
    if (i > begin) key += '\x1f';
    key += tokens[i];
  }
  return key;
}

}  // namespace

Gazetteer::Gazetteer(const std::vector<std::string>& entries) {
  for (const auto& entry : entries) {
    auto terms = index_terms(entry);
    if (terms.empty()) continue;
    max_len_ = std::max(max_len_, terms.size());
    entries_.insert(join_key(terms, 0, terms.size()));
  }
}

Gazetteer Gazetteer::from_stream(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return Gazetteer(lines);
}

Gazetteer Gazetteer::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open gazetteer file: " + path);
  return from_stream(in);
}

bool Gazetteer::contains(const std::vector<std::string>& lowered_tokens,
                         std::size_t begin, std::size_t length) const {
  if (length == 0 || begin + length > lowered_tokens.size()) return false;
  return entries_.count(join_key(lowered_tokens, begin, length)) > 0;
}

std::vector<MentionSpan> detect_mentions(const LocalSentence& sentence,
                                         const Gazetteer& gazetteer) {
  std::vector<MentionSpan> spans;
  if (gazetteer.size() == 0) return spans;
  auto lowered = lowercased_texts(sentence.tokens);
  const std::size_t n = lowered.size();
  std::size_t i = 0;
  while (i < n) {
    std::size_t longest = 0;
    std::size_t limit = std::min(gazetteer.max_entry_length(), n - i);
    for (std::size_t len = limit; len >= 1; --len) {
      if (gazetteer.contains(lowered, i, len)) {
        longest = len;
        break;
      }
    }
    if (longest > 0) {
      spans.push_back({i, i + longest});
      i += longest;
    } else {
      ++i;
    }
  }
  return spans;
}

}  // namespace globalner
