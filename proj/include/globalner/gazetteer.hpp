#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <unordered_set>
#include <vector>

#include "globalner/types.hpp"

namespace globalner {

// Case-insensitive set of token sequences, immutable after construction.
// Stands in for a learned mention detector in offline runs.
class Gazetteer {
 public:
  Gazetteer() = default;
  // Entries are tokenized and lowercased; empty entries are skipped.
  explicit Gazetteer(const std::vector<std::string>& entries);

  // One entry per line, UTF-8.
  static Gazetteer from_stream(std::istream& in);
  static Gazetteer from_file(const std::string& path);

  bool contains(const std::vector<std::string>& lowered_tokens,
                std::size_t begin, std::size_t length) const;
  std::size_t max_entry_length() const { return max_len_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_set<std::string> entries_;  // tokens joined by '\x1f'
  std::size_t max_len_ = 0;
};

// Greedy left-to-right longest match against the gazetteer, ties broken by
// leftmost start. Returned spans are sorted and non-overlapping.
std::vector<MentionSpan> detect_mentions(const LocalSentence& sentence,
                                         const Gazetteer& gazetteer);

}  // namespace globalner
