#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "globalner/query.hpp"
#include "globalner/types.hpp"

namespace globalner {

// Per-backend retrieval caps and the internet-result filters.
struct RetrievalConfig {
  std::size_t top_g = 15;  // internet results per query
  std::size_t top_w = 6;   // wikipedia results per query
  std::size_t top_r = 15;  // source-corpus results per query
  std::size_t k_clusters = 5;
  std::vector<std::string> blocked_domains{"github.com"};
  std::vector<std::string> annotation_patterns{R"(\b[BI]-[A-Za-z_]+\b)"};
};

// Common contract for the three retrieval sub-systems. search returns at
// most top_k results, best-first per the backend's own score.
class SearchBackend {
 public:
  virtual ~SearchBackend() = default;
  virtual SourceTag source() const = 0;
  virtual std::vector<ReferenceSentence> search(const Query& query,
                                                std::size_t top_k) const = 0;
};

// Removes duplicates by normalized text; on a duplicate the copy from the
// most trusted source survives (wikipedia > source corpus > internet),
// staying at the first occurrence's position. Idempotent.
std::vector<ReferenceSentence> merge_dedup(
    const std::vector<ReferenceSentence>& results);

}  // namespace globalner
