#pragma once

#include <optional>
#include <string>
#include <vector>

#include "globalner/types.hpp"

namespace globalner {

enum class BioTag { B, I, O };

// A BIO tag with an optional entity type ("B-loc" vs bare "B").
struct BioLabel {
  BioTag tag = BioTag::O;
  std::optional<std::string> entity_type;

  bool operator==(const BioLabel&) const = default;
};

// Parses "O", "B", "I", "B-<type>", "I-<type>". Throws DataError otherwise.
BioLabel parse_bio_label(const std::string& s);
std::string format_bio_label(const BioLabel& label);

// Drops the entity type from every label, keeping the tag.
std::vector<BioLabel> strip_types(std::vector<BioLabel> labels);

struct DecodedEntity {
  MentionSpan span;
  std::string entity_type;  // empty for untyped labels

  bool operator==(const DecodedEntity&) const = default;
};

// Maximal B-I runs as spans. An I that does not continue a run of the same
// type is repaired by treating it as B, so malformed sequences never fail.
std::vector<DecodedEntity> bio_decode(const std::vector<BioLabel>& labels);

// Inverse of bio_decode for well-formed span lists (sorted, non-overlapping).
std::vector<BioLabel> bio_encode(std::size_t length,
                                 const std::vector<DecodedEntity>& entities);

// True when no I follows O/start without a same-type B/I before it.
bool is_valid_bio(const std::vector<BioLabel>& labels);

}  // namespace globalner
