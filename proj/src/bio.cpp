#include "globalner/bio.hpp"

#include "globalner/errors.hpp"

namespace globalner {

BioLabel parse_bio_label(const std::string& s) {
  if (s == "O") return {BioTag::O, std::nullopt};
  if (s.empty() || (s[0] != 'B' && s[0] != 'I')) {
    throw DataError("malformed BIO label: '" + s + "'");
  }
  BioTag tag = s[0] == 'B' ? BioTag::B : BioTag::I;
  if (s.size() == 1) return {tag, std::nullopt};
  if (s[1] != '-' || s.size() == 2) {
    throw DataError("malformed BIO label: '" + s + "'");
  }
  return {tag, s.substr(2)};
}

std::string format_bio_label(const BioLabel& label) {
  switch (label.tag) {
    case BioTag::O: return "O";
    case BioTag::B: return label.entity_type ? "B-" + *label.entity_type : "B";
    case BioTag::I: return label.entity_type ? "I-" + *label.entity_type : "I";
  }
  return "O";
}

std::vector<BioLabel> strip_types(std::vector<BioLabel> labels) {
  for (auto& label : labels) label.entity_type.reset();
  return labels;
}

std::vector<DecodedEntity> bio_decode(const std::vector<BioLabel>& labels) {
  std::vector<DecodedEntity> entities;
  bool open = false;
  std::size_t start = 0;
  std::string type;

  auto close = [&](std::size_t end) {
    if (open) entities.push_back({{start, end}, type});
    open = false;
  };

  for (std::size_t i = 0; i < labels.size(); ++i) {
    const BioLabel& label = labels[i];
    std::string label_type = label.entity_type.value_or("");
    switch (label.tag) {
      case BioTag::O:
        close(i);
        break;
      case BioTag::B:
        close(i);
        open = true;
        start = i;
        type = label_type;
        break;
      case BioTag::I:
        if (open && label_type == type) break;  // continues the run
        // Orphan I: repair as B.
        close(i);
        open = true;
        start = i;
        type = label_type;
        break;
    }
  }
  close(labels.size());
  return entities;
}

std::vector<BioLabel> bio_encode(std::size_t length,
                                 const std::vector<DecodedEntity>& entities) {
  std::vector<BioLabel> labels(length, BioLabel{BioTag::O, std::nullopt});
  for (const auto& entity : entities) {
    if (entity.span.token_start >= entity.span.token_end ||
        entity.span.token_end > length) {
      throw DataError("entity span out of bounds in bio_encode");
    }
    std::optional<std::string> type;
    if (!entity.entity_type.empty()) type = entity.entity_type;
    labels[entity.span.token_start] = {BioTag::B, type};
    for (std::size_t i = entity.span.token_start + 1; i < entity.span.token_end;
         ++i) {
      labels[i] = {BioTag::I, type};
    }
  }
  return labels;
}

bool is_valid_bio(const std::vector<BioLabel>& labels) {
  const BioLabel* prev = nullptr;
  for (const auto& label : labels) {
    if (label.tag == BioTag::I) {
      if (prev == nullptr || prev->tag == BioTag::O ||
          prev->entity_type != label.entity_type) {
        return false;
      }
    }
    prev = &label;
  }
  return true;
}

}  // namespace globalner
