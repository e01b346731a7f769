#include "globalner/assemble.hpp"

#include "globalner/errors.hpp"

namespace globalner {

namespace {

Token marker(const char* text) {
  std::string s(text);
  std::size_t len = s.size();
  return {std::move(s), 0, len};
}

}  // namespace

AssembledInput assemble_masked_input(
    const LocalSentence& local, const std::vector<ScoredReference>& selected,
    std::size_t budget) {
  if (local.tokens.empty()) throw DataError("empty sentence");

  AssembledInput input;
  input.tokens.push_back(marker(kClsToken));
  input.mask.push_back(0);
  input.local_begin = 1;
  for (const auto& token : local.tokens) {
    input.tokens.push_back(token);
    input.mask.push_back(1);
  }
  input.local_end = input.tokens.size();

  if (selected.empty()) return input;

  // Reference tokens get whatever room the budget leaves after the
  // separator; the local sentence always stays intact.
  std::size_t used = input.tokens.size() + 1;  // + separator
  std::size_t room = budget > used ? budget - used : 0;
  if (room == 0) return input;  // nothing fits: no separator either

  input.tokens.push_back(marker(kSepToken));
  input.mask.push_back(0);
  for (const auto& scored : selected) {
    for (const auto& token : scored.reference.tokens) {
      if (room == 0) return input;
      input.tokens.push_back(token);
      input.mask.push_back(0);
      --room;
    }
  }
  return input;
}

}  // namespace globalner
