#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "globalner/gazetteer.hpp"
#include "globalner/query.hpp"
#include "globalner/rng.hpp"
#include "globalner/text.hpp"
#include "test_util.hpp"

using namespace globalner;

namespace {

LocalSentence sentence_of(const std::string& text) {
  return {tokenize(text), {}};
}

// Brute force: enumerate all valid greedy walks and pick the greedy-longest
// left-to-right one, mirroring what detect_mentions promises.
std::vector<MentionSpan> greedy_reference(
    const std::vector<std::string>& lowered, const Gazetteer& gazetteer) {
  std::vector<MentionSpan> spans;
  std::size_t i = 0;
  while (i < lowered.size()) {
    std::size_t best = 0;
    for (std::size_t len = lowered.size() - i; len >= 1; --len) {
      if (gazetteer.contains(lowered, i, len)) {
        best = len;
        break;
      }
    }
    if (best) {
      spans.push_back({i, i + best});
      i += best;
    } else {
      ++i;
    }
  }
  return spans;
}

}  // namespace

TEST_CASE("detect_mentions on the running example") {
  Gazetteer gazetteer({"black widow", "london fashion week"});
  auto local = sentence_of(
      "black widow dresses up for london fashion week and party in style !");
  auto spans = detect_mentions(local, gazetteer);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == MentionSpan{0, 2});
  CHECK(spans[1] == MentionSpan{5, 8});
}

TEST_CASE("detect_mentions edge cases") {
  auto local = sentence_of("anything at all");
  CHECK(detect_mentions(local, Gazetteer({})).empty());

  // greedy longest match with overlapping entries
  Gazetteer gazetteer({"new york", "new york city"});
  auto nyc = sentence_of("new york new york city");
  auto spans = detect_mentions(nyc, gazetteer);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == MentionSpan{0, 2});
  CHECK(spans[1] == MentionSpan{2, 5});

  // case-insensitive
  Gazetteer cased({"Empire State Building"});
  auto esb = sentence_of("the empire state building at night");
  auto esb_spans = detect_mentions(esb, cased);
  REQUIRE(esb_spans.size() == 1);
  CHECK(esb_spans[0] == MentionSpan{1, 4});
}

TEST_CASE("detected spans are sorted, in bounds, non-overlapping") {
  std::mt19937_64 rng(23);
  const std::vector<std::string> vocab{"a", "b", "c", "d", "e"};
  for (int round = 0; round < 300; ++round) {
    std::vector<std::string> entries;
    std::size_t n_entries = 1 + rand_index(rng, 6);
    for (std::size_t e = 0; e < n_entries; ++e) {
      std::string entry;
      std::size_t len = 1 + rand_index(rng, 3);
      for (std::size_t k = 0; k < len; ++k) {
        if (k) entry += ' ';
        entry += vocab[rand_index(rng, vocab.size())];
      }
      entries.push_back(entry);
    }
    Gazetteer gazetteer(entries);

    std::string text;
    std::size_t len = 1 + rand_index(rng, 10);
    for (std::size_t k = 0; k < len; ++k) {
      if (k) text += ' ';
      text += vocab[rand_index(rng, vocab.size())];
    }
    auto local = sentence_of(text);
    auto spans = detect_mentions(local, gazetteer);
    CHECK(spans == greedy_reference(lowercased_texts(local.tokens), gazetteer));

    std::size_t prev_end = 0;
    for (const auto& span : spans) {
      CHECK(span.token_start >= prev_end);
      CHECK(span.token_start < span.token_end);
      CHECK(span.token_end <= local.tokens.size());
      prev_end = span.token_end;
    }

    // adding an entry never removes a span that does not overlap the new
    // entry's own matches
    std::string extra;
    std::size_t extra_len = 1 + rand_index(rng, 3);
    for (std::size_t k = 0; k < extra_len; ++k) {
      if (k) extra += ' ';
      extra += vocab[rand_index(rng, vocab.size())];
    }
    entries.push_back(extra);
    Gazetteer bigger(entries);
    auto bigger_spans = detect_mentions(local, bigger);
    Gazetteer only_extra({extra});
    auto extra_spans = detect_mentions(local, only_extra);
    for (const auto& span : spans) {
      bool overlaps_extra_match =
          std::any_of(extra_spans.begin(), extra_spans.end(),
                      [&](const MentionSpan& m) { return span.overlaps(m); });
      bool kept = std::find(bigger_spans.begin(), bigger_spans.end(), span) !=
                  bigger_spans.end();
      if (!overlaps_extra_match) CHECK(kept);
    }
  }
}

TEST_CASE("gazetteer file loading skips blank lines") {
  std::istringstream in("black widow\n\nLONDON fashion week\n");
  auto gazetteer = Gazetteer::from_stream(in);
  CHECK(gazetteer.size() == 2);
}

TEST_CASE("generate_queries") {
  auto local = sentence_of(
      "black widow dresses up for london fashion week and party in style !");
  local.mentions = {{0, 2}, {5, 8}};
  auto queries = generate_queries(local);
  REQUIRE(queries.size() == 3);
  CHECK(queries[0].kind == QueryKind::whole_sentence);
  CHECK(queries[0].text ==
        "black widow dresses up for london fashion week and party in style !");
  CHECK(queries[1].text == "black widow");
  CHECK(queries[1].mention_index == 0);
  CHECK(queries[2].text == "london fashion week");
  CHECK(queries[2].mention_index == 1);
}

TEST_CASE("generate_queries dedup and zero-mention cases") {
  auto local = sentence_of("no entities here");
  CHECK(generate_queries(local).size() == 1);

  // repeated mention surface collapses to one query
  auto twice = sentence_of("Paris loves paris");
  twice.mentions = {{0, 1}, {2, 3}};
  auto queries = generate_queries(twice);
  REQUIRE(queries.size() == 2);
  CHECK(queries[1].text == "Paris");  // first occurrence's casing survives

  // a mention equal to the whole sentence collapses into the sentence query
  auto single = sentence_of("madonna");
  single.mentions = {{0, 1}};
  CHECK(generate_queries(single).size() == 1);
}

TEST_CASE("query count never exceeds mentions + 1") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> vocab{"ada", "bob", "cat", "dog"};
  for (int round = 0; round < 200; ++round) {
    std::size_t len = 1 + rand_index(rng, 8);
    std::string text;
    for (std::size_t k = 0; k < len; ++k) {
      if (k) text += ' ';
      text += vocab[rand_index(rng, vocab.size())];
    }
    auto local = sentence_of(text);
    std::size_t pos = 0;
    while (pos < len) {
      if (rand_unit(rng) < 0.4) {
        std::size_t span_len =
            1 + rand_index(rng, std::min<std::size_t>(2, len - pos));
        local.mentions.push_back({pos, pos + span_len});
        pos += span_len;
      } else {
        ++pos;
      }
    }
    auto queries = generate_queries(local);
    CHECK(queries.size() <= local.mentions.size() + 1);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      CHECK(!queries[q].text.empty());
      if (queries[q].kind == QueryKind::mention) {
        auto span = local.mentions[*queries[q].mention_index];
        CHECK(queries[q].text ==
              join_range(local.tokens, span.token_start, span.token_end));
      }
    }
  }
}
