#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "globalner/bio.hpp"
#include "globalner/conll.hpp"
#include "globalner/errors.hpp"
#include "globalner/rng.hpp"
#include "globalner/text.hpp"
#include "test_util.hpp"

using namespace globalner;

TEST_CASE("tokenize basics") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("  \t \n").empty());

  auto sentence = tokenize("black widow dresses up");
  REQUIRE(sentence.size() == 4);
  CHECK(sentence[0].text == "black");
  CHECK(sentence[1].text == "widow");
  CHECK(sentence[2].text == "dresses");
  CHECK(sentence[3].text == "up");

  auto bang = tokenize("style!");
  REQUIRE(bang.size() == 2);
  CHECK(bang[0].text == "style");
  CHECK(bang[1].text == "!");
}

TEST_CASE("tokenize punctuation splitting and offsets") {
  auto tokens = tokenize("(hello), world!!");
  std::vector<std::string> texts;
  for (const auto& t : tokens) texts.push_back(t.text);
  CHECK(texts == std::vector<std::string>{"(", "hello", ")", ",", "world",
                                          "!", "!"});
  std::string source = "(hello), world!!";
  std::size_t prev_end = 0;
  for (const auto& t : tokens) {
    CHECK(t.char_start < t.char_end);
    CHECK(t.text == source.substr(t.char_start, t.char_end - t.char_start));
    CHECK(t.char_start >= prev_end);
    prev_end = t.char_end;
  }

  // inner punctuation stays put
  auto apostrophe = tokenize("don't u.s. stop");
  CHECK(apostrophe[0].text == "don't");
  CHECK(apostrophe[1].text == "u.s");
  CHECK(apostrophe[2].text == ".");

  // all-punctuation chunk
  auto dashes = tokenize("-- ok");
  CHECK(dashes[0].text == "-");
  CHECK(dashes[1].text == "-");
  CHECK(dashes[2].text == "ok");
}

TEST_CASE("tokenize is deterministic with increasing offsets") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "ab .!,(x)Z-\t";
  for (int round = 0; round < 200; ++round) {
    std::string s;
    std::size_t len = rand_index(rng, 30);
    for (std::size_t i = 0; i < len; ++i) {
      s += alphabet[rand_index(rng, alphabet.size())];
    }
    auto first = tokenize(s);
    auto second = tokenize(s);
    CHECK(first == second);
    std::size_t prev = 0;
    for (const auto& t : first) {
      CHECK(t.char_start >= prev);
      CHECK(t.char_start < t.char_end);
      prev = t.char_end;
    }
  }
}

TEST_CASE("bio label parsing and formatting") {
  CHECK(parse_bio_label("O") == BioLabel{BioTag::O, std::nullopt});
  CHECK(parse_bio_label("B") == BioLabel{BioTag::B, std::nullopt});
  CHECK(parse_bio_label("B-loc") == BioLabel{BioTag::B, "loc"});
  CHECK(parse_bio_label("I-per") == BioLabel{BioTag::I, "per"});
  CHECK_THROWS_AS(parse_bio_label("X-loc"), DataError);
  CHECK_THROWS_AS(parse_bio_label("B-"), DataError);
  CHECK_THROWS_AS(parse_bio_label(""), DataError);
  CHECK(format_bio_label(parse_bio_label("I-group")) == "I-group");
}

TEST_CASE("bio_decode") {
  auto o = parse_bio_label("O");
  CHECK(bio_decode({o, o, o}).empty());

  auto spans = bio_decode({parse_bio_label("B-loc"), parse_bio_label("I-loc"), o});
  REQUIRE(spans.size() == 1);
  CHECK(spans[0] == DecodedEntity{{0, 2}, "loc"});

  // orphan I repaired as B
  spans = bio_decode({o, parse_bio_label("I-loc"), o});
  REQUIRE(spans.size() == 1);
  CHECK(spans[0] == DecodedEntity{{1, 2}, "loc"});

  // I with a different type starts a new entity
  spans = bio_decode({parse_bio_label("B-loc"), parse_bio_label("I-per")});
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == DecodedEntity{{0, 1}, "loc"});
  CHECK(spans[1] == DecodedEntity{{1, 2}, "per"});
}

TEST_CASE("strip_types") {
  CHECK(strip_types({parse_bio_label("B-person")}) ==
        std::vector<BioLabel>{parse_bio_label("B")});
  auto os = strip_types({parse_bio_label("O"), parse_bio_label("O")});
  CHECK(os == std::vector<BioLabel>{parse_bio_label("O"), parse_bio_label("O")});
  auto mixed = strip_types({parse_bio_label("B-group"), parse_bio_label("I-group"),
                            parse_bio_label("O"), parse_bio_label("B-loc")});
  CHECK(mixed == std::vector<BioLabel>{parse_bio_label("B"), parse_bio_label("I"),
                                       parse_bio_label("O"), parse_bio_label("B")});
  CHECK(strip_types(mixed) == mixed);  // idempotent
}

TEST_CASE("bio round trip on random valid span lists") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> types{"", "loc", "per", "group"};
  for (int round = 0; round < 300; ++round) {
    std::size_t length = 1 + rand_index(rng, 12);
    std::vector<DecodedEntity> entities;
    std::size_t pos = 0;
    while (pos < length) {
      if (rand_unit(rng) < 0.4) {
        std::size_t span_len =
            1 + rand_index(rng, std::min<std::size_t>(3, length - pos));
        entities.push_back(
            {{pos, pos + span_len}, types[rand_index(rng, types.size())]});
        pos += span_len;
      } else {
        ++pos;
      }
    }
    auto labels = bio_encode(length, entities);
    CHECK(is_valid_bio(labels));
    CHECK(bio_decode(labels) == entities);
  }
}

TEST_CASE("conll round trip and errors") {
  std::string text = "black\tB-loc\nwidow\tI-loc\n\nup\tO\n";
  std::istringstream in(text);
  auto sentences = read_conll(in);
  REQUIRE(sentences.size() == 2);
  CHECK(sentences[0].tokens == std::vector<std::string>{"black", "widow"});
  CHECK(sentences[1].tokens == std::vector<std::string>{"up"});

  std::ostringstream out;
  write_conll(out, sentences);
  CHECK(out.str() == text);

  std::istringstream bad("token-without-label\n");
  CHECK_THROWS_WITH_AS(static_cast<void>(read_conll(bad)),
                       doctest::Contains("line 1"), DataError);
}

TEST_CASE("convert_dataset strips types elementwise") {
  auto tmp_in = std::string("/tmp/gn_convert_in.conll");
  auto tmp_out = std::string("/tmp/gn_convert_out.conll");
  std::vector<ConllSentence> fixture;
  std::mt19937_64 rng(3);
  const std::vector<std::string> labels{"O", "B-loc", "I-loc", "B-per", "I-per"};
  for (int s = 0; s < 5; ++s) {
    ConllSentence sentence;
    std::size_t len = 2 + rand_index(rng, 6);
    for (std::size_t i = 0; i < len; ++i) {
      sentence.tokens.push_back("tok" + std::to_string(i));
      sentence.labels.push_back(
          parse_bio_label(labels[rand_index(rng, labels.size())]));
    }
    fixture.push_back(std::move(sentence));
  }
  write_conll_file(tmp_in, fixture);
  convert_dataset(tmp_in, tmp_out);

  auto converted = read_conll_file(tmp_out);
  REQUIRE(converted.size() == fixture.size());
  for (std::size_t s = 0; s < fixture.size(); ++s) {
    CHECK(converted[s].tokens == fixture[s].tokens);
    CHECK(converted[s].labels == strip_types(fixture[s].labels));
  }

  // all-O input comes back byte-identical
  std::vector<ConllSentence> all_o{{{"a", "b"}, {parse_bio_label("O"),
                                                 parse_bio_label("O")}}};
  write_conll_file(tmp_in, all_o);
  convert_dataset(tmp_in, tmp_out);
  CHECK(gntest::read_file(tmp_in) == gntest::read_file(tmp_out));
}

TEST_CASE("normalize_for_dedup") {
  CHECK(normalize_for_dedup("Hello  World") == normalize_for_dedup("hello world"));
  CHECK(normalize_for_dedup("  \"Quoted!\"  ") == "quoted");
  CHECK(normalize_for_dedup("a  b\tc") == "a b c");
}

TEST_CASE("to_local_sentence offsets and gold mentions") {
  ConllSentence sentence{{"new", "york", "is", "big"},
                         {parse_bio_label("B-loc"), parse_bio_label("I-loc"),
                          parse_bio_label("O"), parse_bio_label("O")}};
  auto local = to_local_sentence(sentence, true);
  CHECK(join_tokens(local.tokens) == "new york is big");
  REQUIRE(local.mentions.size() == 1);
  CHECK(local.mentions[0] == MentionSpan{0, 2});
  validate_sentence(local);
}
