#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "globalner/encoder.hpp"
#include "globalner/errors.hpp"
#include "globalner/reranker.hpp"
#include "globalner/rng.hpp"
#include "globalner/text.hpp"
#include "test_util.hpp"

using namespace globalner;

namespace {

EmbeddingMatrix matrix_of(const std::vector<std::vector<double>>& rows) {
  EmbeddingMatrix m{rows.size(), rows[0].size(), {}};
  for (const auto& row : rows) {
    m.values.insert(m.values.end(), row.begin(), row.end());
  }
  return m;
}

EmbeddingMatrix random_unit_matrix(std::mt19937_64& rng, std::size_t rows,
                                   std::size_t dim) {
  EmbeddingMatrix m{rows, dim, std::vector<double>(rows * dim)};
  for (std::size_t i = 0; i < rows; ++i) {
    double norm_sq = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      double x = rand_normal(rng);
      m.row(i)[d] = x;
      norm_sq += x * x;
    }
    double inv = 1.0 / std::sqrt(norm_sq);
    for (std::size_t d = 0; d < dim; ++d) m.row(i)[d] *= inv;
  }
  return m;
}

const EmbeddingMatrix kLocal2 = matrix_of({{1.0, 0.0}, {0.0, 1.0}});
const EmbeddingMatrix kRef2 = matrix_of({{1.0, 0.0}, {0.6, 0.8}});

}  // namespace

TEST_CASE("similarity matrix") {
  auto m = similarity_matrix(kLocal2, kRef2);
  CHECK(m.at(0, 0) == doctest::Approx(1.0));
  CHECK(m.at(0, 1) == doctest::Approx(0.6));
  CHECK(m.at(1, 0) == doctest::Approx(0.0));
  CHECK(m.at(1, 1) == doctest::Approx(0.8));

  CHECK_THROWS_AS(
      static_cast<void>(similarity_matrix(kLocal2, matrix_of({{1.0, 0.0, 0.0}}))),
      DataError);
}

TEST_CASE("max pool rows") {
  SimilarityMatrix one{1, 1, {0.5}};
  CHECK(max_pool_rows(one) == std::vector<double>{0.5});

  auto pooled = max_pool_rows(similarity_matrix(kLocal2, kRef2));
  CHECK(pooled[0] == doctest::Approx(1.0));
  CHECK(pooled[1] == doctest::Approx(0.8));

  SimilarityMatrix constant{1, 3, {0.3, 0.3, 0.3}};
  CHECK(max_pool_rows(constant)[0] == doctest::Approx(0.3));
}

TEST_CASE("alpha weights: equal and hard") {
  auto three = matrix_of({{1, 0}, {0, 1}, {1, 0}});
  CHECK(alpha_weights(three, {}, AlphaStrategy::equal()) ==
        std::vector<double>{1.0, 1.0, 1.0});

  auto hard = alpha_weights(kLocal2, {{1, 2}}, AlphaStrategy::hard());
  CHECK(hard == std::vector<double>{0.0, 1.0});

  CHECK_THROWS_WITH_AS(
      static_cast<void>(alpha_weights(kLocal2, {}, AlphaStrategy::hard())),
      "no mentions", DataError);
  CHECK_THROWS_WITH_AS(
      static_cast<void>(alpha_weights(kLocal2, {}, AlphaStrategy::soft())),
      "no mentions", DataError);
}

TEST_CASE("alpha weights: soft against the high-precision oracle") {
  auto fixtures = gntest::load_json_fixture("oracle_fixtures.json")["alpha"];
  REQUIRE(fixtures.size() >= 20);
  for (const auto& fx : fixtures) {
    auto rows = fx["rows"].get<std::vector<std::vector<double>>>();
    auto local = matrix_of(rows);
    std::vector<MentionSpan> mentions;
    for (const auto& span : fx["mentions"]) {
      mentions.push_back({span[0].get<std::size_t>(), span[1].get<std::size_t>()});
    }
    double epsilon = fx["epsilon"].get<double>();

    auto hard = alpha_weights(local, mentions, AlphaStrategy::hard());
    auto expected_hard = fx["expected_hard"].get<std::vector<double>>();
    CHECK(hard == expected_hard);

    auto soft = alpha_weights(local, mentions, AlphaStrategy::soft(epsilon));
    auto expected_soft = fx["expected_soft"].get<std::vector<double>>();
    REQUIRE(soft.size() == expected_soft.size());
    for (std::size_t i = 0; i < soft.size(); ++i) {
      CHECK(soft[i] == doctest::Approx(expected_soft[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("soft alpha peaks on mention tokens") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 100; ++round) {
    std::size_t n = 2 + rand_index(rng, 8);
    auto local = random_unit_matrix(rng, n, 8);
    std::size_t m_start = rand_index(rng, n);
    std::size_t m_end = std::min(n, m_start + 1 + rand_index(rng, 2));
    auto soft =
        alpha_weights(local, {{m_start, m_end}}, AlphaStrategy::soft());
    double mention_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = m_start; i < m_end; ++i) {
      mention_min = std::min(mention_min, soft[i]);
    }
    for (double a : soft) CHECK(mention_min >= a - 1e-9);
  }
}

TEST_CASE("mention recall on the 2x2 fixture") {
  CHECK(mention_recall(kLocal2, kRef2, {1.0, 1.0}) == doctest::Approx(0.9));
  CHECK(mention_recall(kLocal2, kRef2, {0.0, 1.0}) == doctest::Approx(0.8));
  CHECK_THROWS_WITH_AS(
      static_cast<void>(mention_recall(kLocal2, kRef2, {0.0, 0.0})),
      "degenerate weights", DataError);
}

TEST_CASE("identical sentences score 1 under the reference encoder") {
  HashNgramEncoder encoder(32);
  auto tokens = gntest::toks({"london", "fashion", "week"});
  auto emb = encoder.encode(tokens);
  double r = mention_recall(emb, emb, {1.0, 1.0, 1.0});
  CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bertscore(emb, emb).f1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bertscore fixture and orthogonal case") {
  auto score = bertscore(kLocal2, kRef2);
  CHECK(score.recall == doctest::Approx(0.9));
  CHECK(score.precision == doctest::Approx(0.9));
  CHECK(score.f1 == doctest::Approx(0.9));

  auto orthogonal = bertscore(matrix_of({{1.0, 0.0}}), matrix_of({{0.0, 1.0}}));
  CHECK(orthogonal.recall == doctest::Approx(0.0));
  CHECK(orthogonal.precision == doctest::Approx(0.0));
  CHECK(orthogonal.f1 == doctest::Approx(0.0));
}

TEST_CASE("scale invariance of the weighted recall") {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 50; ++round) {
    std::size_t rows = 1 + rand_index(rng, 10);
    std::size_t cols = 1 + rand_index(rng, 10);
    auto local = random_unit_matrix(rng, rows, 12);
    auto reference = random_unit_matrix(rng, cols, 12);
    std::vector<double> alpha(rows);
    for (auto& a : alpha) a = rand_unit(rng) + 0.01;
    double base = mention_recall(local, reference, alpha);
    for (double c : {1e-6, 1.0, 1e6}) {
      std::vector<double> scaled(alpha);
      for (auto& a : scaled) a *= c;
      CHECK(mention_recall(local, reference, scaled) ==
            doctest::Approx(base).epsilon(1e-12));
    }
  }
}

TEST_CASE("hard alpha equals equal alpha on the mention-only sentence") {
  std::mt19937_64 rng(19);
  for (int round = 0; round < 50; ++round) {
    std::size_t n = 3 + rand_index(rng, 6);
    auto local = random_unit_matrix(rng, n, 8);
    auto reference = random_unit_matrix(rng, 2 + rand_index(rng, 6), 8);
    std::size_t m_start = rand_index(rng, n - 1);
    std::size_t m_end = m_start + 1 + rand_index(rng, n - m_start - 1);
    auto hard = alpha_weights(local, {{m_start, m_end}}, AlphaStrategy::hard());
    double full = mention_recall(local, reference, hard);

    EmbeddingMatrix restricted{m_end - m_start, local.dim, {}};
    for (std::size_t i = m_start; i < m_end; ++i) {
      restricted.values.insert(restricted.values.end(), local.row(i).begin(),
                               local.row(i).end());
    }
    double mention_only = mention_recall(
        restricted, reference, std::vector<double>(restricted.rows, 1.0));
    CHECK(full == doctest::Approx(mention_only).epsilon(1e-12));
  }
}

TEST_CASE("equal-alpha recall equals bertscore recall") {
  std::mt19937_64 rng(29);
  for (int round = 0; round < 50; ++round) {
    auto local = random_unit_matrix(rng, 1 + rand_index(rng, 8), 8);
    auto reference = random_unit_matrix(rng, 1 + rand_index(rng, 8), 8);
    double equal_recall = mention_recall(
        local, reference, std::vector<double>(local.rows, 1.0));
    CHECK(equal_recall ==
          doctest::Approx(bertscore(local, reference).recall).epsilon(1e-12));
  }
}

namespace {

// Hand-built vectors so one candidate matches the mention and the other
// matches only the surrounding words.
const char* kStoreText =
    "esb\t1 0 0 0\n"
    "storm\t0 1 0 0\n"
    "view\t0 0 1 0\n"
    "weather\t0 1 0 0\n"
    "views\t0 0 1 0\n"
    "skyscraper\t0.5 0 0 0.8660254037844386\n";

LocalSentence esb_sentence() {
  LocalSentence local{gntest::toks({"storm", "view", "esb"}), {{2, 3}}};
  return local;
}

std::vector<ReferenceSentence> esb_candidates() {
  ReferenceSentence distractor{gntest::toks({"weather", "views"}),
                               {SourceKind::internet, "test"},
                               "q",
                               "weather views"};
  ReferenceSentence cue{gntest::toks({"esb", "skyscraper"}),
                        {SourceKind::internet, "test"},
                        "q",
                        "esb skyscraper"};
  return {distractor, cue};
}

}  // namespace

TEST_CASE("mention weighting flips the ranking that plain recall gets wrong") {
  std::istringstream store(kStoreText);
  FileStoreEncoder encoder(store);
  auto local = esb_sentence();
  auto candidates = esb_candidates();

  auto equal = rank_and_select(local, candidates, AlphaStrategy::equal(), 2,
                               encoder);
  REQUIRE(equal.size() == 2);
  CHECK(equal[0].reference.raw_text == "weather views");
  CHECK(equal[0].strategy_used == ScoreStrategy::equal);

  for (auto strategy : {AlphaStrategy::hard(), AlphaStrategy::soft()}) {
    auto ranked = rank_and_select(local, candidates, strategy, 2, encoder);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].reference.raw_text == "esb skyscraper");
  }
}

TEST_CASE("rank_and_select ordering, fallback and ties") {
  HashNgramEncoder encoder(32);

  // zero mentions -> plain recall, marked as fallback
  LocalSentence no_mentions{gntest::toks({"just", "words"}), {}};
  std::vector<ReferenceSentence> candidates{
      {gntest::toks({"just", "words"}), {SourceKind::internet, "t"}, "q",
       "just words"},
      {gntest::toks({"other", "stuff"}), {SourceKind::wikipedia, "t"}, "q",
       "other stuff"}};
  auto ranked = rank_and_select(no_mentions, candidates,
                                AlphaStrategy::soft(), 6, encoder);
  REQUIRE(ranked.size() == 2);
  for (const auto& r : ranked) CHECK(r.strategy_used == ScoreStrategy::fallback);
  CHECK(ranked[0].reference.raw_text == "just words");

  // scores non-increasing
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    CHECK(ranked[i - 1].score >= ranked[i].score);
  }

  // exact ties break by source trust
  std::vector<ReferenceSentence> tied{
      {gntest::toks({"just", "words"}), {SourceKind::internet, "t"}, "q",
       "just words"},
      {gntest::toks({"just", "words"}), {SourceKind::wikipedia, "t"}, "q",
       "just words twin"}};
  auto tie_ranked = rank_and_select(no_mentions, tied, AlphaStrategy::equal(),
                                    6, encoder);
  CHECK(tie_ranked[0].reference.source.kind == SourceKind::wikipedia);

  // top_n truncation and empty candidates
  CHECK(rank_and_select(no_mentions, candidates, AlphaStrategy::equal(), 1,
                        encoder)
            .size() == 1);
  CHECK(rank_and_select(no_mentions, {}, AlphaStrategy::equal(), 6, encoder)
            .empty());
}
