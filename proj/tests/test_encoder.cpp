#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <thread>

#include "globalner/encoder.hpp"
#include "globalner/errors.hpp"
#include "test_util.hpp"

using namespace globalner;

namespace {

double row_norm(const EmbeddingMatrix& m, std::size_t i) {
  double s = 0.0;
  for (double x : m.row(i)) s += x * x;
  return std::sqrt(s);
}

double row_dot(const EmbeddingMatrix& a, std::size_t i,
               const EmbeddingMatrix& b, std::size_t j) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.dim; ++d) s += a.row(i)[d] * b.row(j)[d];
  return s;
}

}  // namespace

TEST_CASE("hash encoder invariants") {
  HashNgramEncoder encoder(32);
  CHECK(encoder.dim() == 32);
  CHECK_THROWS_AS(static_cast<void>(encoder.encode({})), DataError);

  auto one = encoder.encode(gntest::toks({"a"}));
  CHECK(one.rows == 1);
  CHECK(row_norm(one, 0) == doctest::Approx(1.0).epsilon(1e-9));

  // determinism
  auto again = encoder.encode(gntest::toks({"a"}));
  CHECK(one.values == again.values);

  // context-free: "cat" encodes the same alone and repeated
  auto cat = encoder.encode(gntest::toks({"cat"}));
  auto cats = encoder.encode(gntest::toks({"cat", "cat"}));
  for (std::size_t d = 0; d < encoder.dim(); ++d) {
    CHECK(cat.row(0)[d] == cats.row(0)[d]);
    CHECK(cat.row(0)[d] == cats.row(1)[d]);
  }

  // case-insensitive
  auto upper = encoder.encode(gntest::toks({"Paris"}));
  auto lower = encoder.encode(gntest::toks({"paris"}));
  CHECK(upper.values == lower.values);

  // self-cosine is 1 up to 1e-12
  CHECK(row_dot(cat, 0, cat, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hash encoder matches the independent reference implementation") {
  auto fixture = gntest::load_json_fixture("oracle_fixtures.json")["hash"];
  for (const auto& record : fixture["vectors"]) {
    Token token{record["token"].get<std::string>(), 0, 1};
    auto vec = hash_ngram_encode(token, record["dim"].get<std::size_t>());
    auto expected = record["values"].get<std::vector<double>>();
    REQUIRE(vec.size() == expected.size());
    for (std::size_t d = 0; d < vec.size(); ++d) {
      CHECK(vec[d] == doctest::Approx(expected[d]).epsilon(1e-12));
    }
  }
  for (const auto& record : fixture["cosines"]) {
    std::size_t dim = record["dim"].get<std::size_t>();
    auto a = hash_ngram_encode({record["a"].get<std::string>(), 0, 1}, dim);
    auto b = hash_ngram_encode({record["b"].get<std::string>(), 0, 1}, dim);
    double dot = 0.0;
    for (std::size_t d = 0; d < dim; ++d) dot += a[d] * b[d];
    CHECK(dot == doctest::Approx(record["value"].get<double>()).epsilon(1e-12));
  }
}

TEST_CASE("near-duplicate tokens are closer than unrelated ones") {
  std::size_t dim = 64;
  auto london = hash_ngram_encode({"london", 0, 6}, dim);
  auto londn = hash_ngram_encode({"londn", 0, 5}, dim);
  auto zebra = hash_ngram_encode({"zebra", 0, 5}, dim);
  auto cos = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) s += a[d] * b[d];
    return s;
  };
  CHECK(cos(london, londn) > cos(london, zebra));
}

TEST_CASE("hash_ngram_encode rejects tiny dims") {
  CHECK_THROWS_AS(static_cast<void>(hash_ngram_encode({"x", 0, 1}, 4)),
                  std::invalid_argument);
}

TEST_CASE("encoder cache is safe under concurrent encode") {
  HashNgramEncoder encoder(16);
  auto tokens = gntest::toks({"alpha", "beta", "gamma", "delta", "alpha"});
  auto expected = encoder.encode(tokens);
  std::vector<std::thread> threads;
  std::vector<EmbeddingMatrix> results(8);
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] { results[t] = encoder.encode(tokens); });
  }
  for (auto& thread : threads) thread.join();
  for (const auto& result : results) CHECK(result.values == expected.values);
}

TEST_CASE("file store encoder") {
  std::istringstream store(
      "hello\t1 0 0 0\n"
      "world\t0 2 0 0\n");
  FileStoreEncoder encoder(store);
  CHECK(encoder.dim() == 4);

  auto m = encoder.encode(gntest::toks({"hello", "world"}));
  CHECK(m.row(0)[0] == doctest::Approx(1.0));
  CHECK(m.row(1)[1] == doctest::Approx(1.0));  // renormalized from 2

  CHECK_THROWS_AS(static_cast<void>(encoder.encode(gntest::toks({"unknown"}))),
                  DataError);

  std::istringstream store2(
      "hello\t1 0 0 0 0 0 0 0\n"
      "world\t0 2 0 0 0 0 0 0\n");
  FileStoreEncoder with_fallback(store2, /*hash_fallback=*/true);
  auto fallback = with_fallback.encode(gntest::toks({"unknown"}));
  CHECK(row_norm(fallback, 0) == doctest::Approx(1.0).epsilon(1e-9));

  std::istringstream bad("hello\t1 0\nworld\t0 1 0\n");
  CHECK_THROWS_AS(FileStoreEncoder{bad}, DataError);
  std::istringstream zero("hello\t0 0\n");
  CHECK_THROWS_AS(FileStoreEncoder{zero}, DataError);
}
