#include "doctest.h"

#include <cmath>
#include <random>

#include "prospect/embedder.hpp"
#include "prospect/error.hpp"
#include "prospect/hashing.hpp"
#include "support/test_support.hpp"

using namespace prospect;

TEST_CASE("fnv1a64 reference values") {
    static_assert(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("ab") == 0x089c4407b545986aULL);
}

TEST_CASE("hashing embedder hand-worked vector for \"abc\"") {
    // n-grams ab, bc, abc; buckets h % 256 and signs from the top bit:
    //   ab  -> 106 (+), bc -> 114 (+), abc -> 75 (-)
    CHECK(fnv1a64("ab") % 256 == 106);
    CHECK(fnv1a64("bc") % 256 == 114);
    CHECK(fnv1a64("abc") % 256 == 75);
    CHECK((fnv1a64("ab") >> 63) == 0);
    CHECK((fnv1a64("bc") >> 63) == 0);
    CHECK((fnv1a64("abc") >> 63) == 1);

    const HashingEmbedder e(256);
    const auto raw = e.features("abc");
    std::vector<double> expected(256, 0.0);
    expected[106] = 1.0;
    expected[114] = 1.0;
    expected[75] = -1.0;
    CHECK(raw == expected);

    const std::vector<std::string> texts = {"abc"};
    const auto m = e.embed(texts);
    const double v = 1.0 / std::sqrt(3.0);
    for (std::size_t d = 0; d < 256; ++d) CHECK(m.row(0)[d] == doctest::Approx(expected[d] * v).epsilon(1e-15));
}

TEST_CASE("embeddings are unit length, deterministic and order preserving") {
    std::mt19937_64 rng(2);
    std::vector<std::string> texts;
    for (int i = 0; i < 100; ++i) texts.push_back(testing::random_sentence(rng, 0, 12));
    texts.push_back("");
    texts.push_back("x");
    const HashingEmbedder e(64);
    const auto a = e.embed(texts);
    const auto b = e.embed(texts);
    REQUIRE(a.rows() == texts.size());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double norm = 0.0;
        for (double x : a.row(r)) norm += x * x;
        CHECK(norm == doctest::Approx(1.0));
        CHECK(std::vector<double>(a.row(r).begin(), a.row(r).end()) ==
              std::vector<double>(b.row(r).begin(), b.row(r).end()));
        CHECK(a.id(r) == static_cast<ExampleId>(r));
    }
    // texts without bigrams map to e_0
    CHECK(a.row(texts.size() - 1)[0] == 1.0);
    CHECK(a.row(texts.size() - 2)[0] == 1.0);
    // a single text embeds the same alone or in a batch
    const std::vector<std::string> one = {texts[7]};
    const auto solo = e.embed(one);
    for (std::size_t d = 0; d < 64; ++d) CHECK(solo.row(0)[d] == a.row(7)[d]);
}

TEST_CASE("embedder input validation") {
    const HashingEmbedder e(8);
    CHECK_THROWS_AS(e.embed({}), InputError);
    const std::vector<std::string> texts = {"ab", "cd"};
    const std::vector<ExampleId> wrong = {1};
    CHECK_THROWS_AS(e.embed(texts, wrong), InputError);
    CHECK_THROWS_AS(HashingEmbedder(0), ConfigError);
    CHECK(e.fingerprint() != HashingEmbedder(16).fingerprint());
}

TEST_CASE("embedding matrix rows and selection") {
    EmbeddingMatrix m(2);
    m.add_row(5, std::vector<double>{3.0, 4.0});
    m.add_row(9, std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(m.add_row(1, std::vector<double>{1.0}), InvariantError);
    CHECK_THROWS_AS(m.add_row(1, std::vector<double>{1.0, std::nan("")}), InvariantError);
    m.normalize_rows();
    CHECK(m.row(0)[0] == doctest::Approx(0.6));
    CHECK(m.row(1)[1] == 0.0);
    const std::vector<ExampleId> pick = {9, 5};
    const auto s = m.select(pick);
    CHECK(s.id(0) == 9);
    CHECK(s.row(1)[1] == doctest::Approx(0.8));
    const std::vector<ExampleId> unknown = {4};
    CHECK_THROWS_AS(m.select(unknown), InputError);
    CHECK(squared_distance(std::vector<double>{1, 2}, std::vector<double>{4, 6}) == 25.0);
}
