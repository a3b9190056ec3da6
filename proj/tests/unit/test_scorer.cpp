#include "doctest.h"

#include <cmath>
#include <random>

#include "prospect/error.hpp"
#include "prospect/scorer.hpp"

using namespace prospect;

TEST_CASE("uniform scorer gives -ln k per byte") {
    const UniformScorer s(2);
    const auto r = s.score_continuation({"ctx", "abc"});
    REQUIRE(r.token_count == 3);
    for (double lp : r.token_logprobs) CHECK(lp == std::log(0.5));
    CHECK(mean_logprob(r) == std::log(0.5));
    CHECK_THROWS_AS(UniformScorer(0), ConfigError);
}

TEST_CASE("bigram hand-computed value") {
    // corpus "ababab": c(a,b) = 3, c(a,.) = 3, so p(b|a) = (3+1)/(3+256)
    const double expected = std::log(4.0 / 259.0);
    CHECK(expected == doctest::Approx(-4.1705337005796475).epsilon(1e-15));
    for (bool adapt : {false, true}) {
        const BigramScorer s("ababab", adapt);
        CHECK(s.pair_count('a', 'b') == 3);
        CHECK(s.row_count('a') == 3);
        CHECK(s.row_count(BigramScorer::kBegin) == 1);
        const auto r = s.score_continuation({"a", "b"});
        REQUIRE(r.token_count == 1);
        CHECK(r.token_logprobs[0] == expected);
    }
}

TEST_CASE("adaptive bigram counts bigrams seen earlier in the prefix") {
    // empty corpus, context "xy", continuation "xy":
    //   x after y: no y-row bigrams yet        -> 1/256
    //   y after x: prefix holds (x,y) once     -> (1+1)/(1+256)
    const BigramScorer adaptive("", true);
    const auto r = adaptive.score_continuation({"xy", "xy"});
    REQUIRE(r.token_count == 2);
    CHECK(r.token_logprobs[0] == std::log(1.0 / 256.0));
    CHECK(r.token_logprobs[1] == std::log(2.0 / 257.0));

    const BigramScorer pure("", false);
    const auto p = pure.score_continuation({"xy", "xy"});
    CHECK(p.token_logprobs[1] == std::log(1.0 / 256.0));
    CHECK(adaptive.fingerprint() != pure.fingerprint());
}

TEST_CASE("empty continuation is rejected") {
    CHECK_THROWS_AS(UniformScorer(4).score_continuation({"ctx", ""}), EmptyContinuationError);
    CHECK_THROWS_AS(BigramScorer("abc").score_continuation({"ctx", ""}), EmptyContinuationError);
}

TEST_CASE("bigram scores are valid log-probs and prefix consistent") {
    std::mt19937_64 rng(5);
    std::string corpus;
    for (int i = 0; i < 2000; ++i) corpus += static_cast<char>('a' + rng() % 6);
    const BigramScorer s(corpus);
    for (int trial = 0; trial < 200; ++trial) {
        std::string ctx, cont;
        for (auto n = rng() % 30; n > 0; --n) ctx += static_cast<char>('a' + rng() % 8);
        for (auto n = 1 + rng() % 30; n > 0; --n) cont += static_cast<char>('a' + rng() % 8);
        const auto full = s.score_continuation({ctx, cont});
        CHECK(full.token_count == static_cast<std::int64_t>(cont.size()));
        for (double lp : full.token_logprobs) {
            CHECK(std::isfinite(lp));
            CHECK(lp <= 0.0);
        }
        // scoring a split continuation token by token gives the same numbers
        const auto cut = 1 + rng() % cont.size();
        const auto head = s.score_continuation({ctx, cont.substr(0, cut)});
        for (std::size_t i = 0; i < head.token_logprobs.size(); ++i)
            CHECK(head.token_logprobs[i] == full.token_logprobs[i]);
        if (cut < cont.size()) {
            const auto tail = s.score_continuation({ctx + cont.substr(0, cut), cont.substr(cut)});
            for (std::size_t i = 0; i < tail.token_logprobs.size(); ++i)
                CHECK(tail.token_logprobs[i] == full.token_logprobs[cut + i]);
        }
        CHECK(s.score_continuation({ctx, cont}).token_logprobs == full.token_logprobs);
    }
}

TEST_CASE("mean_logprob and result checks") {
    CHECK(mean_logprob({{-1.0, -3.0}, 2}) == -2.0);
    CHECK_THROWS_AS(mean_logprob({{}, 0}), InvariantError);
    CHECK_NOTHROW(check_result({{-0.5}, 1}, "t"));
    CHECK_THROWS_AS(check_result({{-0.5}, 2}, "t"), BackendError);
    CHECK_THROWS_AS(check_result({{0.5}, 1}, "t"), BackendError);
    CHECK_THROWS_AS(check_result({{std::nan("")}, 1}, "t"), BackendError);
    CHECK_THROWS_AS(check_result({{}, 0}, "t"), BackendError);
}

TEST_CASE("counting scorer forwards and counts") {
    const UniformScorer u(3);
    const CountingScorer c(u);
    c.score_continuation({"", "a"});
    c.score_continuation({"", "b"});
    CHECK(c.calls() == 2);
    CHECK(c.fingerprint() == u.fingerprint());
}
