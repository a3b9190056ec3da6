#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "oracles/oracles.hpp"
#include "prospect/error.hpp"
#include "prospect/kcenter.hpp"

using namespace prospect;

namespace {

EmbeddingMatrix matrix(const std::vector<oracle::Point>& pts, ExampleId first_id = 0) {
    EmbeddingMatrix m(pts.empty() ? 1 : pts[0].size());
    for (std::size_t i = 0; i < pts.size(); ++i) m.add_row(first_id + static_cast<ExampleId>(i), pts[i]);
    return m;
}

std::vector<oracle::Point> random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim, bool gridded) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<oracle::Point> pts(n, oracle::Point(dim));
    for (auto& p : pts)
        for (auto& x : p) x = gridded ? static_cast<double>(rng() % 3) : u(rng);
    return pts;
}

}  // namespace

TEST_CASE("one-dimensional hand case") {
    // pool {0, 1, 10} (ids 0,1,2), seed at 0: farthest is 10, then 1
    const auto pool = matrix({{0.0}, {1.0}, {10.0}});
    const auto seeds = matrix({{0.0}}, 100);
    const auto r = kcenter_greedy(pool, 2, seeds);
    CHECK(r.selected == std::vector<ExampleId>{2, 1});
    CHECK(r.radii == std::vector<double>{10.0, 1.0});
    CHECK(r.coverage_radius == 0.0);
}

TEST_CASE("k = 0 and bad arguments") {
    const auto pool = matrix({{0.0}, {3.0}});
    const auto seeds = matrix({{1.0}});
    auto r = kcenter_greedy(pool, 0, seeds);
    CHECK(r.selected.empty());
    CHECK(r.coverage_radius == 2.0);
    r = kcenter_greedy(pool, 0);
    CHECK(r.coverage_radius == std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(kcenter_greedy(pool, 3), ConfigError);
    CHECK_THROWS_AS(kcenter_greedy(pool, 1, matrix({{1.0, 2.0}})), InputError);
}

TEST_CASE("unseeded first pick is farthest from the mean, ties to lower id") {
    // mean 0; points -1 and +1 are equidistant, so id 0 wins
    const auto pool = matrix({{-1.0}, {0.0}, {1.0}});
    const auto r = kcenter_greedy(pool, 2);
    CHECK(r.selected == std::vector<ExampleId>{0, 2});
    CHECK(std::isinf(r.radii[0]));
    CHECK(r.radii[1] == 2.0);
    CHECK(r.coverage_radius == 1.0);
}

TEST_CASE("selection trace equals the brute-force reference") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        const std::size_t dim = 1 + rng() % 4;
        const bool gridded = trial % 2 == 0;  // integer grids force distance ties
        const auto pts = random_points(rng, n, dim, gridded);
        const auto seed_pts = random_points(rng, rng() % 3, dim, gridded);
        const std::size_t k = rng() % (n + 1);

        const auto pool = matrix(pts, 10);
        EmbeddingMatrix seeds = seed_pts.empty() ? EmbeddingMatrix{} : matrix(seed_pts, 1000);
        std::vector<ExampleId> ids;
        for (std::size_t i = 0; i < n; ++i) ids.push_back(10 + static_cast<ExampleId>(i));

        const auto got = kcenter_greedy(pool, k, seeds);
        const auto want = oracle::kcenter(pts, ids, k, seed_pts);
        CHECK(got.selected == want.selected);
        CHECK(got.radii == want.radii);
        // radii never increase
        for (std::size_t i = 1; i < got.radii.size(); ++i) CHECK(got.radii[i] <= got.radii[i - 1]);
    }
}

TEST_CASE("greedy coverage is within twice the optimum") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 8;
        const std::size_t k = 1 + rng() % std::min<std::size_t>(3, n);
        const auto pts = random_points(rng, n, 2, false);
        const auto r = kcenter_greedy(matrix(pts), k);
        CHECK(r.coverage_radius <= 2.0 * oracle::optimal_kcenter_radius(pts, k) + 1e-12);
    }
}
