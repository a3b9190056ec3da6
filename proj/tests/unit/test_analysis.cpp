#include "doctest.h"

#include <sstream>

#include "prospect/analysis.hpp"
#include "prospect/error.hpp"
#include "prospect/prospector.hpp"
#include "support/test_support.hpp"

using namespace prospect;

namespace {

RankedSelection sel(std::vector<ExampleId> ids) { return {0.3, Direction::top, std::move(ids)}; }

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<ScoreReport> reports_with_m(std::size_t n, std::size_t m) {
    std::vector<ScoreReport> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> one(m), zero(m, -1.0);
        for (std::size_t j = 0; j < m; ++j) one[j] = j < i % (m + 1) ? -0.5 : -1.5;
        out.push_back(golden_score(static_cast<ExampleId>(i), one, zero));
    }
    return out;
}

}  // namespace

TEST_CASE("overlap hand cases") {
    CHECK(overlap(sel({1, 2, 3}), sel({2, 3, 4})).fraction == 2.0 / 3.0);
    CHECK(overlap(sel({1, 2, 3}), sel({3, 1, 2})).fraction == 1.0);
    CHECK(overlap(sel({1, 2}), sel({3, 4})).fraction == 0.0);
    CHECK(overlap(sel({}), sel({})).fraction == 1.0);
    CHECK_THROWS_AS(overlap(sel({1}), sel({1, 2})), InputError);
    const auto r = overlap(sel({1}), sel({1}), "x", "y");
    CHECK(r.label_a == "x");
    CHECK(r.set_size == 1);
}

TEST_CASE("overlap is reflexive and symmetric") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng() % 20;
        std::vector<ExampleId> a, b;
        for (std::size_t i = 0; i < n; ++i) {
            a.push_back(static_cast<ExampleId>(rng() % 1000 + i * 1000));
            b.push_back(static_cast<ExampleId>(rng() % 1000 + i * 1000));
        }
        CHECK(overlap(sel(a), sel(a)).fraction == 1.0);
        CHECK(overlap(sel(a), sel(b)).fraction == overlap(sel(b), sel(a)).fraction);
    }
}

TEST_CASE("overlap matrix and csv") {
    const std::vector<LabeledSelection> s = {{"alpha", sel({1, 2, 3})}, {"beta", sel({2, 3, 4})}, {"g,c", sel({7, 8, 9})}};
    const auto m = overlap_matrix(s);
    REQUIRE(m.values.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(m.values[i].size() == 3);
        CHECK(m.values[i][i] == 1.0);
        for (std::size_t j = 0; j < 3; ++j) CHECK(m.values[i][j] == m.values[j][i]);
    }
    CHECK(m.values[0][1] == 2.0 / 3.0);
    CHECK(m.values[0][2] == 0.0);
    const auto csv = lines(overlap_matrix_csv(m));
    REQUIRE(csv.size() == 4);
    CHECK(csv[0] == "label,alpha,beta,\"g,c\"");
    CHECK(csv[1] == "alpha,1.000000,0.666667,0.000000");
}

TEST_CASE("report files") {
    testing::TempDir dir;
    const auto reports = reports_with_m(12, 4);
    const std::vector<LabeledSelection> s = {{"top", rank_and_select(reports, 0.25, Direction::top)},
                                             {"bottom", rank_and_select(reports, 0.25, Direction::bottom)}};
    emit_report(reports, s, overlap_matrix(s), dir.path());

    const auto hist = lines(read_file(dir / "gs_histogram.csv"));
    REQUIRE(hist.size() == 6);  // header + m + 1 grid points
    CHECK(hist[0] == "wins,golden_score,count");
    CHECK(hist[1] == "0,0.000000,3");
    CHECK(hist[5] == "4,1.000000,2");
    std::size_t total = 0;
    for (std::size_t i = 1; i < hist.size(); ++i) total += std::stoul(hist[i].substr(hist[i].rfind(',') + 1));
    CHECK(total == 12);

    const auto sels = lines(read_file(dir / "selections.csv"));
    REQUIRE(sels.size() == 3);
    CHECK(sels[1] == "top,top,0.250000,3,0.750000,1.000000,0.916667");
    CHECK(sels[2] == "bottom,bottom,0.250000,3,0.000000,0.000000,0.000000");
    CHECK(std::filesystem::exists(dir / "overlap_matrix.csv"));
    CHECK(read_file(dir / "summary.txt").find("examples scored: 12") != std::string::npos);

    // identical inputs produce identical bytes
    testing::TempDir again;
    emit_report(reports, s, overlap_matrix(s), again.path());
    for (const char* f : {"gs_histogram.csv", "selections.csv", "overlap_matrix.csv", "summary.txt"})
        CHECK(read_file(dir / f) == read_file(again / f));
}

TEST_CASE("report without overlaps omits the matrix") {
    testing::TempDir dir;
    const auto reports = reports_with_m(5, 2);
    emit_report(reports, {}, OverlapMatrix{}, dir.path());
    CHECK_FALSE(std::filesystem::exists(dir / "overlap_matrix.csv"));
    CHECK(read_file(dir / "summary.txt").find("overlap matrix: not computed") != std::string::npos);

    auto mixed = reports;
    mixed[1].one_shot_scores.push_back(-1.0);
    CHECK_THROWS_AS(emit_report(mixed, {}, OverlapMatrix{}, dir.path()), InputError);
    CHECK_THROWS_AS(emit_report(std::vector<ScoreReport>{}, {}, OverlapMatrix{}, dir.path()), InputError);
    const std::vector<LabeledSelection> bad = {{"x", sel({99})}};
    CHECK_THROWS_AS(emit_report(reports, bad, OverlapMatrix{}, dir.path()), InputError);
}
