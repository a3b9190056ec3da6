#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>

#include "prospect/prospector.hpp"
#include "prospect/refinement.hpp"
#include "support/test_support.hpp"

using namespace prospect;
using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

/// Runs the CLI with `args` (already shell-quoted where needed).
RunResult run(const testing::TempDir& dir, const std::string& args) {
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + PROSPECT_CLI_PATH + "\" " + args + " > \"" + out.string() +
                            "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

json manifest(const std::filesystem::path& p) { return json::parse(read_file(p)); }

}  // namespace

TEST_CASE("cost subcommand reports total call counts") {
    testing::TempDir dir;
    auto r = run(dir, "cost 52002 1000 --out " + q(dir / "c.json"));
    REQUIRE(r.code == 0);
    CHECK(manifest(dir / "c.json").at("total_calls") == 52'054'002);
    r = run(dir, "cost 52002 100 --out " + q(dir / "c.json"));
    REQUIRE(r.code == 0);
    CHECK(manifest(dir / "c.json").at("total_calls") == 5'252'202);
    CHECK(r.out.find("5252202") != std::string::npos);
}

TEST_CASE("usage and data errors map to distinct exit codes") {
    testing::TempDir dir;
    CHECK(run(dir, "").code == 2);
    CHECK(run(dir, "frobnicate").code == 2);
    CHECK(run(dir, "refine --dataset " + q(dir / "missing.json")).code == 2);
    CHECK(run(dir, "cost 0 10").code == 2);

    write_file(dir / "bad.json", "[{\"instruction\": \"x\"}]");
    auto r = run(dir, "refine --dataset " + q(dir / "bad.json") + " --out " + q(dir / "t.jsonl"));
    CHECK(r.code == 3);
    CHECK(r.err.find("record 0") != std::string::npos);

    const auto ds = testing::synthetic_dataset(30, 1);
    save_dataset(dir / "d.json", ds, DatasetFormat::alpaca_json);
    save_task_set(dir / "t.jsonl", sample_random_predefined(ds, 3, 1));
    r = run(dir, "prospect --offline --scorer http --scorer-url http://127.0.0.1:1 --dataset " + q(dir / "d.json") +
                     " --tasks " + q(dir / "t.jsonl") + " --cache-dir " + q(dir / "cache"));
    CHECK(r.code == 2);
}

TEST_CASE("refine, prospect, export, overlap and report end to end") {
    testing::TempDir dir;
    const auto ds = testing::synthetic_dataset(20, 2);
    save_dataset(dir / "d.json", ds, DatasetFormat::alpaca_json);
    const std::string common = " --dataset " + q(dir / "d.json") + " --cache-dir " + q(dir / "cache");

    auto r = run(dir, "refine" + common + " --pool-size 12 --elite-size 2 --coreset-size 3 --out " + q(dir / "t.jsonl"));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto tasks = load_task_set(dir / "t.jsonl");
    CHECK(tasks.task_count() == 5);
    CHECK(manifest(dir / "t.jsonl.manifest.json").at("task_count") == 5);

    const std::string prospect_args =
        "prospect --quiet --parallelism 4" + common + " --tasks " + q(dir / "t.jsonl") + " --out " + q(dir / "s.jsonl");
    r = run(dir, prospect_args);
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(manifest(dir / "s.jsonl.manifest.json").at("calls").at("total") == 105);
    const auto first = read_file(dir / "s.jsonl");

    r = run(dir, prospect_args);
    REQUIRE(r.code == 0);
    CHECK(manifest(dir / "s.jsonl.manifest.json").at("calls").at("total") == 0);
    CHECK(read_file(dir / "s.jsonl") == first);

    // a different template is a different cache context
    r = run(dir, prospect_args + " --demo-order task_first");
    REQUIRE(r.code == 0);
    CHECK(manifest(dir / "s.jsonl.manifest.json").at("calls").at("total") == 105);
    r = run(dir, prospect_args + " --demo-template \"{instruction}\"");
    CHECK(r.code == 2);

    // restore the default-template scores
    REQUIRE(run(dir, prospect_args).code == 0);
    CHECK(read_file(dir / "s.jsonl") == first);

    r = run(dir, "export --dataset " + q(dir / "d.json") + " --scores " + q(dir / "s.jsonl") +
                     " --fraction 0.3 --out " + q(dir / "top.jsonl"));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto top = load_dataset(dir / "top.jsonl", DatasetFormat::jsonl);
    CHECK(top.examples.size() == 6);
    const auto reports = read_scores_file(dir / "s.jsonl");
    const auto want = rank_and_select(reports, 0.3, Direction::top);
    for (std::size_t i = 0; i < want.example_ids.size(); ++i)
        CHECK(top.examples[i].instruction == ds[static_cast<std::size_t>(want.example_ids[i])].instruction);
    CHECK(std::filesystem::exists(dir / "top.jsonl.scores.jsonl"));
    CHECK(run(dir, "export --dataset " + q(dir / "d.json") + " --scores " + q(dir / "s.jsonl") +
                       " --fraction 0 --out " + q(dir / "x.json"))
              .code == 2);

    r = run(dir, "overlap --scores " + q(dir / "s.jsonl") + " --scores " + q(dir / "s.jsonl") +
                     " --label a --label b --out " + q(dir / "o.csv"));
    REQUIRE(r.code == 0);
    CHECK(read_file(dir / "o.csv") == "label,a,b\na,1.000000,1.000000\nb,1.000000,1.000000\n");

    r = run(dir, "report --scores " + q(dir / "s.jsonl") + " --out-dir " + q(dir / "rep"));
    REQUIRE(r.code == 0);
    CHECK(std::filesystem::exists(dir / "rep/gs_histogram.csv"));
    CHECK_FALSE(std::filesystem::exists(dir / "rep/overlap_matrix.csv"));
}

TEST_CASE("random task sets from the command line and config files") {
    testing::TempDir dir;
    save_dataset(dir / "d.jsonl", testing::synthetic_dataset(200, 3), DatasetFormat::jsonl);
    auto r = run(dir, "refine --dataset " + q(dir / "d.jsonl") + " --random 100 --seed 7 --out " + q(dir / "a.jsonl"));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(load_task_set(dir / "a.jsonl").task_count() == 100);

    write_file(dir / "cfg.toml", "[refine]\nrandom = 100\nseed = 7\n");
    r = run(dir, "--config " + q(dir / "cfg.toml") + " refine --dataset " + q(dir / "d.jsonl") + " --out " +
                     q(dir / "b.jsonl"));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(read_file(dir / "a.jsonl") == read_file(dir / "b.jsonl"));

    // flags override the file
    r = run(dir, "--config " + q(dir / "cfg.toml") + " refine --seed 8 --dataset " + q(dir / "d.jsonl") + " --out " +
                     q(dir / "c.jsonl"));
    REQUIRE(r.code == 0);
    CHECK(read_file(dir / "a.jsonl") != read_file(dir / "c.jsonl"));
}
