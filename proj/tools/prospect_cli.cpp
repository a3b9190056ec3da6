// prospect: rank instruction data by one-shot golden score.
//
// Exit codes: 0 success, 2 usage/config, 3 data, 4 backend, 5 I/O, 6 internal.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "prospect/analysis.hpp"
#include "prospect/datamodel.hpp"
#include "prospect/embedder.hpp"
#include "prospect/error.hpp"
#include "prospect/hashing.hpp"
#include "prospect/prospector.hpp"
#include "prospect/refinement.hpp"
#include "prospect/score_cache.hpp"
#include "prospect/scorer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace prospect;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitBackend = 4;
constexpr int kExitIo = 5;
constexpr int kExitInternal = 6;

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::usage: return kExitUsage;
        case ErrorKind::data: return kExitData;
        case ErrorKind::backend: return kExitBackend;
        case ErrorKind::io: return kExitIo;
        case ErrorKind::invariant: return kExitInternal;
    }
    return kExitInternal;
}

/// Error raised inside a pipeline stage, tagged with the stage name.
[[noreturn]] void rethrow_in_stage(const std::string& stage) {
    try {
        throw;
    } catch (const BackendError& e) {
        throw BackendError("[" + stage + "] " + e.what(), e.retryable());
    } catch (const Error& e) {
        throw Error(e.kind(), "[" + stage + "] " + e.what());
    }
}

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
    try {
        return fn();
    } catch (const Error&) {
        rethrow_in_stage(name);
    }
}

struct BackendFlags {
    bool offline = false;
    std::string api_key_env = "PROSPECT_API_KEY";
    int max_attempts = 3;
    int timeout_s = 60;

    std::string scorer = "bigram";
    std::string scorer_corpus;
    bool pure_bigram = false;
    int alphabet = 2;
    std::string scorer_url;
    std::string scorer_model;

    std::string reward = "hash";
    double reward_constant = 0.0;
    std::string reward_url;
    std::string reward_model;

    std::string embedder = "hashing";
    std::size_t embed_dim = 256;
    std::string embedder_url;
    std::string embedder_model;
    std::size_t embed_batch = 64;

    HttpEndpoint endpoint(const std::string& url, const std::string& what) const {
        if (offline) throw ConfigError(what + " backend needs the network but --offline is set");
        if (url.empty()) throw ConfigError(what + " backend needs a URL");
        HttpEndpoint ep;
        ep.base_url = url;
        if (const char* key = std::getenv(api_key_env.c_str())) ep.api_key = key;
        ep.retry.max_attempts = max_attempts;
        ep.timeout = std::chrono::seconds(timeout_s);
        return ep;
    }

    std::unique_ptr<Scorer> make_scorer(std::span<const InstructionExample> dataset) const {
        if (scorer == "bigram") {
            std::string corpus;
            if (!scorer_corpus.empty()) {
                corpus = read_file(scorer_corpus);
            } else {
                for (const auto& ex : dataset) corpus += question_text(ex) + "\n" + ex.output + "\n";
            }
            return std::make_unique<BigramScorer>(corpus, !pure_bigram);
        }
        if (scorer == "uniform") return std::make_unique<UniformScorer>(alphabet);
        if (scorer == "http")
            return std::make_unique<HttpScorer>(endpoint(scorer_url, "scorer"), ScoreProtocol::native, scorer_model);
        if (scorer == "openai")
            return std::make_unique<HttpScorer>(endpoint(scorer_url, "scorer"), ScoreProtocol::openai_completions,
                                                scorer_model);
        throw ConfigError("unknown scorer kind '" + scorer + "'");
    }

    std::unique_ptr<RewardScorer> make_reward() const {
        if (reward == "hash") return std::make_unique<FunctionRewardScorer>(FunctionRewardScorer::content_hash());
        if (reward == "constant") return std::make_unique<FunctionRewardScorer>(FunctionRewardScorer::constant(reward_constant));
        if (reward == "http") return std::make_unique<HttpRewardScorer>(endpoint(reward_url, "reward"), reward_model);
        throw ConfigError("unknown reward kind '" + reward + "'");
    }

    std::unique_ptr<Embedder> make_embedder() const {
        if (embedder == "hashing") return std::make_unique<HashingEmbedder>(embed_dim);
        if (embedder == "http")
            return std::make_unique<HttpEmbedder>(endpoint(embedder_url, "embedder"), EmbedProtocol::native,
                                                  embedder_model, embed_batch);
        if (embedder == "openai")
            return std::make_unique<HttpEmbedder>(endpoint(embedder_url, "embedder"), EmbedProtocol::openai_embeddings,
                                                  embedder_model, embed_batch);
        throw ConfigError("unknown embedder kind '" + embedder + "'");
    }
};

void add_network_flags(CLI::App& cmd, BackendFlags& f) {
    cmd.add_flag("--offline", f.offline, "Refuse network backends");
    cmd.add_option("--api-key-env", f.api_key_env, "Environment variable holding the backend API key");
    cmd.add_option("--max-attempts", f.max_attempts, "Attempts per backend request")->check(CLI::PositiveNumber);
    cmd.add_option("--timeout", f.timeout_s, "Backend timeout in seconds")->check(CLI::PositiveNumber);
}

void add_scorer_flags(CLI::App& cmd, BackendFlags& f) {
    cmd.add_option("--scorer", f.scorer, "Scoring backend")->check(CLI::IsMember({"bigram", "uniform", "http", "openai"}));
    cmd.add_option("--scorer-corpus", f.scorer_corpus, "Training corpus for the bigram scorer (default: the dataset)");
    cmd.add_flag("--pure-bigram", f.pure_bigram, "Bigram scorer ignores bigrams seen in the prompt");
    cmd.add_option("--alphabet", f.alphabet, "Alphabet size of the uniform scorer")->check(CLI::PositiveNumber);
    cmd.add_option("--scorer-url", f.scorer_url, "Base URL of the scoring service");
    cmd.add_option("--scorer-model", f.scorer_model, "Model name sent to the scoring service");
}

void add_refine_backend_flags(CLI::App& cmd, BackendFlags& f) {
    cmd.add_option("--reward", f.reward, "Reward backend")->check(CLI::IsMember({"hash", "constant", "http"}));
    cmd.add_option("--reward-constant", f.reward_constant, "Value returned by the constant reward backend");
    cmd.add_option("--reward-url", f.reward_url, "Base URL of the reward service");
    cmd.add_option("--reward-model", f.reward_model, "Model name sent to the reward service");
    cmd.add_option("--embedder", f.embedder, "Embedding backend")->check(CLI::IsMember({"hashing", "http", "openai"}));
    cmd.add_option("--embed-dim", f.embed_dim, "Dimension of the hashing embedder")->check(CLI::PositiveNumber);
    cmd.add_option("--embedder-url", f.embedder_url, "Base URL of the embedding service");
    cmd.add_option("--embedder-model", f.embedder_model, "Model name sent to the embedding service");
    cmd.add_option("--embed-batch", f.embed_batch, "Texts per embedding request")->check(CLI::PositiveNumber);
}

LoadedDataset load_with_report(const fs::path& path, const std::string& format) {
    const auto fmt = format.empty() ? guess_dataset_format(path) : parse_dataset_format(format);
    auto loaded = load_dataset(path, fmt);
    std::cerr << "loaded " << loaded.examples.size() << " examples from " << path.string() << " ("
              << loaded.report.dropped_empty_output << " dropped for empty output)\n";
    return loaded;
}

fs::path sibling(const fs::path& file, const std::string& suffix) { return fs::path(file.string() + suffix); }

std::string config_hash(const json& config) { return sha256_hex(config.dump()); }

// ---------------------------------------------------------------- refine

struct RefineArgs {
    std::string dataset;
    std::string format;
    std::string out = "tasks.jsonl";
    std::string cache_dir = ".prospect-cache";
    RefineConfig sizes;
    std::size_t random = 0;
    std::uint64_t seed = 0;
};

int cmd_refine(const RefineArgs& args, const BackendFlags& flags) {
    const auto loaded = stage("load", [&] { return load_with_report(args.dataset, args.format); });
    const auto& dataset = loaded.examples;
    json manifest = {{"dataset", args.dataset}, {"dataset_size", dataset.size()}, {"seed", args.seed}};

    RefinedTaskSet set;
    if (args.random > 0) {
        set = stage("sample", [&] { return sample_random_predefined(dataset, args.random, args.seed); });
        manifest["mode"] = "random";
        manifest["m"] = args.random;
    } else {
        const auto reward = flags.make_reward();
        const auto embedder = flags.make_embedder();
        ScoreCache reward_cache(fs::path(args.cache_dir) / "rewards.jsonl");
        const auto outcome =
            stage("refine", [&] { return refine(dataset, *reward, *embedder, args.sizes, &reward_cache); });
        set = outcome.task_set;
        manifest["mode"] = "refined";
        manifest["pool_size"] = args.sizes.pool_size;
        manifest["elite_size"] = args.sizes.elite_size;
        manifest["coreset_size"] = args.sizes.coreset_size;
        manifest["reward_backend"] = reward->fingerprint();
        manifest["embedder_backend"] = embedder->fingerprint();
        manifest["reward_calls"] = {{"batches", outcome.reward_stats.backend_batches},
                                    {"scored", outcome.reward_stats.scored},
                                    {"cached", outcome.reward_stats.cached}};
        json radii = json::array();
        for (double r : outcome.kcenter.radii) radii.push_back(std::isfinite(r) ? json(r) : json(nullptr));
        manifest["coreset_radii"] = radii;
        manifest["coverage_radius"] = outcome.kcenter.coverage_radius;
    }
    manifest["task_count"] = set.task_count();
    manifest["task_set_fingerprint"] = set.fingerprint();
    manifest["config_hash"] = config_hash(manifest);

    stage("write", [&] {
        save_task_set(args.out, set);
        write_file(sibling(args.out, ".manifest.json"), manifest.dump(2) + "\n");
        return 0;
    });
    std::cout << "wrote " << set.task_count() << " tasks (" << set.elite_ids.size() << " elite, "
              << set.coreset_ids.size() << " coreset, "
              << set.task_count() - set.elite_ids.size() - set.coreset_ids.size() << " random) to " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------- prospect

struct ProspectArgs {
    std::string dataset;
    std::string format;
    std::string tasks = "tasks.jsonl";
    std::string out = "scores.jsonl";
    std::string cache_dir = ".prospect-cache";
    std::size_t parallelism = 1;
    std::string query_template;
    std::string demo_template;
    std::string demo_order = "demonstration_first";
    bool quiet = false;
};

int cmd_prospect(const ProspectArgs& args, const BackendFlags& flags) {
    const auto started = std::chrono::steady_clock::now();
    const auto loaded = stage("load", [&] { return load_with_report(args.dataset, args.format); });
    const auto task_set = stage("load", [&] { return load_task_set(args.tasks); });

    ProspectOptions options;
    if (!args.query_template.empty()) options.tmpl.query = args.query_template;
    if (!args.demo_template.empty()) options.tmpl.demonstration = args.demo_template;
    options.tmpl.order = parse_demo_order(args.demo_order);
    options.tmpl.validate();
    options.parallelism = args.parallelism;

    const auto scorer = flags.make_scorer(loaded.examples);
    ScoreCache cache(fs::path(args.cache_dir) / "scores.jsonl");
    options.cache = &cache;
    if (!args.quiet) {
        options.progress = [](std::size_t done, std::size_t total) {
            if (done == total || done % 1000 == 0) std::cerr << "scored " << done << "/" << total << "\n";
        };
    }

    const auto run = stage("prospect", [&] { return prospect::prospect(loaded.examples, task_set, *scorer, options); });
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    json config = {{"dataset", args.dataset},
                   {"tasks", args.tasks},
                   {"scorer", scorer->fingerprint()},
                   {"template", options.tmpl.fingerprint()},
                   {"demo_order", std::string(to_string(options.tmpl.order))}};
    const json manifest = {{"config_hash", config_hash(config)},
                           {"dataset_size", loaded.examples.size()},
                           {"task_count", task_set.task_count()},
                           {"task_set_fingerprint", run.zero.task_set_fingerprint},
                           {"backend_fingerprint", run.zero.backend_fingerprint},
                           {"template_fingerprint", run.zero.template_fingerprint},
                           {"parallelism", args.parallelism},
                           {"calls",
                            {{"zero_shot", run.stats.zero_shot_calls},
                             {"one_shot", run.stats.one_shot_calls},
                             {"total", run.stats.total_calls()}}},
                           {"cache_hits", {{"tasks", run.stats.cached_tasks}, {"examples", run.stats.cached_examples}}},
                           {"zero_shot_scores", run.zero.scores},
                           {"wall_time_seconds", wall}};
    stage("write", [&] {
        write_scores_file(args.out, run.reports);
        write_file(sibling(args.out, ".manifest.json"), manifest.dump(2) + "\n");
        return 0;
    });
    std::cout << "scored " << run.reports.size() << " examples against " << task_set.task_count() << " tasks; "
              << "scorer calls: " << run.stats.total_calls() << " (" << run.stats.zero_shot_calls << " zero-shot, "
              << run.stats.one_shot_calls << " one-shot)\n";
    return 0;
}

// ---------------------------------------------------------------- export

struct ExportArgs {
    std::string dataset;
    std::string format;
    std::string scores = "scores.jsonl";
    std::string out;
    std::string out_format;
    double fraction = 0.05;
    std::string direction = "top";
};

int cmd_export(const ExportArgs& args) {
    if (!(args.fraction > 0.0 && args.fraction <= 1.0))
        throw ConfigError("--fraction must be in (0, 1], got " + std::to_string(args.fraction));
    const auto loaded = stage("load", [&] { return load_with_report(args.dataset, args.format); });
    const auto reports = stage("load", [&] { return read_scores_file(args.scores); });
    const auto selection = rank_and_select(reports, args.fraction, parse_direction(args.direction));

    std::unordered_map<ExampleId, const InstructionExample*> by_id;
    for (const auto& ex : loaded.examples) by_id.emplace(ex.id, &ex);
    std::vector<InstructionExample> subset;
    subset.reserve(selection.example_ids.size());
    for (ExampleId id : selection.example_ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end())
            throw InputError("scores file references example " + std::to_string(id) + " missing from the dataset");
        subset.push_back(*it->second);
    }

    const auto fmt =
        !args.out_format.empty() ? parse_dataset_format(args.out_format) : guess_dataset_format(args.out);
    stage("write", [&] {
        save_dataset(args.out, subset, fmt);
        write_file(sibling(args.out, ".scores.jsonl"), serialize_scores_sidecar(reports, selection.example_ids));
        return 0;
    });
    std::cout << "exported " << subset.size() << " examples (" << to_string(selection.direction) << ' '
              << args.fraction << ") to " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------- overlap / report

struct SelectionArgs {
    std::vector<std::string> scores;
    std::vector<std::string> labels;
    double fraction = 0.3;
    std::string direction = "top";
};

std::vector<LabeledSelection> load_selections(const SelectionArgs& args, std::vector<std::vector<ScoreReport>>* keep) {
    if (!args.labels.empty() && args.labels.size() != args.scores.size())
        throw ConfigError("give one --label per --scores file");
    std::vector<LabeledSelection> out;
    for (std::size_t i = 0; i < args.scores.size(); ++i) {
        auto reports = read_scores_file(args.scores[i]);
        LabeledSelection s;
        s.label = args.labels.empty() ? fs::path(args.scores[i]).stem().string() : args.labels[i];
        s.selection = rank_and_select(reports, args.fraction, parse_direction(args.direction));
        out.push_back(std::move(s));
        if (keep != nullptr) keep->push_back(std::move(reports));
    }
    return out;
}

int cmd_overlap(const SelectionArgs& args, const std::string& out) {
    const auto selections = stage("load", [&] { return load_selections(args, nullptr); });
    const auto matrix = overlap_matrix(selections);
    const auto csv = overlap_matrix_csv(matrix);
    std::cout << csv;
    if (!out.empty()) write_file(out, csv);
    return 0;
}

struct ReportArgs {
    SelectionArgs overlap;
    std::vector<double> fractions{0.01, 0.05, 0.1, 0.3, 0.5};
    std::string out_dir = "report";
};

int cmd_report(const ReportArgs& args) {
    std::vector<std::vector<ScoreReport>> all;
    const auto overlap_sets = stage("load", [&] { return load_selections(args.overlap, &all); });

    std::vector<LabeledSelection> selections;
    const auto& primary = all.front();
    const auto primary_label = overlap_sets.front().label;
    for (double f : args.fractions) {
        std::ostringstream name;
        name << primary_label << " top " << f;
        selections.push_back({name.str(), rank_and_select(primary, f, Direction::top)});
    }
    selections.push_back({primary_label + " bottom 0.5", rank_and_select(primary, 0.5, Direction::bottom)});

    const auto matrix = overlap_sets.size() > 1 ? overlap_matrix(overlap_sets) : OverlapMatrix{};
    stage("write", [&] {
        emit_report(primary, selections, matrix, args.out_dir);
        return 0;
    });
    std::cout << "report written to " << args.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------- cost

struct CostArgs {
    std::int64_t dataset_size = 52'002;
    std::int64_t task_count = 100;
    double prospector_params = 1.0;
    double baseline_params = 1.0;
    std::int64_t baseline_tasks = 1000;
    std::string out;
};

int cmd_cost(const CostArgs& args) {
    const auto c = estimate_cost(args.dataset_size, args.task_count, args.prospector_params, args.baseline_params,
                                 args.baseline_tasks);
    const json j = {{"dataset_size", c.dataset_size},
                    {"task_count", c.task_count},
                    {"zero_shot_calls", c.zero_shot_calls},
                    {"one_shot_calls", c.one_shot_calls},
                    {"total_calls", c.total_calls},
                    {"engine_zero_shot_calls", c.engine_zero_shot_calls},
                    {"engine_total_calls", c.engine_total_calls},
                    {"baseline_task_count", c.baseline_task_count},
                    {"baseline_total_calls", c.baseline_total_calls},
                    {"relative_compute", c.relative_compute}};
    std::cout << "dataset size:        " << c.dataset_size << "\n"
              << "tasks:               " << c.task_count << "\n"
              << "zero-shot calls:     " << c.zero_shot_calls << " (engine needs " << c.engine_zero_shot_calls << ")\n"
              << "one-shot calls:      " << c.one_shot_calls << "\n"
              << "total calls:         " << c.total_calls << "\n"
              << "baseline total:      " << c.baseline_total_calls << " (" << c.baseline_task_count << " tasks)\n"
              << "relative compute:    " << c.relative_compute << "\n";
    if (!args.out.empty()) write_file(args.out, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rank instruction-tuning data by one-shot golden score"};
    app.set_config("--config", "", "Read options from a TOML/INI file (flags override it)");
    app.require_subcommand(1);

    BackendFlags flags;

    RefineArgs refine_args;
    auto* refine_cmd = app.add_subcommand("refine", "Build the predefined task set");
    refine_cmd->add_option("--dataset", refine_args.dataset, "Instruction dataset")->required()->check(CLI::ExistingFile);
    refine_cmd->add_option("--format", refine_args.format, "alpaca_json or jsonl (default: by extension)");
    refine_cmd->add_option("--out", refine_args.out, "Task-set file to write");
    refine_cmd->add_option("--cache-dir", refine_args.cache_dir, "Cache directory");
    refine_cmd->add_option("--pool-size", refine_args.sizes.pool_size, "Top-reward pool size");
    refine_cmd->add_option("--elite-size", refine_args.sizes.elite_size, "Elite subset size");
    refine_cmd->add_option("--coreset-size", refine_args.sizes.coreset_size, "k-center coreset size");
    refine_cmd->add_option("--reward-batch", refine_args.sizes.reward_batch_size, "Examples per reward request")
        ->check(CLI::PositiveNumber);
    refine_cmd->add_option("--random", refine_args.random, "Sample this many random tasks instead of refining");
    refine_cmd->add_option("--seed", refine_args.seed, "Random seed");
    add_network_flags(*refine_cmd, flags);
    add_refine_backend_flags(*refine_cmd, flags);

    ProspectArgs prospect_args;
    auto* prospect_cmd = app.add_subcommand("prospect", "Score every example against the task set");
    prospect_cmd->add_option("--dataset", prospect_args.dataset, "Instruction dataset")->required()->check(CLI::ExistingFile);
    prospect_cmd->add_option("--format", prospect_args.format, "alpaca_json or jsonl (default: by extension)");
    prospect_cmd->add_option("--tasks", prospect_args.tasks, "Task-set file")->check(CLI::ExistingFile);
    prospect_cmd->add_option("--out", prospect_args.out, "Scores file to write");
    prospect_cmd->add_option("--cache-dir", prospect_args.cache_dir, "Cache directory");
    prospect_cmd->add_option("--parallelism", prospect_args.parallelism, "Concurrent scoring workers")
        ->check(CLI::PositiveNumber);
    prospect_cmd->add_option("--query-template", prospect_args.query_template, "Query template");
    prospect_cmd->add_option("--demo-template", prospect_args.demo_template, "Demonstration template");
    prospect_cmd->add_option("--demo-order", prospect_args.demo_order, "demonstration_first or task_first");
    prospect_cmd->add_flag("--quiet", prospect_args.quiet, "No progress output");
    add_network_flags(*prospect_cmd, flags);
    add_scorer_flags(*prospect_cmd, flags);

    ExportArgs export_args;
    auto* export_cmd = app.add_subcommand("export", "Write the top or bottom fraction of the dataset");
    export_cmd->add_option("--dataset", export_args.dataset, "Instruction dataset")->required()->check(CLI::ExistingFile);
    export_cmd->add_option("--format", export_args.format, "Input format (default: by extension)");
    export_cmd->add_option("--scores", export_args.scores, "Scores file")->check(CLI::ExistingFile);
    export_cmd->add_option("--out", export_args.out, "Dataset file to write")->required();
    export_cmd->add_option("--out-format", export_args.out_format, "Output format (default: by --out extension)");
    export_cmd->add_option("--fraction", export_args.fraction, "Fraction in (0, 1]");
    export_cmd->add_option("--direction", export_args.direction, "top or bottom");

    SelectionArgs overlap_args;
    std::string overlap_out;
    auto* overlap_cmd = app.add_subcommand("overlap", "Share of identical examples between selections");
    overlap_cmd->add_option("--scores", overlap_args.scores, "Scores files")->required()->check(CLI::ExistingFile);
    overlap_cmd->add_option("--label", overlap_args.labels, "One label per scores file");
    overlap_cmd->add_option("--fraction", overlap_args.fraction, "Fraction in (0, 1]");
    overlap_cmd->add_option("--direction", overlap_args.direction, "top or bottom");
    overlap_cmd->add_option("--out", overlap_out, "CSV file to write");

    ReportArgs report_args;
    auto* report_cmd = app.add_subcommand("report", "Histogram, selection summaries and overlap matrix");
    report_cmd->add_option("--scores", report_args.overlap.scores, "Scores files (the first is summarized)")
        ->required()
        ->check(CLI::ExistingFile);
    report_cmd->add_option("--label", report_args.overlap.labels, "One label per scores file");
    report_cmd->add_option("--fractions", report_args.fractions, "Top fractions to summarize")->delimiter(',');
    report_cmd->add_option("--overlap-fraction", report_args.overlap.fraction, "Fraction compared across files");
    report_cmd->add_option("--out-dir", report_args.out_dir, "Output directory");

    CostArgs cost_args;
    auto* cost_cmd = app.add_subcommand("cost", "Inference-count accounting");
    cost_cmd->add_option("dataset_size", cost_args.dataset_size, "Number of candidate examples")->required();
    cost_cmd->add_option("task_count", cost_args.task_count, "Number of predefined tasks")->required();
    cost_cmd->add_option("--prospector-params", cost_args.prospector_params, "Prospector parameter count");
    cost_cmd->add_option("--baseline-params", cost_args.baseline_params, "Baseline parameter count");
    cost_cmd->add_option("--baseline-tasks", cost_args.baseline_tasks, "Baseline task count");
    cost_cmd->add_option("--out", cost_args.out, "JSON file to write");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*refine_cmd) return cmd_refine(refine_args, flags);
        if (*prospect_cmd) return cmd_prospect(prospect_args, flags);
        if (*export_cmd) return cmd_export(export_args);
        if (*overlap_cmd) return cmd_overlap(overlap_args, overlap_out);
        if (*report_cmd) return cmd_report(report_args);
        if (*cost_cmd) return cmd_cost(cost_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
