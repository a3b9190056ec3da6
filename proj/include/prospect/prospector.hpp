#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "prospect/datamodel.hpp"
#include "prospect/prompt.hpp"
#include "prospect/refinement.hpp"
#include "prospect/scorer.hpp"

namespace prospect {

class ScoreCache;

/// Zero-shot score per task, tagged with what it was computed against.
struct ZeroShotVector {
    std::vector<double> scores;               // s_zero per task
    std::vector<std::int64_t> token_counts;   // L per task
    std::string task_set_fingerprint;
    std::string backend_fingerprint;
    std::string template_fingerprint;

    std::size_t size() const { return scores.size(); }
};

/// Backend calls made (not served from cache) during a run.
struct CallStats {
    std::int64_t zero_shot_calls = 0;
    std::int64_t one_shot_calls = 0;
    std::int64_t cached_tasks = 0;
    std::int64_t cached_examples = 0;

    std::int64_t total_calls() const { return zero_shot_calls + one_shot_calls; }
};

/// Mean answer log-prob of every task given only its rendered query.
/// With a cache, each task's score is stored as soon as it is computed.
ZeroShotVector compute_zero_shot(const RefinedTaskSet& task_set, const Scorer& scorer, const PromptTemplate& tmpl,
                                 ScoreCache* cache = nullptr, std::size_t parallelism = 1, CallStats* stats = nullptr);

/// Copies L and s_zero from `zero` into the tasks.
void apply_zero_shot(RefinedTaskSet& task_set, const ZeroShotVector& zero);

/// Mean answer log-prob of every task with `example` as the one-shot
/// demonstration. Throws StaleCacheError when `zero` was computed for a
/// different task set, backend or template.
std::vector<double> compute_one_shot(const InstructionExample& example, const RefinedTaskSet& task_set,
                                     const ZeroShotVector& zero, const Scorer& scorer, const PromptTemplate& tmpl);

/// wins = #{j : one_shot[j] > zero_shot[j]} (strict), golden_score = wins / m.
/// Throws InvariantError on a length mismatch or m = 0.
ScoreReport golden_score(ExampleId example_id, std::span<const double> one_shot, std::span<const double> zero_shot);
ScoreReport golden_score(ExampleId example_id, std::span<const double> one_shot, const ZeroShotVector& zero);

struct ProspectOptions {
    PromptTemplate tmpl;
    std::size_t parallelism = 1;
    ScoreCache* cache = nullptr;
    /// Called after each example finishes, from worker threads, serialized.
    std::function<void(std::size_t done, std::size_t total)> progress;
};

struct ProspectRun {
    ZeroShotVector zero;
    std::vector<ScoreReport> reports;  // ascending example id
    CallStats stats;
};

/// Scores every example. Results do not depend on `parallelism` or on
/// completion order. With a cache, each example is persisted as soon as it
/// is scored and an interrupted run resumes where it stopped. The first
/// worker exception stops the run and is rethrown.
ProspectRun prospect(std::span<const InstructionExample> dataset, const RefinedTaskSet& task_set, const Scorer& scorer,
                     const ProspectOptions& options);

/// floor(fraction * n), at least 1. Throws ConfigError unless 0 < fraction <= 1.
std::size_t selection_size(double fraction, std::size_t n);

/// Top: golden_score descending; bottom: ascending. Ties by ascending id.
/// Throws InputError on empty reports, ConfigError on a bad fraction.
RankedSelection rank_and_select(std::span<const ScoreReport> reports, double fraction, Direction direction);

/// Scores file: one JSON object per line, ascending example id:
///   {"example_id", "golden_score", "wins", "m", "one_shot_scores"}
std::string serialize_scores(std::span<const ScoreReport> reports);
void write_scores_file(const std::filesystem::path& path, std::span<const ScoreReport> reports);
/// Throws ParseError when a line is malformed or violates golden_score = wins / m.
std::vector<ScoreReport> read_scores_file(const std::filesystem::path& path);
std::vector<ScoreReport> parse_scores(std::string_view text, std::string_view source = "<memory>");

/// Sidecar written next to an export, in selection order:
///   {"example_id", "golden_score", "wins", "m"}
std::string serialize_scores_sidecar(std::span<const ScoreReport> reports, std::span<const ExampleId> order);

/// Inference-count accounting for a prospecting run.
///
/// Counts one zero-shot call per dataset example
/// plus dataset_size x task_count one-shot calls. The engine itself needs
/// only task_count zero-shot calls; that count is reported separately.
/// relative_compute = (total_calls x prospector_params) /
///                    (baseline_total_calls x baseline_params),
/// where the baseline scores the same dataset against baseline_task_count tasks.
struct CostEstimate {
    std::int64_t dataset_size = 0;
    std::int64_t task_count = 0;
    std::int64_t zero_shot_calls = 0;
    std::int64_t one_shot_calls = 0;
    std::int64_t total_calls = 0;
    std::int64_t engine_zero_shot_calls = 0;
    std::int64_t engine_total_calls = 0;
    std::int64_t baseline_task_count = 0;
    std::int64_t baseline_total_calls = 0;
    double relative_compute = 0.0;
};

/// Throws ConfigError for a non-positive dataset size, negative task count
/// or non-positive parameter counts.
CostEstimate estimate_cost(std::int64_t dataset_size, std::int64_t task_count, double prospector_params = 1.0,
                           double baseline_params = 1.0, std::int64_t baseline_task_count = 1000);

}  // namespace prospect
