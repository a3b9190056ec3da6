#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "prospect/datamodel.hpp"
#include "prospect/embedder.hpp"
#include "prospect/http_client.hpp"
#include "prospect/kcenter.hpp"

namespace prospect {

class ScoreCache;

struct RewardScoredExample {
    ExampleId example_id = 0;
    double reward = 0.0;

    bool operator==(const RewardScoredExample&) const = default;
};

/// Scalar quality scorer over (question, answer) pairs. Must be safe to call concurrently.
class RewardScorer {
public:
    virtual ~RewardScorer() = default;
    /// One reward per example, in order.
    virtual std::vector<double> score_batch(std::span<const InstructionExample> batch) const = 0;
    virtual std::string fingerprint() const = 0;
};

/// Reward computed locally from each example; used for stubs and offline runs.
class FunctionRewardScorer final : public RewardScorer {
public:
    using Fn = std::function<double(const InstructionExample&)>;
    FunctionRewardScorer(Fn fn, std::string fingerprint) : fn_(std::move(fn)), fingerprint_(std::move(fingerprint)) {}

    std::vector<double> score_batch(std::span<const InstructionExample> batch) const override;
    std::string fingerprint() const override { return fingerprint_; }

    static FunctionRewardScorer constant(double value);
    /// Pseudo-random reward in [0, 1) derived from the example's content hash.
    static FunctionRewardScorer content_hash();

private:
    Fn fn_;
    std::string fingerprint_;
};

/// POST {base}/reward {"items": [{"instruction": IQ, "output": IA}...]} -> {"rewards": [float...]}
class HttpRewardScorer final : public RewardScorer {
public:
    explicit HttpRewardScorer(HttpEndpoint endpoint, std::string model = {});
    std::vector<double> score_batch(std::span<const InstructionExample> batch) const override;
    std::string fingerprint() const override;

private:
    HttpEndpoint endpoint_;
    std::string model_;
};

struct RewardRunStats {
    std::size_t backend_batches = 0;
    std::size_t scored = 0;   // examples sent to the backend
    std::size_t cached = 0;   // examples served from the cache
};

/// Rewards for every example, in dataset order. With a cache, rewards are
/// checkpointed after every batch and reused on later runs, so a failed run
/// keeps its progress. Throws InvariantError for a non-finite reward.
std::vector<RewardScoredExample> score_rewards(std::span<const InstructionExample> dataset, const RewardScorer& scorer,
                                               ScoreCache* cache = nullptr, std::size_t batch_size = 64,
                                               RewardRunStats* stats = nullptr);

struct QualityPool {
    std::vector<ExampleId> elite_ids;  // ranks 1 .. elite_size
    std::vector<ExampleId> pool_ids;   // ranks elite_size + 1 .. pool_size
};

/// Ranks by reward (descending, ties by lower id). Throws ConfigError when
/// pool_size exceeds the number of rewards or elite_size >= pool_size.
QualityPool build_quality_pool(std::span<const RewardScoredExample> rewards, std::size_t pool_size = 10'000,
                               std::size_t elite_size = 20);

struct RefinedTaskSet {
    std::vector<ExampleId> elite_ids;
    std::vector<ExampleId> coreset_ids;
    std::vector<PredefinedTask> tasks;

    std::size_t task_count() const { return tasks.size(); }
    /// Content hash over the ordered (task_text, answer_text) pairs.
    std::string fingerprint() const;
};

/// Task j takes T = question_text(example), A = example.output; elite tasks
/// first, then coreset tasks, each in the given order. Throws InvariantError
/// when the id lists overlap or repeat, InputError for an unknown id.
RefinedTaskSet assemble_refined_set(std::span<const InstructionExample> dataset, std::span<const ExampleId> elite_ids,
                                    std::span<const ExampleId> coreset_ids);

/// Uniform sample of m examples without replacement, in sampled order,
/// reproducible from `seed` on any platform. Throws ConfigError when m is
/// 0 or exceeds the dataset size.
RefinedTaskSet sample_random_predefined(std::span<const InstructionExample> dataset, std::size_t m, std::uint64_t seed);

/// Text embedded for diversity selection: question, newline, answer.
std::string embedding_text(const InstructionExample& example);

struct RefineConfig {
    std::size_t pool_size = 10'000;
    std::size_t elite_size = 20;
    std::size_t coreset_size = 80;
    std::size_t reward_batch_size = 64;
};

struct RefineOutcome {
    RefinedTaskSet task_set;
    std::vector<RewardScoredExample> rewards;
    KCenterResult kcenter;
    RewardRunStats reward_stats;
};

/// End to end: reward-score, take the quality pool and elite, embed, pick the
/// coreset seeded with the elite embeddings, assemble.
RefineOutcome refine(std::span<const InstructionExample> dataset, const RewardScorer& reward_scorer,
                     const Embedder& embedder, const RefineConfig& config, ScoreCache* reward_cache = nullptr);

/// JSON-lines: {"task_id", "task_text", "answer_text", "provenance", "source_example_id"}.
std::string serialize_task_set(const RefinedTaskSet& set);
void save_task_set(const std::filesystem::path& path, const RefinedTaskSet& set);
/// Throws ParseError / IoError.
RefinedTaskSet load_task_set(const std::filesystem::path& path);
RefinedTaskSet parse_task_set(std::string_view text, std::string_view source = "<memory>");

}  // namespace prospect
