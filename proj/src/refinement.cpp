#include "prospect/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "prospect/error.hpp"
#include "prospect/hashing.hpp"
#include "prospect/score_cache.hpp"

namespace prospect {

// ---------------------------------------------------------------- reward scorers

std::vector<double> FunctionRewardScorer::score_batch(std::span<const InstructionExample> batch) const {
    std::vector<double> out;
    out.reserve(batch.size());
    for (const auto& ex : batch) out.push_back(fn_(ex));
    return out;
}

FunctionRewardScorer FunctionRewardScorer::constant(double value) {
    return FunctionRewardScorer([value](const InstructionExample&) { return value; },
                                "constant-reward:" + std::to_string(value));
}

FunctionRewardScorer FunctionRewardScorer::content_hash() {
    return FunctionRewardScorer(
        [](const InstructionExample& ex) {
            const auto h = fnv1a64(content_fingerprint(ex));
            return static_cast<double>(h >> 11) * 0x1.0p-53;
        },
        "hash-reward-v1");
}

HttpRewardScorer::HttpRewardScorer(HttpEndpoint endpoint, std::string model)
    : endpoint_(std::move(endpoint)), model_(std::move(model)) {}

std::string HttpRewardScorer::fingerprint() const {
    return "http-reward:" + endpoint_.base_url + (model_.empty() ? "" : "#" + model_);
}

std::vector<double> HttpRewardScorer::score_batch(std::span<const InstructionExample> batch) const {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& ex : batch) items.push_back({{"instruction", question_text(ex)}, {"output", ex.output}});
    nlohmann::json body = {{"items", std::move(items)}};
    if (!model_.empty()) body["model"] = model_;
    const auto res = post_json(endpoint_, "/reward", body);
    try {
        auto rewards = res.at("rewards").get<std::vector<double>>();
        if (rewards.size() != batch.size())
            throw BackendError(fingerprint() + ": got " + std::to_string(rewards.size()) + " rewards for " +
                                   std::to_string(batch.size()) + " items",
                               false);
        return rewards;
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(fingerprint() + ": malformed reward response: " + e.what(), false);
    }
}

// ---------------------------------------------------------------- scoring

namespace {

std::string reward_key(const std::string& scorer_fp, const InstructionExample& ex) {
    Fingerprinter fp;
    fp.add(std::string_view{"reward"}).add(scorer_fp).add(content_fingerprint(ex));
    return fp.finish();
}

}  // namespace

std::vector<RewardScoredExample> score_rewards(std::span<const InstructionExample> dataset, const RewardScorer& scorer,
                                               ScoreCache* cache, std::size_t batch_size, RewardRunStats* stats) {
    if (batch_size == 0) throw ConfigError("reward batch size must be positive");
    const auto scorer_fp = scorer.fingerprint();
    RewardRunStats local;

    std::vector<RewardScoredExample> out(dataset.size());
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out[i].example_id = dataset[i].id;
        if (cache != nullptr) {
            if (const auto hit = cache->lookup(reward_key(scorer_fp, dataset[i])); hit && hit->values.size() == 1) {
                out[i].reward = hit->values.front();
                ++local.cached;
                continue;
            }
        }
        missing.push_back(i);
    }

    std::vector<InstructionExample> batch;
    for (std::size_t begin = 0; begin < missing.size(); begin += batch_size) {
        const auto end = std::min(missing.size(), begin + batch_size);
        batch.clear();
        for (std::size_t j = begin; j < end; ++j) batch.push_back(dataset[missing[j]]);
        const auto rewards = scorer.score_batch(batch);
        if (rewards.size() != batch.size())
            throw BackendError(scorer_fp + ": reward count does not match batch size", false);
        ++local.backend_batches;
        for (std::size_t j = 0; j < batch.size(); ++j) {
            if (!std::isfinite(rewards[j]))
                throw InvariantError("non-finite reward for example " + std::to_string(batch[j].id));
            out[missing[begin + j]].reward = rewards[j];
            if (cache != nullptr) cache->store(reward_key(scorer_fp, batch[j]), CacheEntry{{rewards[j]}, {}});
        }
        local.scored += batch.size();
    }
    if (stats != nullptr) *stats = local;
    return out;
}

QualityPool build_quality_pool(std::span<const RewardScoredExample> rewards, std::size_t pool_size,
                               std::size_t elite_size) {
    if (pool_size > rewards.size())
        throw ConfigError("pool size " + std::to_string(pool_size) + " exceeds dataset size " +
                          std::to_string(rewards.size()));
    if (elite_size >= pool_size)
        throw ConfigError("elite size " + std::to_string(elite_size) + " must be smaller than pool size " +
                          std::to_string(pool_size));

    std::vector<RewardScoredExample> ranked(rewards.begin(), rewards.end());
    const auto better = [](const RewardScoredExample& a, const RewardScoredExample& b) {
        return a.reward != b.reward ? a.reward > b.reward : a.example_id < b.example_id;
    };
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(pool_size), ranked.end(), better);

    QualityPool out;
    for (std::size_t r = 0; r < pool_size; ++r)
        (r < elite_size ? out.elite_ids : out.pool_ids).push_back(ranked[r].example_id);
    return out;
}

// ---------------------------------------------------------------- task sets

std::string RefinedTaskSet::fingerprint() const {
    Fingerprinter fp;
    fp.add(std::string_view{"task-set-v1"}).add(static_cast<std::int64_t>(tasks.size()));
    for (const auto& t : tasks) fp.add(t.task_text).add(t.answer_text);
    return fp.finish();
}

namespace {

std::unordered_map<ExampleId, const InstructionExample*> index_by_id(std::span<const InstructionExample> dataset) {
    std::unordered_map<ExampleId, const InstructionExample*> by_id;
    by_id.reserve(dataset.size());
    for (const auto& ex : dataset) by_id.emplace(ex.id, &ex);
    return by_id;
}

PredefinedTask make_task(const InstructionExample& ex, std::int64_t task_id, Provenance provenance) {
    PredefinedTask t;
    t.task_id = task_id;
    t.task_text = question_text(ex);
    t.answer_text = ex.output;
    t.provenance = provenance;
    t.source_example_id = ex.id;
    return t;
}

}  // namespace

RefinedTaskSet assemble_refined_set(std::span<const InstructionExample> dataset, std::span<const ExampleId> elite_ids,
                                    std::span<const ExampleId> coreset_ids) {
    std::unordered_set<ExampleId> seen;
    for (auto list : {elite_ids, coreset_ids})
        for (ExampleId id : list)
            if (!seen.insert(id).second)
                throw InvariantError("example id " + std::to_string(id) + " appears more than once in the task set");

    const auto by_id = index_by_id(dataset);
    RefinedTaskSet set;
    set.elite_ids.assign(elite_ids.begin(), elite_ids.end());
    set.coreset_ids.assign(coreset_ids.begin(), coreset_ids.end());
    const auto add = [&](ExampleId id, Provenance p) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw InputError("task set references unknown example id " + std::to_string(id));
        set.tasks.push_back(make_task(*it->second, static_cast<std::int64_t>(set.tasks.size()), p));
    };
    for (ExampleId id : elite_ids) add(id, Provenance::elite);
    for (ExampleId id : coreset_ids) add(id, Provenance::coreset);
    return set;
}

namespace {

/// Uniform integer in [0, bound) by rejection; unlike std::uniform_int_distribution
/// the sequence is fixed by the generator alone.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = 0;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

}  // namespace

RefinedTaskSet sample_random_predefined(std::span<const InstructionExample> dataset, std::size_t m, std::uint64_t seed) {
    if (m == 0) throw ConfigError("random predefined set size must be positive");
    if (m > dataset.size())
        throw ConfigError("random predefined set size " + std::to_string(m) + " exceeds dataset size " +
                          std::to_string(dataset.size()));
    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::mt19937_64 rng(seed);
    RefinedTaskSet set;
    for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + bounded(rng, order.size() - i);
        std::swap(order[i], order[j]);
        set.tasks.push_back(make_task(dataset[order[i]], static_cast<std::int64_t>(i), Provenance::random));
    }
    return set;
}

std::string embedding_text(const InstructionExample& example) { return question_text(example) + "\n" + example.output; }

RefineOutcome refine(std::span<const InstructionExample> dataset, const RewardScorer& reward_scorer,
                     const Embedder& embedder, const RefineConfig& config, ScoreCache* reward_cache) {
    RefineOutcome out;
    out.rewards = score_rewards(dataset, reward_scorer, reward_cache, config.reward_batch_size, &out.reward_stats);
    const auto pool = build_quality_pool(out.rewards, config.pool_size, config.elite_size);
    if (config.coreset_size > pool.pool_ids.size())
        throw ConfigError("coreset size " + std::to_string(config.coreset_size) + " exceeds pool size " +
                          std::to_string(pool.pool_ids.size()) + " (pool minus elite)");

    const auto by_id = index_by_id(dataset);
    const auto embed_ids = [&](const std::vector<ExampleId>& ids) {
        if (ids.empty()) return EmbeddingMatrix{};
        std::vector<std::string> texts;
        texts.reserve(ids.size());
        for (ExampleId id : ids) texts.push_back(embedding_text(*by_id.at(id)));
        return embedder.embed(texts, ids);
    };
    const auto seeds = embed_ids(pool.elite_ids);
    const auto candidates = embed_ids(pool.pool_ids);

    out.kcenter = kcenter_greedy(candidates, config.coreset_size, seeds);
    out.task_set = assemble_refined_set(dataset, pool.elite_ids, out.kcenter.selected);
    return out;
}

// ---------------------------------------------------------------- persistence

std::string serialize_task_set(const RefinedTaskSet& set) {
    std::string out;
    for (const auto& t : set.tasks) {
        const nlohmann::json j = {{"task_id", t.task_id},
                                  {"task_text", t.task_text},
                                  {"answer_text", t.answer_text},
                                  {"provenance", std::string(to_string(t.provenance))},
                                  {"source_example_id", t.source_example_id}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

void save_task_set(const std::filesystem::path& path, const RefinedTaskSet& set) {
    write_file(path, serialize_task_set(set));
}

RefinedTaskSet parse_task_set(std::string_view text, std::string_view source) {
    RefinedTaskSet set;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        const auto where = std::string(source) + ": line " + std::to_string(line_no);
        try {
            const auto j = nlohmann::json::parse(line);
            PredefinedTask t;
            t.task_id = j.at("task_id").get<std::int64_t>();
            t.task_text = j.at("task_text").get<std::string>();
            t.answer_text = j.at("answer_text").get<std::string>();
            t.provenance = parse_provenance(j.at("provenance").get<std::string>());
            t.source_example_id = j.at("source_example_id").get<ExampleId>();
            if (t.answer_text.empty()) throw ParseError(where + ": empty answer_text");
            if (t.provenance == Provenance::elite) set.elite_ids.push_back(t.source_example_id);
            if (t.provenance == Provenance::coreset) set.coreset_ids.push_back(t.source_example_id);
            set.tasks.push_back(std::move(t));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (set.tasks.empty()) throw EmptyDatasetError(std::string(source) + ": task set is empty");
    return set;
}

RefinedTaskSet load_task_set(const std::filesystem::path& path) {
    return parse_task_set(read_file(path), path.string());
}

}  // namespace prospect
