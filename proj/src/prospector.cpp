#include "prospect/prospector.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "prospect/error.hpp"
#include "prospect/hashing.hpp"
#include "prospect/score_cache.hpp"

namespace prospect {

namespace {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The first
/// exception stops further work and is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mu;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (!failed.load()) {
                    const auto i = next.fetch_add(1);
                    if (i >= n) return;
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mu);
                        if (!first_error) first_error = std::current_exception();
                        failed.store(true);
                    }
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

std::string context_fingerprint(const std::string& backend, const std::string& task_set, const std::string& tmpl) {
    Fingerprinter fp;
    fp.add(std::string_view{"prospect-context-v1"}).add(backend).add(task_set).add(tmpl);
    return fp.finish();
}

std::string zero_key(const std::string& ctx, std::size_t task_index) {
    Fingerprinter fp;
    fp.add(std::string_view{"zero"}).add(ctx).add(static_cast<std::int64_t>(task_index));
    return fp.finish();
}

std::string one_key(const std::string& ctx, const InstructionExample& ex) {
    Fingerprinter fp;
    fp.add(std::string_view{"one"}).add(ctx).add(content_fingerprint(ex));
    return fp.finish();
}

void require_answers(const RefinedTaskSet& task_set) {
    if (task_set.tasks.empty()) throw InputError("task set is empty");
    for (const auto& t : task_set.tasks)
        if (t.answer_text.empty()) throw InputError("task " + std::to_string(t.task_id) + " has an empty answer");
}

}  // namespace

ZeroShotVector compute_zero_shot(const RefinedTaskSet& task_set, const Scorer& scorer, const PromptTemplate& tmpl,
                                 ScoreCache* cache, std::size_t parallelism, CallStats* stats) {
    tmpl.validate();
    require_answers(task_set);

    ZeroShotVector zero;
    zero.task_set_fingerprint = task_set.fingerprint();
    zero.backend_fingerprint = scorer.fingerprint();
    zero.template_fingerprint = tmpl.fingerprint();
    const auto ctx = context_fingerprint(zero.backend_fingerprint, zero.task_set_fingerprint, zero.template_fingerprint);

    const auto m = task_set.tasks.size();
    zero.scores.assign(m, 0.0);
    zero.token_counts.assign(m, 0);
    std::atomic<std::int64_t> calls{0};
    std::atomic<std::int64_t> cached{0};

    parallel_for(m, parallelism, [&](std::size_t j) {
        const auto& task = task_set.tasks[j];
        if (cache != nullptr) {
            if (const auto hit = cache->lookup(zero_key(ctx, j));
                hit && hit->values.size() == 1 && hit->counts.size() == 1) {
                zero.scores[j] = hit->values.front();
                zero.token_counts[j] = hit->counts.front();
                cached.fetch_add(1);
                return;
            }
        }
        const auto result = scorer.score_continuation({tmpl.zero_shot_context(task), task.answer_text});
        calls.fetch_add(1);
        zero.scores[j] = mean_logprob(result);
        zero.token_counts[j] = result.token_count;
        if (!std::isfinite(zero.scores[j]))
            throw InvariantError("zero-shot score of task " + std::to_string(task.task_id) + " is not finite");
        if (cache != nullptr) cache->store(zero_key(ctx, j), CacheEntry{{zero.scores[j]}, {zero.token_counts[j]}});
    });

    if (stats != nullptr) {
        stats->zero_shot_calls += calls.load();
        stats->cached_tasks += cached.load();
    }
    return zero;
}

void apply_zero_shot(RefinedTaskSet& task_set, const ZeroShotVector& zero) {
    if (zero.size() != task_set.tasks.size()) throw InvariantError("zero-shot vector length differs from task count");
    for (std::size_t j = 0; j < zero.size(); ++j) {
        task_set.tasks[j].zero_shot_score = zero.scores[j];
        task_set.tasks[j].answer_token_count = zero.token_counts[j];
    }
}

std::vector<double> compute_one_shot(const InstructionExample& example, const RefinedTaskSet& task_set,
                                     const ZeroShotVector& zero, const Scorer& scorer, const PromptTemplate& tmpl) {
    if (zero.task_set_fingerprint != task_set.fingerprint())
        throw StaleCacheError("zero-shot scores were computed for a different task set; recompute them");
    if (zero.backend_fingerprint != scorer.fingerprint())
        throw StaleCacheError("zero-shot scores were computed with backend '" + zero.backend_fingerprint +
                              "', not '" + scorer.fingerprint() + "'; recompute them");
    if (zero.template_fingerprint != tmpl.fingerprint())
        throw StaleCacheError("zero-shot scores were computed with a different prompt template; recompute them");

    std::vector<double> scores;
    scores.reserve(task_set.tasks.size());
    for (const auto& task : task_set.tasks) {
        const auto result = scorer.score_continuation({tmpl.one_shot_context(example, task), task.answer_text});
        const double s = mean_logprob(result);
        if (!std::isfinite(s))
            throw InvariantError("one-shot score of example " + std::to_string(example.id) + " is not finite");
        scores.push_back(s);
    }
    return scores;
}

ScoreReport golden_score(ExampleId example_id, std::span<const double> one_shot, std::span<const double> zero_shot) {
    if (one_shot.size() != zero_shot.size())
        throw InvariantError("one-shot vector has " + std::to_string(one_shot.size()) + " entries, zero-shot has " +
                             std::to_string(zero_shot.size()));
    if (one_shot.empty()) throw InvariantError("golden score needs at least one task");
    ScoreReport r;
    r.example_id = example_id;
    r.one_shot_scores.assign(one_shot.begin(), one_shot.end());
    for (std::size_t j = 0; j < one_shot.size(); ++j)
        if (one_shot[j] > zero_shot[j]) ++r.wins;
    r.golden_score = static_cast<double>(r.wins) / static_cast<double>(one_shot.size());
    return r;
}

ScoreReport golden_score(ExampleId example_id, std::span<const double> one_shot, const ZeroShotVector& zero) {
    return golden_score(example_id, one_shot, std::span<const double>(zero.scores));
}

ProspectRun prospect(std::span<const InstructionExample> dataset, const RefinedTaskSet& task_set, const Scorer& scorer,
                     const ProspectOptions& options) {
    ProspectRun run;
    run.zero = compute_zero_shot(task_set, scorer, options.tmpl, options.cache, options.parallelism, &run.stats);
    const auto ctx =
        context_fingerprint(run.zero.backend_fingerprint, run.zero.task_set_fingerprint, run.zero.template_fingerprint);
    const auto m = task_set.tasks.size();

    run.reports.resize(dataset.size());
    std::atomic<std::int64_t> calls{0};
    std::atomic<std::int64_t> cached{0};
    std::mutex progress_mu;
    std::size_t done = 0;

    parallel_for(dataset.size(), options.parallelism, [&](std::size_t i) {
        const auto& ex = dataset[i];
        std::vector<double> one;
        std::optional<CacheEntry> hit;
        if (options.cache != nullptr) hit = options.cache->lookup(one_key(ctx, ex));
        if (hit && hit->values.size() == m) {
            one = std::move(hit->values);
            cached.fetch_add(1);
        } else {
            one = compute_one_shot(ex, task_set, run.zero, scorer, options.tmpl);
            calls.fetch_add(static_cast<std::int64_t>(m));
            if (options.cache != nullptr) options.cache->store(one_key(ctx, ex), CacheEntry{one, {}});
        }
        run.reports[i] = golden_score(ex.id, one, run.zero);
        if (options.progress) {
            std::lock_guard lock(progress_mu);
            options.progress(++done, dataset.size());
        }
    });

    std::sort(run.reports.begin(), run.reports.end(),
              [](const ScoreReport& a, const ScoreReport& b) { return a.example_id < b.example_id; });
    run.stats.one_shot_calls += calls.load();
    run.stats.cached_examples += cached.load();
    return run;
}

// ---------------------------------------------------------------- ranking

std::size_t selection_size(double fraction, std::size_t n) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ConfigError("fraction must be in (0, 1], got " + std::to_string(fraction));
    // The epsilon absorbs representation error such as 0.29 * 100 = 28.999999999999996.
    const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
    return std::clamp<std::size_t>(k, 1, n);
}

RankedSelection rank_and_select(std::span<const ScoreReport> reports, double fraction, Direction direction) {
    if (reports.empty()) throw InputError("no score reports to rank");
    const auto k = selection_size(fraction, reports.size());

    std::vector<const ScoreReport*> order;
    order.reserve(reports.size());
    for (const auto& r : reports) order.push_back(&r);
    const auto before = [direction](const ScoreReport* a, const ScoreReport* b) {
        if (a->golden_score != b->golden_score)
            return direction == Direction::top ? a->golden_score > b->golden_score : a->golden_score < b->golden_score;
        return a->example_id < b->example_id;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), before);

    RankedSelection sel;
    sel.fraction = fraction;
    sel.direction = direction;
    sel.example_ids.reserve(k);
    for (std::size_t i = 0; i < k; ++i) sel.example_ids.push_back(order[i]->example_id);
    return sel;
}

// ---------------------------------------------------------------- scores files

std::string serialize_scores(std::span<const ScoreReport> reports) {
    std::vector<const ScoreReport*> sorted;
    for (const auto& r : reports) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->example_id < b->example_id; });
    std::string out;
    for (const auto* r : sorted) {
        const nlohmann::json j = {{"example_id", r->example_id},
                                  {"golden_score", r->golden_score},
                                  {"wins", r->wins},
                                  {"m", r->task_count()},
                                  {"one_shot_scores", r->one_shot_scores}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

void write_scores_file(const std::filesystem::path& path, std::span<const ScoreReport> reports) {
    write_file(path, serialize_scores(reports));
}

std::vector<ScoreReport> parse_scores(std::string_view text, std::string_view source) {
    std::vector<ScoreReport> out;
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
            ScoreReport r;
            r.example_id = j.at("example_id").get<ExampleId>();
            r.golden_score = j.at("golden_score").get<double>();
            r.wins = j.at("wins").get<std::int64_t>();
            const auto m = j.at("m").get<std::int64_t>();
            r.one_shot_scores = j.at("one_shot_scores").get<std::vector<double>>();
            if (m < 1 || r.wins < 0 || r.wins > m) throw ParseError(where + ": wins/m out of range");
            if (static_cast<std::int64_t>(r.one_shot_scores.size()) != m)
                throw ParseError(where + ": one_shot_scores length differs from m");
            if (r.golden_score != static_cast<double>(r.wins) / static_cast<double>(m))
                throw ParseError(where + ": golden_score != wins / m");
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    return out;
}

std::vector<ScoreReport> read_scores_file(const std::filesystem::path& path) {
    auto reports = parse_scores(read_file(path), path.string());
    if (reports.empty()) throw EmptyDatasetError(path.string() + ": no score records");
    return reports;
}

std::string serialize_scores_sidecar(std::span<const ScoreReport> reports, std::span<const ExampleId> order) {
    std::unordered_map<ExampleId, const ScoreReport*> by_id;
    for (const auto& r : reports) by_id.emplace(r.example_id, &r);
    std::string out;
    for (ExampleId id : order) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw InputError("no score report for example " + std::to_string(id));
        const auto& r = *it->second;
        const nlohmann::json j = {
            {"example_id", r.example_id}, {"golden_score", r.golden_score}, {"wins", r.wins}, {"m", r.task_count()}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------- cost

CostEstimate estimate_cost(std::int64_t dataset_size, std::int64_t task_count, double prospector_params,
                           double baseline_params, std::int64_t baseline_task_count) {
    if (dataset_size <= 0) throw ConfigError("dataset size must be positive");
    if (task_count < 0 || baseline_task_count < 0) throw ConfigError("task counts must be non-negative");
    if (!(prospector_params > 0.0) || !(baseline_params > 0.0))
        throw ConfigError("parameter counts must be positive");

    CostEstimate c;
    c.dataset_size = dataset_size;
    c.task_count = task_count;
    c.zero_shot_calls = dataset_size;
    c.one_shot_calls = dataset_size * task_count;
    c.total_calls = c.zero_shot_calls + c.one_shot_calls;
    c.engine_zero_shot_calls = task_count;
    c.engine_total_calls = task_count + c.one_shot_calls;
    c.baseline_task_count = baseline_task_count;
    c.baseline_total_calls = dataset_size + dataset_size * baseline_task_count;
    c.relative_compute = (static_cast<double>(c.total_calls) * prospector_params) /
                         (static_cast<double>(c.baseline_total_calls) * baseline_params);
    return c;
}

}  // namespace prospect
