#pragma once

// Reference implementations written for clarity, not speed. They share no
// code with the library beyond the public data types and the Scorer interface.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "prospect/datamodel.hpp"
#include "prospect/scorer.hpp"

namespace prospect::oracle {

using Point = std::vector<double>;

inline double sq_dist(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}

struct KCenterTrace {
    std::vector<ExampleId> selected;
    std::vector<double> radii;
};

/// Farthest-point traversal recomputed from scratch at every step: each
/// candidate's distance is the minimum over all current centers, the largest
/// wins, and equal distances go to the lower id. Without seeds the first pick
/// is the point farthest from the centroid.
inline KCenterTrace kcenter(const std::vector<Point>& pool, const std::vector<ExampleId>& ids, std::size_t k,
                            const std::vector<Point>& seeds) {
    const double inf = std::numeric_limits<double>::infinity();
    KCenterTrace t;
    std::vector<Point> centers = seeds;
    std::vector<bool> used(pool.size(), false);

    auto better = [&](std::size_t i, double di, std::size_t best, double dbest) {
        return di > dbest || (di == dbest && ids[i] < ids[best]);
    };

    if (k > 0 && seeds.empty()) {
        Point mean(pool[0].size(), 0.0);
        for (const auto& p : pool)
            for (std::size_t d = 0; d < p.size(); ++d) mean[d] += p[d];
        for (double& m : mean) m /= static_cast<double>(pool.size());
        std::size_t best = 0;
        for (std::size_t i = 1; i < pool.size(); ++i)
            if (better(i, sq_dist(pool[i], mean), best, sq_dist(pool[best], mean))) best = i;
        used[best] = true;
        centers.push_back(pool[best]);
        t.selected.push_back(ids[best]);
        t.radii.push_back(inf);
    }

    while (t.selected.size() < k) {
        std::size_t best = pool.size();
        double best_d = -1.0;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (used[i]) continue;
            double d = inf;
            for (const auto& c : centers) d = std::min(d, sq_dist(pool[i], c));
            if (best == pool.size() || better(i, d, best, best_d)) {
                best = i;
                best_d = d;
            }
        }
        used[best] = true;
        centers.push_back(pool[best]);
        t.selected.push_back(ids[best]);
        t.radii.push_back(std::sqrt(best_d));
    }
    return t;
}

/// Max over points of the distance to the nearest chosen center.
inline double coverage(const std::vector<Point>& pool, const std::vector<std::size_t>& centers) {
    double worst = 0.0;
    for (const auto& p : pool) {
        double d = std::numeric_limits<double>::infinity();
        for (auto c : centers) d = std::min(d, sq_dist(p, pool[c]));
        worst = std::max(worst, d);
    }
    return std::sqrt(worst);
}

/// Optimal discrete k-center radius by enumerating every k-subset of the pool.
inline double optimal_kcenter_radius(const std::vector<Point>& pool, std::size_t k) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> chosen;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (chosen.size() == k) {
            best = std::min(best, coverage(pool, chosen));
            return;
        }
        for (std::size_t i = start; i < pool.size(); ++i) {
            chosen.push_back(i);
            rec(i + 1);
            chosen.pop_back();
        }
    };
    rec(0);
    return best;
}

/// Prompt strings for the default template, spelled out by hand.
inline std::string query_prompt(const std::string& question) {
    return "### Instruction:\n" + question + "\n\n### Response:\n";
}

inline std::string demo_prompt(const InstructionExample& ex) {
    std::string q = ex.instruction;
    if (ex.input && !ex.input->empty()) q += "\n" + *ex.input;
    return "### Instruction:\n" + q + "\n\n### Response:\n" + ex.output + "\n\n";
}

inline double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

struct GoldenScoreRecord {
    std::vector<double> one_shot;
    std::int64_t wins = 0;
    double golden_score = 0.0;
};

struct BruteForceRun {
    std::vector<double> zero_shot;
    std::vector<GoldenScoreRecord> records;  // dataset order
};

/// Scores every (example, task) pair directly through the scorer with the
/// default template and demonstration-first order, no cache, one thread.
/// Each task is (question, answer).
inline BruteForceRun golden_scores(const std::vector<InstructionExample>& dataset,
                                   const std::vector<std::pair<std::string, std::string>>& tasks,
                                   const Scorer& scorer) {
    BruteForceRun run;
    for (const auto& [question, answer] : tasks)
        run.zero_shot.push_back(
            mean_of(scorer.score_continuation({query_prompt(question), answer}).token_logprobs));
    for (const auto& ex : dataset) {
        GoldenScoreRecord rec;
        for (std::size_t j = 0; j < tasks.size(); ++j) {
            const auto& [question, answer] = tasks[j];
            const double s =
                mean_of(scorer.score_continuation({demo_prompt(ex) + query_prompt(question), answer}).token_logprobs);
            rec.one_shot.push_back(s);
            if (s > run.zero_shot[j]) ++rec.wins;
        }
        rec.golden_score = static_cast<double>(rec.wins) / static_cast<double>(tasks.size());
        run.records.push_back(std::move(rec));
    }
    return run;
}

}  // namespace prospect::oracle
