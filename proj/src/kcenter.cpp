#include "prospect/kcenter.hpp"

#include <cmath>
#include <limits>

#include "prospect/error.hpp"

namespace prospect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Index of the unselected row with the largest key; ties to the lower example id.
std::size_t argmax_unselected(const EmbeddingMatrix& pool, const std::vector<double>& key,
                              const std::vector<bool>& selected) {
    std::size_t best = pool.rows();
    for (std::size_t i = 0; i < pool.rows(); ++i) {
        if (selected[i]) continue;
        if (best == pool.rows() || key[i] > key[best] || (key[i] == key[best] && pool.id(i) < pool.id(best)))
            best = i;
    }
    return best;
}

void relax(const EmbeddingMatrix& pool, std::span<const double> center, std::vector<double>& nearest) {
    for (std::size_t i = 0; i < pool.rows(); ++i) {
        const double d = squared_distance(pool.row(i), center);
        if (d < nearest[i]) nearest[i] = d;
    }
}

}  // namespace

KCenterResult kcenter_greedy(const EmbeddingMatrix& pool, std::size_t k, const EmbeddingMatrix& seeds) {
    if (k > pool.rows())
        throw ConfigError("k-center: k = " + std::to_string(k) + " exceeds pool size " + std::to_string(pool.rows()));
    if (!seeds.empty() && !pool.empty() && seeds.dim() != pool.dim())
        throw InputError("k-center: seed dimension " + std::to_string(seeds.dim()) + " differs from pool dimension " +
                         std::to_string(pool.dim()));

    KCenterResult out;
    std::vector<double> nearest(pool.rows(), kInf);  // squared distances
    std::vector<bool> selected(pool.rows(), false);

    for (std::size_t s = 0; s < seeds.rows(); ++s) relax(pool, seeds.row(s), nearest);

    const auto pick = [&](std::size_t i, double radius) {
        selected[i] = true;
        out.selected.push_back(pool.id(i));
        out.radii.push_back(radius);
        nearest[i] = 0.0;
        relax(pool, pool.row(i), nearest);
    };

    if (k > 0 && seeds.empty()) {
        std::vector<double> mean(pool.dim(), 0.0);
        for (std::size_t i = 0; i < pool.rows(); ++i) {
            const auto r = pool.row(i);
            for (std::size_t d = 0; d < pool.dim(); ++d) mean[d] += r[d];
        }
        for (double& m : mean) m /= static_cast<double>(pool.rows());
        std::vector<double> from_mean(pool.rows());
        for (std::size_t i = 0; i < pool.rows(); ++i) from_mean[i] = squared_distance(pool.row(i), mean);
        pick(argmax_unselected(pool, from_mean, selected), kInf);
    }

    while (out.selected.size() < k) {
        const auto i = argmax_unselected(pool, nearest, selected);
        pick(i, std::sqrt(nearest[i]));
    }

    if (seeds.empty() && out.selected.empty()) {
        out.coverage_radius = pool.empty() ? 0.0 : kInf;
    } else {
        double worst = 0.0;
        for (double d : nearest) worst = std::max(worst, d);
        out.coverage_radius = std::sqrt(worst);
    }
    return out;
}

}  // namespace prospect
