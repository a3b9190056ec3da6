#pragma once

#include <vector>

#include "prospect/embedder.hpp"

namespace prospect {

struct KCenterResult {
    std::vector<ExampleId> selected;  // selection order
    std::vector<double> radii;        // distance of each pick to its nearest prior center (+inf for an unseeded first pick)
    double coverage_radius = 0.0;     // max over pool of distance to nearest center; +inf with no centers
};

/// Greedy max-min (farthest-point) selection of `k` pool points.
///
/// Every pool point tracks its distance to the nearest center, where the
/// centers are the `seeds` plus everything selected so far. Each step picks
/// the unselected pool point with the largest such distance; equal distances
/// go to the lower example id. With no seeds, the first pick is the pool
/// point farthest from the pool mean (same tie rule).
///
/// Distances are Euclidean. Throws ConfigError when k > pool size and
/// InputError when seed and pool dimensions differ.
KCenterResult kcenter_greedy(const EmbeddingMatrix& pool, std::size_t k, const EmbeddingMatrix& seeds = {});

}  // namespace prospect
