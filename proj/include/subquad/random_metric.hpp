#pragma once

// Random integer metrics: shortest-path closures of random connected graphs.

#include "subquad/oracle.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace subquad {

struct DistanceTable {
    std::size_t n = 0;
    std::vector<Distance> d;  // row-major n×n

    [[nodiscard]] Distance operator()(std::size_t i, std::size_t j) const noexcept { return d[i * n + j]; }
    [[nodiscard]] Distance max() const noexcept;
    [[nodiscard]] Distance min_positive() const noexcept;
    /// Median over off-diagonal pairs (lower median).
    [[nodiscard]] Distance median() const;
};

/// A spanning tree plus `extra_edges_per_vertex`·n random chords, weights
/// uniform in [1, max_weight], closed under shortest paths (Dijkstra from
/// every vertex).
DistanceTable random_graph_metric(std::size_t n, std::uint64_t seed, std::size_t extra_edges_per_vertex = 2,
                                  Distance max_weight = 10);

/// Oracle over a table with bounds [0, max].
MeteredMetric make_metric(const DistanceTable &table);

}  // namespace subquad
