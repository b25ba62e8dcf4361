#include "subquad/random_metric.hpp"

#include "subquad/rng.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

namespace subquad {

Distance DistanceTable::max() const noexcept {
    return d.empty() ? 0 : *std::max_element(d.begin(), d.end());
}

Distance DistanceTable::min_positive() const noexcept {
    Distance best = 0;
    for (const Distance x : d) {
        if (x > 0 && (best == 0 || x < best)) best = x;
    }
    return best;
}

Distance DistanceTable::median() const {
    std::vector<Distance> off;
    off.reserve(n * (n > 0 ? n - 1 : 0) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            off.push_back((*this)(i, j));
        }
    }
    if (off.empty()) return 0;
    const auto mid = off.begin() + static_cast<std::ptrdiff_t>((off.size() - 1) / 2);
    std::nth_element(off.begin(), mid, off.end());
    return *mid;
}

DistanceTable random_graph_metric(std::size_t n, std::uint64_t seed, std::size_t extra_edges_per_vertex,
                                  Distance max_weight) {
    Rng rng(mix_seed(seed, 0x6d657472ULL));
    std::vector<std::vector<std::pair<std::size_t, Distance>>> adj(n);
    auto weight = [&] { return 1 + static_cast<Distance>(uniform_below(rng, static_cast<std::uint64_t>(max_weight))); };
    auto add_edge = [&](std::size_t a, std::size_t b) {
        const Distance w = weight();
        adj[a].emplace_back(b, w);
        adj[b].emplace_back(a, w);
    };
    for (std::size_t v = 1; v < n; ++v) {
        add_edge(v, static_cast<std::size_t>(uniform_below(rng, v)));
    }
    if (n > 1) {
        for (std::size_t e = 0; e < extra_edges_per_vertex * n; ++e) {
            const auto a = static_cast<std::size_t>(uniform_below(rng, n));
            const auto b = static_cast<std::size_t>(uniform_below(rng, n));
            if (a != b) add_edge(a, b);
        }
    }

    DistanceTable table{n, std::vector<Distance>(n * n, 0)};
    constexpr Distance kInf = std::numeric_limits<Distance>::max();
    using Item = std::pair<Distance, std::size_t>;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<Distance> dist(n, kInf);
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist[s] = 0;
        pq.emplace(0, s);
        while (!pq.empty()) {
            const auto [d, v] = pq.top();
            pq.pop();
            if (d != dist[v]) continue;
            for (const auto &[u, w] : adj[v]) {
                if (d + w < dist[u]) {
                    dist[u] = d + w;
                    pq.emplace(dist[u], u);
                }
            }
        }
        std::copy(dist.begin(), dist.end(), table.d.begin() + static_cast<std::ptrdiff_t>(s * n));
    }
    return table;
}

MeteredMetric make_metric(const DistanceTable &table) {
    return MeteredMetric(
        table.n, [&table](std::size_t i, std::size_t j) { return table(i, j); }, 0, table.max());
}

}  // namespace subquad
