#include "subquad/metric_estimation.hpp"

#include "subquad/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace subquad {

ThresholdMatrix::ThresholdMatrix(std::size_t n, Distance threshold, double soundness_radius)
    : n_{n}, t_{threshold}, radius_{soundness_radius}, cells_(n * n, 0) {
    for (std::size_t i = 0; i < n; ++i) {
        cells_[i * n + i] = 1;
    }
}

namespace {

std::size_t pow_ceil(std::size_t n, double exponent) {
    const double v = std::pow(static_cast<double>(n), exponent);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(v - 1e-9)));
}

std::uint64_t saturating_cube(std::uint64_t x) {
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    if (x != 0 && x > kMax / x) return kMax;
    const std::uint64_t sq = x * x;
    if (x != 0 && sq > kMax / x) return kMax;
    return sq * x;
}

// Pairs that no threshold pass covered can only come from an oracle that is
// not a metric (or a wrong upper bound). They get their queried distance so
// the upper-bound contract still holds.
void settle_uncovered(MeteredMetric &metric, const std::vector<std::uint8_t> &covered, EstimateMatrix &est) {
    const std::size_t n = metric.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (covered[i * n + j] == 0) {
                est.set(i, j, query(metric, i, j));
            }
        }
    }
}

template <class ThresholdPass, class Radius>
EstimateMatrix sweep_thresholds(MeteredMetric &metric, double step, double factor, ThresholdPass &&pass,
                                Radius &&radius) {
    const std::size_t n = metric.size();
    EstimateMatrix est(n, factor);
    std::vector<std::uint8_t> covered(n * n, 0);
    auto absorb = [&](const ThresholdMatrix &a, Distance value) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (a(i, j) && covered[i * n + j] == 0) {
                    covered[i * n + j] = 1;
                    est.set(i, j, value);
                }
            }
        }
    };

    absorb(pass(Distance{0}, std::size_t{0}), 0);
    double t = static_cast<double>(std::max<Distance>(1, metric.lower_bound()));
    Distance last = 0;
    std::size_t round = 1;
    while (last < metric.upper_bound()) {
        // Distances are integers, so only the floor of t matters.
        const auto threshold = static_cast<Distance>(std::floor(t));
        t *= step;
        if (threshold == last) {
            continue;
        }
        last = threshold;
        absorb(pass(threshold, round++), radius(threshold));
    }
    settle_uncovered(metric, covered, est);
    return est;
}

}  // namespace

ThresholdMatrix estimate_with_threshold(MeteredMetric &metric, Distance t, double tau) {
    if (t < 0) {
        throw std::invalid_argument("threshold must be non-negative");
    }
    const std::size_t n = metric.size();
    ThresholdMatrix a(n, t, 3.0 * static_cast<double>(t));
    const std::size_t cap = pow_ceil(n, tau);
    const auto within = [t](Distance d) { return d <= t; };
    const auto within_twice = [t](Distance d) { return d <= 2 * t; };

    std::vector<std::uint8_t> alive(n, 1);
    std::vector<std::size_t> domain;
    domain.reserve(n);
    std::size_t v = 0;
    while (true) {
        while (v < n && alive[v] == 0) {
            ++v;
        }
        if (v == n) {
            break;
        }
        domain.clear();
        for (std::size_t x = v + 1; x < n; ++x) {
            if (alive[x] != 0) {
                domain.push_back(x);
            }
        }
        const GroverListing listing = grover_list(metric, v, domain, within, cap);
        if (!listing.overflow) {
            for (const std::size_t x : listing.matches) {
                a.mark(v, x);
            }
            alive[v] = 0;
            continue;
        }

        // High degree: one classical query per remaining vertex.
        std::vector<std::size_t> near{v};
        std::vector<std::size_t> ring{v};
        for (const std::size_t x : domain) {
            const Distance d = query(metric, v, x);
            if (within(d)) near.push_back(x);
            if (within_twice(d)) ring.push_back(x);
        }
        for (const std::size_t x : near) {
            for (const std::size_t y : ring) {
                a.mark(x, y);
            }
        }
        for (const std::size_t x : near) {
            alive[x] = 0;
        }
    }
    return a;
}

EstimateMatrix estimate_metric(MeteredMetric &metric, double eps) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("eps must be positive");
    }
    return sweep_thresholds(
        metric, 1.0 + eps / 3.0, 3.0 + eps,
        [&](Distance t, std::size_t) { return estimate_with_threshold(metric, t); },
        [](Distance t) { return 3 * t; });
}

std::vector<std::size_t> sample_hitting_set(std::size_t n_pts, std::uint64_t degree_threshold, std::uint64_t seed) {
    if (degree_threshold == 0) {
        throw std::invalid_argument("degree threshold must be at least 1");
    }
    if (n_pts == 0) {
        return {};
    }
    const double log_n = std::log(static_cast<double>(std::max<std::size_t>(n_pts, 2)));
    const double want = std::ceil(2.0 * (static_cast<double>(n_pts) / static_cast<double>(degree_threshold)) * log_n);
    const std::size_t k = std::min<std::size_t>(n_pts, static_cast<std::size_t>(want));

    // Partial Fisher-Yates over the index range.
    std::vector<std::size_t> idx(n_pts);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(mix_seed(seed));
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(rng, n_pts - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

double fast_factor(double eps) noexcept { return std::max(1.0, 9.0 / eps); }

std::size_t fast_max_levels(double eps) noexcept {
    auto levels = static_cast<std::size_t>(std::max(0.0, std::ceil(std::log(1.0 + 1.0 / eps) / std::log(3.0) - 1e-12)));
    const double bound = fast_factor(eps);
    while (levels > 0 && 2.0 * std::pow(3.0, static_cast<double>(levels)) - 1.0 > bound) {
        --levels;
    }
    return levels;
}

namespace {

constexpr std::size_t kMaxResets = 20;

class FastThreshold {
  public:
    FastThreshold(MeteredMetric &metric, ThresholdMatrix &out) : metric_{metric}, out_{out} {}

    std::size_t resets() const noexcept { return resets_; }

    // `pts` ascending metric indices; marks pairs among them in out_.
    void run(const std::vector<std::size_t> &pts, Distance t, std::uint64_t degree, std::size_t levels,
             std::uint64_t seed) {
        const std::size_t m = pts.size();
        if (m == 0) {
            return;
        }
        if (levels == 0 || degree + 1 >= m) {
            list_all(pts, t);
            return;
        }
        const auto within = [t](Distance d) { return d <= t; };
        std::vector<std::size_t> domain;
        domain.reserve(m);

        for (std::size_t attempt = 0; attempt <= kMaxResets; ++attempt) {
            const bool exhaustive = attempt == kMaxResets;
            const std::uint64_t attempt_seed = mix_seed(seed, attempt);
            const std::vector<std::size_t> local = sample_hitting_set(m, degree, attempt_seed);
            std::vector<std::size_t> reps;
            std::vector<std::uint8_t> is_rep(m, 0);
            reps.reserve(local.size());
            for (const std::size_t p : local) {
                reps.push_back(pts[p]);
                is_rep[p] = 1;
            }

            // leader_pos[p] = position in reps of the leader of pts[p].
            std::vector<std::optional<std::size_t>> leader_pos(m);
            std::vector<std::pair<std::size_t, std::size_t>> listed;
            bool missed = false;
            std::size_t rep_cursor = 0;
            for (std::size_t p = 0; p < m && !missed; ++p) {
                const std::size_t v = pts[p];
                if (is_rep[p] != 0) {
                    leader_pos[p] = rep_cursor++;
                    continue;
                }
                if (const auto leader = grover_find_one(metric_, v, reps, within)) {
                    leader_pos[p] = static_cast<std::size_t>(
                        std::lower_bound(reps.begin(), reps.end(), *leader) - reps.begin());
                    continue;
                }
                domain.clear();
                for (const std::size_t x : pts) {
                    if (x != v) domain.push_back(x);
                }
                const std::size_t cap = exhaustive ? std::max<std::size_t>(1, m - 1) : static_cast<std::size_t>(degree);
                const GroverListing listing = grover_list(metric_, v, domain, within, cap);
                if (listing.overflow) {
                    // No representative neighbour yet more than `degree`
                    // neighbours: the sample missed a large neighbourhood.
                    missed = true;
                    break;
                }
                for (const std::size_t x : listing.matches) {
                    listed.emplace_back(v, x);
                }
            }
            if (missed) {
                ++resets_;
                continue;
            }

            for (const auto &[x, y] : listed) {
                out_.mark(x, y);
            }
            run(reps, 3 * t, saturating_cube(degree), levels - 1, mix_seed(attempt_seed, 0x5eedULL));

            std::vector<std::vector<std::size_t>> followers(reps.size());
            for (std::size_t p = 0; p < m; ++p) {
                if (leader_pos[p]) {
                    followers[*leader_pos[p]].push_back(pts[p]);
                }
            }
            for (std::size_t a = 0; a < reps.size(); ++a) {
                for (std::size_t b = a; b < reps.size(); ++b) {
                    if (!out_(reps[a], reps[b])) {
                        continue;
                    }
                    for (const std::size_t x : followers[a]) {
                        for (const std::size_t y : followers[b]) {
                            out_.mark(x, y);
                        }
                    }
                }
            }
            return;
        }
    }

  private:
    void list_all(const std::vector<std::size_t> &pts, Distance t) {
        const auto within = [t](Distance d) { return d <= t; };
        const std::size_t cap = std::max<std::size_t>(1, pts.size() - 1);
        std::vector<std::size_t> domain;
        domain.reserve(pts.size());
        for (const std::size_t v : pts) {
            domain.clear();
            for (const std::size_t x : pts) {
                if (x != v) domain.push_back(x);
            }
            for (const std::size_t x : grover_list(metric_, v, domain, within, cap).matches) {
                out_.mark(v, x);
            }
        }
    }

    MeteredMetric &metric_;
    ThresholdMatrix &out_;
    std::size_t resets_ = 0;
};

}  // namespace

ThresholdMatrix fast_estimate_with_threshold(MeteredMetric &metric, Distance t, double eps,
                                             std::uint64_t degree_threshold, std::uint64_t seed) {
    if (t < 0) {
        throw std::invalid_argument("threshold must be non-negative");
    }
    if (!(eps > 0.0)) {
        throw std::invalid_argument("eps must be positive");
    }
    if (degree_threshold == 0) {
        throw std::invalid_argument("degree threshold must be at least 1");
    }
    const std::size_t n = metric.size();
    ThresholdMatrix out(n, t, fast_factor(eps) * static_cast<double>(t));
    std::vector<std::size_t> pts(n);
    std::iota(pts.begin(), pts.end(), std::size_t{0});
    FastThreshold runner(metric, out);
    runner.run(pts, t, degree_threshold, fast_max_levels(eps), seed);
    out.resets = runner.resets();
    return out;
}

EstimateMatrix fast_estimate_metric(MeteredMetric &metric, double eps, std::uint64_t seed) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("eps must be positive");
    }
    const double factor = fast_factor(eps);
    const std::uint64_t degree = pow_ceil(metric.size(), 2.0 * eps);
    return sweep_thresholds(
        metric, 1.0 + eps, factor * (1.0 + eps),
        [&](Distance t, std::size_t round) {
            return fast_estimate_with_threshold(metric, t, eps, degree, mix_seed(seed, round));
        },
        [factor](Distance t) { return static_cast<Distance>(std::floor(factor * static_cast<double>(t) + 1e-9)); });
}

}  // namespace subquad
