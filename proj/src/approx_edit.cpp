#include "subquad/approx_edit.hpp"

#include "subquad/metric_estimation.hpp"
#include "subquad/rng.hpp"
#include "subquad/windows.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace subquad {

namespace {

constexpr double kSevenBeta = 6.0 / 7.0;
const double kSqrt17 = std::sqrt(17.0);

std::int64_t ssize(std::string_view s) { return static_cast<std::int64_t>(s.size()); }

void require_positive(double v, const char *what) {
    if (!(v > 0.0)) {
        throw std::invalid_argument(std::string(what) + " must be positive");
    }
}

ApproxResult equal_result(double factor) {
    ApproxResult r;
    r.script = TransformationScript{};
    r.factor_bound = factor;
    r.path = ApproxPath::equal;
    return r;
}

ApproxResult exact_result(std::string_view s1, std::string_view s2, double factor) {
    ExactEdit e = edit_exact(s1, s2);
    ApproxResult r;
    r.estimate = e.distance;
    r.script = std::move(e.script);
    r.factor_bound = factor;
    r.meter.time_units = static_cast<std::uint64_t>(std::max<std::int64_t>(1, ssize(s1) * ssize(s2)));
    r.path = ApproxPath::exact;
    return r;
}

// Banded exact search with d_max = floor(delta n). Finding nothing proves
// the promise false; the trivial script keeps the result well-formed.
ApproxResult bounded_result(std::string_view s1, std::string_view s2, double delta, std::size_t n, double factor) {
    const auto d_max = static_cast<std::int64_t>(std::floor(delta * static_cast<double>(n) + 1e-9));
    ApproxResult r;
    r.factor_bound = factor;
    r.path = ApproxPath::bounded;
    r.meter.time_units = static_cast<std::uint64_t>(static_cast<std::int64_t>(n) + d_max * d_max);
    if (auto e = edit_bounded_script(s1, s2, d_max)) {
        r.estimate = e->distance;
        r.script = std::move(e->script);
    } else {
        r.script = trivial_script(s1, s2);
        r.estimate = static_cast<std::int64_t>(r.script->size());
        r.guarantee_held = false;
    }
    return r;
}

bool crossover_applies(const ApproxParams &params, double delta, std::size_t n) {
    return params.crossover && delta <= std::pow(static_cast<double>(n), -1.0 / 14.0);
}

std::size_t gamma_for(double eps_prime, double delta) {
    const double g = std::ceil(1.0 / (eps_prime * delta) - 1e-9);
    return static_cast<std::size_t>(std::clamp(g, 1.0, 1e15));
}

struct Shape {
    std::size_t l;
    std::size_t g;
};

Shape window_shape(std::size_t n, double beta, std::size_t gamma, const ApproxParams &params) {
    const double raw = std::pow(static_cast<double>(n), 1.0 - beta);
    const std::size_t l =
        params.window_size.value_or(std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(raw + 1e-9))));
    const std::size_t g = params.gap.value_or(std::max<std::size_t>(1, l / gamma));
    if (l == 0 || g == 0) {
        throw std::invalid_argument("window size and gap must be at least 1");
    }
    return {l, g};
}

// Window metric over W1 then W2; pair_distance(a, b, work) returns an upper
// bound on edit(a, b) and charges its work to `work`.
template <class PairDistance, class Estimate>
ApproxResult window_result(std::string_view s1, std::string_view s2, Shape shape, Distance upper,
                           PairDistance &&pair_distance, Estimate &&estimate) {
    const WindowSet w1 = build_windows_explicit(s1.size(), shape.l, shape.g);
    const WindowSet w2 = build_windows_explicit(s2.size(), shape.l, shape.g);
    const std::size_t k1 = w1.size();
    auto text = [&](std::size_t p) {
        const Window &w = p < k1 ? w1.windows[p] : w2.windows[p - k1];
        return (p < k1 ? s1 : s2).substr(w.start - 1, w.length());
    };

    QueryMeter work;
    MeteredMetric metric(
        k1 + w2.size(), [&](std::size_t i, std::size_t j) { return pair_distance(text(i), text(j), work); }, 0,
        upper);
    const EstimateMatrix est = estimate(metric);
    const WindowDistanceSource source{[&](std::size_t i, std::size_t j) { return est(i, k1 + j); }, est.factor()};
    const WindowDpResult dp = window_dp(w1, w2, source);

    ApproxResult r;
    r.script = reconstruct_script(s1, s2, dp.matching, w1, w2);
    r.estimate = static_cast<std::int64_t>(r.script->size());
    r.path = ApproxPath::windows;
    r.meter = metric.meter().reading();
    r.meter += work.reading();
    // The window DP itself: one step per cell.
    r.meter.time_units += static_cast<std::uint64_t>((k1 + 1) * (w2.size() + 1));
    return r;
}

// Symmetric content key for a pair of substrings.
std::string pair_key(std::string_view a, std::string_view b) {
    if (b < a) std::swap(a, b);
    std::string key = std::to_string(a.size());
    key.push_back(':');
    key.append(a);
    key.append(b);
    return key;
}

}  // namespace

ApproxResult bounded_edit_approx(std::string_view s1, std::string_view s2, double delta, double eps,
                                 const ApproxParams &params) {
    require_positive(delta, "delta");
    require_positive(eps, "eps");
    const double factor = 7.0 + eps;
    if (s1 == s2) {
        return equal_result(factor);
    }
    const std::size_t n = std::max(s1.size(), s2.size());
    if (s1.empty() || s2.empty() || (!params.overridden() && n < params.size_floor)) {
        return exact_result(s1, s2, factor);
    }
    if (crossover_applies(params, delta, n)) {
        return bounded_result(s1, s2, delta, n, factor);
    }

    const double eps_prime = eps / 4.0;
    const Shape shape = window_shape(n, kSevenBeta, gamma_for(eps_prime, delta), params);
    std::unordered_map<std::string, Distance> memo;
    const auto l2 = static_cast<std::uint64_t>(shape.l * shape.l);
    ApproxResult r = window_result(
        s1, s2, shape, static_cast<Distance>(shape.l),
        [&](std::string_view a, std::string_view b, QueryMeter &work) {
            auto [it, fresh] = memo.try_emplace(pair_key(a, b), 0);
            if (fresh) {
                it->second = edit_distance(a, b);
                work.charge_time(l2);
            }
            return it->second;
        },
        [&](MeteredMetric &metric) { return estimate_metric(metric, eps_prime); });
    r.factor_bound = factor;
    r.guarantee_held = static_cast<double>(r.estimate) <= factor * delta * static_cast<double>(n) + 1e-9;
    return r;
}

ApproxResult edit_approx(std::string_view s1, std::string_view s2, double eps, const ApproxParams &params) {
    require_positive(eps, "eps");
    const double factor = 7.0 + eps;
    if (s1 == s2) {
        return equal_result(factor);
    }
    const std::size_t n = std::max(s1.size(), s2.size());
    if (s1.empty() || s2.empty() || (!params.overridden() && n < params.size_floor)) {
        return exact_result(s1, s2, factor);
    }

    const double eps_prime = eps / 9.0;
    const double nd = static_cast<double>(n);
    MeterReading total;
    for (std::size_t i = 0;; ++i) {
        const double delta = std::pow(1.0 + eps_prime, static_cast<double>(i)) / nd;
        const double promise = (1.0 + eps_prime) * delta;
        ApproxResult r = bounded_edit_approx(s1, s2, promise, eps_prime, params);
        total += r.meter;
        const bool last = promise >= 1.0;
        const bool short_enough =
            static_cast<double>(r.estimate) <= (7.0 + eps_prime) * (1.0 + eps_prime) * delta * nd + 1e-9;
        if (last || (r.guarantee_held && short_enough && validate_script(s1, s2, *r.script))) {
            r.meter = total;
            r.factor_bound = factor;
            r.guarantee_held = true;
            return r;
        }
    }
}

double BootstrapConfig::beta() const noexcept { return (kSqrt17 - 1.0) / 4.0 + eps; }

bool BootstrapConfig::base_case() const noexcept { return eps >= (5.0 - kSqrt17) / 4.0 - 1e-12; }

double bootstrap_factor(double eps) {
    require_positive(eps, "eps");
    BootstrapConfig cfg;
    cfg.eps = eps;
    if (cfg.base_case()) {
        return 1.0;
    }
    return 2.0 * (9.0 / eps) * bootstrap_factor(2.0 * eps) + 1.0;
}

std::size_t bootstrap_depth_limit(double eps) {
    require_positive(eps, "eps");
    const double levels = std::ceil(std::log2(1.0 / eps) - 1e-12);
    return static_cast<std::size_t>(std::max(0.0, levels)) + 1;
}

namespace {

struct BootContext {
    // One content-keyed cache per recursion level.
    std::vector<std::unordered_map<std::string, Distance>> caches;
    std::size_t max_depth = 0;
};

ApproxResult boot(std::string_view s1, std::string_view s2, double eps, std::size_t depth, const ApproxParams &params,
                  BootContext &ctx) {
    ctx.max_depth = std::max(ctx.max_depth, depth);
    const BootstrapConfig cfg{eps, depth, params};
    const double factor = bootstrap_factor(eps);
    if (s1 == s2) {
        return equal_result(factor);
    }
    const std::size_t n = std::max(s1.size(), s2.size());
    const bool forced = depth == 0 && params.overridden();
    if (cfg.base_case() || s1.empty() || s2.empty() || (!forced && n < params.size_floor)) {
        return exact_result(s1, s2, factor);
    }

    ApproxParams inner = params;
    inner.window_size.reset();
    inner.gap.reset();
    const ApproxParams shape_params = depth == 0 ? params : inner;
    if (ctx.caches.size() <= depth + 1) {
        ctx.caches.resize(depth + 2);
    }

    const double eps_prime = eps / 9.0;
    const double nd = static_cast<double>(n);
    MeterReading total;
    for (std::size_t i = 0;; ++i) {
        const double delta = std::pow(1.0 + eps_prime, static_cast<double>(i)) / nd;
        const double promise = (1.0 + eps_prime) * delta;
        ApproxResult r;
        if (crossover_applies(params, promise, n)) {
            r = bounded_result(s1, s2, promise, n, factor);
        } else {
            const Shape shape = window_shape(n, cfg.beta(), gamma_for(eps_prime, promise), shape_params);
            const std::uint64_t seed = mix_seed(mix_seed(params.seed, depth), i);
            r = window_result(
                s1, s2, shape, static_cast<Distance>(2 * shape.l),
                [&](std::string_view a, std::string_view b, QueryMeter &work) {
                    auto &cache = ctx.caches[depth + 1];
                    const std::string key = pair_key(a, b);
                    if (const auto it = cache.find(key); it != cache.end()) {
                        return it->second;
                    }
                    const ApproxResult sub = boot(a, b, 2.0 * eps, depth + 1, inner, ctx);
                    work.charge(sub.meter.charged);
                    work.count_evals(sub.meter.raw_evals);
                    work.charge_time(sub.meter.time_units);
                    cache.emplace(key, sub.estimate);
                    return Distance{sub.estimate};
                },
                [&](MeteredMetric &metric) { return fast_estimate_metric(metric, eps, seed); });
        }
        total += r.meter;
        const bool last = promise >= 1.0;
        const bool short_enough = static_cast<double>(r.estimate) <= factor / (1.0 + eps_prime) * delta * nd + 1e-9;
        if (last || (r.guarantee_held && short_enough && validate_script(s1, s2, *r.script))) {
            r.meter = total;
            r.factor_bound = factor;
            r.guarantee_held = true;
            return r;
        }
    }
}

}  // namespace

ApproxResult edit_approx_boot(std::string_view s1, std::string_view s2, const BootstrapConfig &cfg) {
    require_positive(cfg.eps, "eps");
    BootContext ctx;
    ApproxResult r = boot(s1, s2, cfg.eps, cfg.depth, cfg.params, ctx);
    r.depth = ctx.max_depth;
    return r;
}

std::string_view to_string(ApproxPath path) noexcept {
    switch (path) {
        case ApproxPath::equal: return "equal";
        case ApproxPath::exact: return "exact";
        case ApproxPath::bounded: return "bounded";
        case ApproxPath::windows: return "windows";
    }
    return "unknown";
}

}  // namespace subquad
