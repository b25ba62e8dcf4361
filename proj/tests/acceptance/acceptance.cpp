// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "test_support.hpp"

#include "subquad/approx_edit.hpp"
#include "subquad/band_matrix.hpp"
#include "subquad/experiment.hpp"
#include "subquad/metric_estimation.hpp"
#include "subquad/mr_edit.hpp"
#include "subquad/random_metric.hpp"
#include "subquad/strings.hpp"
#include "subquad/windows.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace subquad;
using subquad::testing::brute_force_matching;
using subquad::testing::loglog_slope;
using subquad::testing::mutate;
using subquad::testing::random_string;
using subquad::testing::recursive_edit;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

int failures = 0;

void run(int id, const char *title, const std::function<Verdict()> &body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception &e) {
        v.pass = false;
        v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::printf("criterion %d: %s  %s (%.1fs)%s%s\n", id, v.pass ? "PASS" : "FAIL", title, secs,
                v.detail.empty() ? "" : "  ", v.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Distance quantile(const DistanceTable &t, double q) {
    std::vector<Distance> v;
    for (std::size_t i = 0; i < t.n; ++i) {
        for (std::size_t j = i + 1; j < t.n; ++j) v.push_back(t(i, j));
    }
    std::sort(v.begin(), v.end());
    return v[static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1)))];
}

// Completeness (every pair within t marked) and soundness (marked within radius).
bool threshold_contract(const DistanceTable &t, const ThresholdMatrix &m, double radius) {
    for (std::size_t i = 0; i < t.n; ++i) {
        for (std::size_t j = 0; j < t.n; ++j) {
            if (t(i, j) <= m.threshold() && !m(i, j)) return false;
            if (m(i, j) && static_cast<double>(t(i, j)) > radius) return false;
        }
    }
    return true;
}

bool sandwich(const DistanceTable &t, const EstimateMatrix &e, double factor) {
    for (std::size_t i = 0; i < t.n; ++i) {
        for (std::size_t j = 0; j < t.n; ++j) {
            if (e(i, j) < t(i, j)) return false;
            if (static_cast<double>(e(i, j)) > factor * static_cast<double>(t(i, j))) return false;
        }
    }
    return true;
}

std::uint64_t fast_degree(std::size_t n, double eps) {
    return std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(n), 2.0 * eps) - 1e-9)));
}

Verdict exactness_base() {
    Verdict v;
    Rng rng(101);
    for (int k = 0; k < 1000; ++k) {
        const std::size_t l1 = uniform_below(rng, 21);
        const std::size_t l2 = uniform_below(rng, 41 - l1);
        const std::string a = random_string(rng, l1, 2 + uniform_below(rng, 3));
        const std::string b = random_string(rng, l2, 2 + uniform_below(rng, 3));
        const ExactEdit e = edit_exact(a, b);
        v.require(e.distance == recursive_edit(a, b), "edit_exact disagrees with the recursive oracle");
        v.require(validate_script(a, b, e.script) && static_cast<std::int64_t>(e.script.size()) == e.distance,
                  "edit_exact script invalid");
    }
    for (int k = 0; k < 500; ++k) {
        const std::size_t n = 1 + uniform_below(rng, 512);
        const std::string a = random_string(rng, n);
        const std::string b = mutate(rng, a, uniform_below(rng, n / 4 + 2));
        const std::int64_t exact = edit_exact(a, b).distance;
        const auto got = edit_bounded(a, b, exact + static_cast<std::int64_t>(uniform_below(rng, 8)));
        v.require(got == exact, "edit_bounded differs from edit_exact");
    }
    return v;
}

Verdict metric_sandwich() {
    Verdict v;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const DistanceTable t = random_graph_metric(128, 200 + s);
        MeteredMetric m = make_metric(t);
        v.require(sandwich(t, estimate_metric(m, 0.3), 3.3), fmt("metric %g violates d <= est <= 3.3 d", double(s)));
    }
    return v;
}

Verdict threshold_estimation() {
    Verdict v;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const DistanceTable t = random_graph_metric(128, 300 + s);
        for (const double q : {0.0, 0.01, 0.05, 0.2, 0.5}) {
            MeteredMetric m = make_metric(t);
            const Distance th = quantile(t, q);
            v.require(threshold_contract(t, estimate_with_threshold(m, th), 3.0 * static_cast<double>(th)),
                      fmt("metric %g at quantile %g", double(s), q));
        }
    }
    return v;
}

Verdict fast_estimation() {
    Verdict v;
    const double eps = 1.0 / 3.0;
    std::size_t max_resets = 0;
    for (std::uint64_t s = 0; s < 30; ++s) {
        const DistanceTable t = random_graph_metric(64, 400 + s);
        for (const double q : {0.01, 0.05, 0.2, 0.5}) {
            MeteredMetric m = make_metric(t);
            const Distance th = quantile(t, q);
            const ThresholdMatrix r = fast_estimate_with_threshold(m, th, eps, fast_degree(64, eps), s);
            v.require(threshold_contract(t, r, 27.0 * static_cast<double>(th)), fmt("metric %g quantile %g", double(s), q));
            max_resets = std::max(max_resets, r.resets);
        }
        MeteredMetric m = make_metric(t);
        v.require(sandwich(t, fast_estimate_metric(m, eps, s), 27.0 * (1.0 + eps)),
                  fmt("full matrix of metric %g exceeds 27(1+eps)", double(s)));
    }
    v.require(max_resets <= 20, fmt("%g hitting-set resets", double(max_resets)));
    if (v.pass) v.detail = fmt("max resets %g", double(max_resets));
    return v;
}

Verdict query_growth() {
    Verdict v;
    const std::vector<double> ns{64, 128, 256, 512};
    std::string summary;
    for (const double q : {0.01, 0.05, 0.5}) {
        std::vector<double> slow, fast;
        for (const double nd : ns) {
            const auto n = static_cast<std::size_t>(nd);
            double sum_slow = 0, sum_fast = 0;
            for (std::uint64_t s = 0; s < 10; ++s) {
                const DistanceTable t = random_graph_metric(n, 500 + s);
                const Distance th = quantile(t, q);
                MeteredMetric a = make_metric(t);
                (void)estimate_with_threshold(a, th);
                sum_slow += static_cast<double>(a.meter().charged());
                MeteredMetric b = make_metric(t);
                (void)fast_estimate_with_threshold(b, th, 0.1, fast_degree(n, 0.1), s);
                sum_fast += static_cast<double>(b.meter().charged());
            }
            slow.push_back(sum_slow / 10.0);
            fast.push_back(sum_fast / 10.0);
        }
        const double ss = loglog_slope(ns, slow);
        const double fs = loglog_slope(ns, fast);
        v.require(ss <= 1.80, fmt("threshold slope %.3f > 1.80 at quantile %g", ss, q));
        v.require(fs <= 1.70, fmt("fast slope %.3f > 1.70 at quantile %g", fs, q));
        summary += fmt("q=%g: %.3f/%.3f ", q, ss, fs);
    }
    if (v.pass) v.detail = "slopes threshold/fast " + summary;
    return v;
}

Verdict window_dp_optimality() {
    Verdict v;
    Rng rng(601);
    for (int k = 0; k < 200; ++k) {
        const std::size_t l = 1 + uniform_below(rng, 6);
        const std::size_t g = 1 + uniform_below(rng, l);
        const std::size_t c1 = 1 + uniform_below(rng, 12), c2 = 1 + uniform_below(rng, 12);
        const WindowSet w1 = build_windows_explicit(l + (c1 - 1) * g + uniform_below(rng, g), l, g);
        const WindowSet w2 = build_windows_explicit(l + (c2 - 1) * g + uniform_below(rng, g), l, g);
        const std::string s1 = random_string(rng, w1.source_len, 3);
        const std::string s2 = mutate(rng, s1, uniform_below(rng, 4), 3).substr(0, w2.source_len);
        const auto lookup = [&](std::size_t i, std::size_t j) -> Distance {
            const Window &a = w1.windows[i];
            const Window &b = w2.windows[j];
            if (b.end > s2.size()) return static_cast<Distance>(a.length() + b.length());
            return edit_distance(std::string_view(s1).substr(a.start - 1, a.length()),
                                 std::string_view(s2).substr(b.start - 1, b.length()));
        };
        v.require(window_dp(w1, w2, {lookup, 1.0}).cost == brute_force_matching(w1, w2, lookup),
                  fmt("instance %g differs from exhaustive search", double(k)));
    }
    return v;
}

Verdict seven_plus_eps() {
    Verdict v;
    Rng rng(701);
    double worst = 0.0;
    const std::size_t sizes[] = {64, 128, 256, 512};
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = sizes[k % 4];
        const std::string s1 = random_string(rng, n);
        const std::string s2 = mutate(rng, s1, uniform_below(rng, n / 4 + 1));
        const ApproxResult r = edit_approx(s1, s2, 0.5);
        const std::int64_t exact = edit_distance(s1, s2);
        v.require(r.script.has_value() && validate_script(s1, s2, *r.script), "script fails validation");
        const double ratio = exact == 0 ? (r.estimate == 0 ? 1.0 : 1e9) : double(r.estimate) / double(exact);
        worst = std::max(worst, ratio);
        v.require(ratio <= 7.5, fmt("ratio %.3f on n=%g", ratio, double(n)));
    }
    if (v.pass) v.detail = fmt("worst ratio %.3f", worst);
    return v;
}

Verdict bootstrapping() {
    Verdict v;
    Rng rng(801);
    const double bound = bootstrap_factor(0.1);
    const std::size_t limit = bootstrap_depth_limit(0.1);
    double worst = 0.0;
    std::size_t deepest = 0;
    for (int k = 0; k < 40; ++k) {
        const std::size_t n = 64 + uniform_below(rng, 449);
        const std::string s1 = random_string(rng, n);
        const std::string s2 = mutate(rng, s1, uniform_below(rng, n / 8 + 1));
        BootstrapConfig cfg;
        cfg.eps = 0.1;
        cfg.params.seed = static_cast<std::uint64_t>(k);
        if (k % 2 == 1) {
            // Small forced windows so the recursion actually runs at this size.
            cfg.params.size_floor = 16;
            cfg.params.window_size = 32;
            cfg.params.gap = 8;
            cfg.params.crossover = k % 4 == 1;
        }
        const ApproxResult r = edit_approx_boot(s1, s2, cfg);
        const std::int64_t exact = edit_distance(s1, s2);
        const double ratio = exact == 0 ? (r.estimate == 0 ? 1.0 : 1e18) : double(r.estimate) / double(exact);
        worst = std::max(worst, ratio);
        deepest = std::max(deepest, r.depth);
        v.require(r.estimate >= exact, "estimate below the distance");
        v.require(ratio <= bound, fmt("ratio %.3f above bootstrap_factor(0.1) = %g", ratio, bound));
        v.require(r.depth <= limit, fmt("depth %g above %g", double(r.depth), double(limit)));
    }
    if (v.pass) v.detail = fmt("bootstrap_factor(0.1)=%g worst ratio %.3f deepest %g", bound, worst, double(deepest));
    return v;
}

Verdict chain_exactness() {
    Verdict v;
    Rng rng(901);
    const double x = 8.0 / 9.0;
    std::size_t multi_block = 0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 32 + uniform_below(rng, 225);
        const std::string s1 = random_string(rng, n);
        const std::string s2 = mutate(rng, s1, uniform_below(rng, n / 10 + 1));
        const std::size_t len = std::max(s1.size(), s2.size());
        const std::int64_t exact = edit_exact(s1, s2).distance;
        // Smallest grid point covering the distance, and at least 1/n.
        const double delta = std::min(1.0, static_cast<double>(std::max<std::int64_t>(exact, 1)) / static_cast<double>(len));
        const ClusterConfig cfg = ClusterConfig::for_problem(len, x, 0.5);
        if (plan_small_delta(s1.size(), s2.size(), delta, cfg).blocks > 1) ++multi_block;
        const MrOutcome out = mr_edit_small_delta(s1, s2, delta, cfg);
        v.require(out.cost == exact, fmt("pair %g: chain differs from edit_exact", double(k)));
    }
    for (int k = 0; k < 100; ++k) {
        const std::size_t d = 1 + uniform_below(rng, 6);
        const auto band = [&](std::size_t a, std::size_t b) {
            BandMatrix m(a, b, d);
            for (auto &c : m.cells()) {
                c = uniform_below(rng, 6) == 0 ? BandMatrix::kInf : static_cast<Distance>(uniform_below(rng, 50));
            }
            return m;
        };
        const BandMatrix a = band(0, 4), b = band(4, 9), c = band(9, 12);
        v.require(band_min_plus(band_min_plus(a, b), c) == band_min_plus(a, band_min_plus(b, c)),
                  "band_min_plus not associative");
    }
    if (v.pass) v.detail = fmt("%g of 100 chains had more than one block", double(multi_block));
    return v;
}

Verdict mapreduce_driver() {
    Verdict v;
    Rng rng(1001);
    double worst = 0.0, worst_rounds = 0.0, worst_mem = 0.0;
    const std::size_t sizes[] = {64, 128, 256, 512};
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = sizes[k % 4];
        const std::string s1 = random_string(rng, n);
        const std::string s2 = mutate(rng, s1, uniform_below(rng, n / 3 + 1));
        const std::size_t len = std::max(s1.size(), s2.size());
        const ClusterConfig cfg = ClusterConfig::for_problem(len, 8.0 / 9.0, 0.5);
        const MrEditResult r = mr_edit(s1, s2, 0.5, cfg);
        const std::int64_t exact = edit_distance(s1, s2);
        const double ratio = exact == 0 ? (r.approx.estimate == 0 ? 1.0 : 1e9) : double(r.approx.estimate) / double(exact);
        const double round_cap = 12.0 * std::log2(static_cast<double>(len));
        worst = std::max(worst, ratio);
        worst_rounds = std::max(worst_rounds, double(r.rounds) / round_cap);
        worst_mem = std::max(worst_mem, double(r.max_machine_mem()) / double(cfg.mem_per_machine));
        v.require(r.approx.estimate >= exact && ratio <= 3.5, fmt("ratio %.3f at n=%g", ratio, double(n)));
        v.require(double(r.rounds) <= round_cap, fmt("%g rounds above 12 log2 n", double(r.rounds)));
        v.require(r.max_machine_mem() <= cfg.mem_per_machine, "machine memory above the cap");
    }
    if (v.pass) {
        v.detail = fmt("worst ratio %.3f, rounds/cap %.3f, memory/cap %.3f", worst, worst_rounds, worst_mem);
    }
    return v;
}

Verdict determinism() {
    Verdict v;
    for (const Algorithm a :
         {Algorithm::quantum7, Algorithm::bootstrap, Algorithm::mr, Algorithm::threshold, Algorithm::fast_threshold}) {
        ExperimentSpec spec;
        spec.algorithm = a;
        spec.n = 128;
        spec.seed = 77;
        spec.epsilon = a == Algorithm::bootstrap ? 0.1 : 0.5;
        spec.planted_ops = 10;
        spec.repetitions = 4;
        const auto first = run_experiment(spec);
        const auto second = run_experiment(spec);
        v.require(to_csv(first) == to_csv(second) && to_json(first) == to_json(second),
                  std::string("reports differ for ") + std::string(to_string(a)));
    }
    Rng rng(1101);
    const std::string s1 = random_string(rng, 200);
    const std::string s2 = mutate(rng, s1, 25);
    const ClusterConfig cfg = ClusterConfig::for_problem(s2.size() > 200 ? s2.size() : 200, 8.0 / 9.0, 0.5);
    v.require(mr_edit(s1, s2, 0.5, cfg).traces == mr_edit(s1, s2, 0.5, cfg).traces, "MapReduce traces differ");
    return v;
}

}  // namespace

int main() {
    run(1, "exactness base", exactness_base);
    run(2, "metric estimation sandwich at eps = 0.3", metric_sandwich);
    run(3, "threshold estimation completeness and 3t soundness", threshold_estimation);
    run(4, "fast estimation contract at eps = 1/3", fast_estimation);
    run(5, "charged query growth slopes", query_growth);
    run(6, "window DP equals exhaustive matching", window_dp_optimality);
    run(7, "7+eps envelope at eps = 0.5", seven_plus_eps);
    run(8, "bootstrap ratio and depth at eps = 0.1", bootstrapping);
    run(9, "(min,+) chain exactness and associativity", chain_exactness);
    run(10, "MapReduce driver ratio, rounds and memory", mapreduce_driver);
    run(11, "determinism", determinism);
    return failures == 0 ? 0 : 1;
}
