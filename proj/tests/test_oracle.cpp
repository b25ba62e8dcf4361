#include "subquad/oracle.hpp"
#include "subquad/random_metric.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

using namespace subquad;

namespace {

// d(0,1)=1, d(0,2)=5, d(1,2)=5
MeteredMetric three_point() {
    static const Distance table[3][3] = {{0, 1, 5}, {1, 0, 5}, {5, 5, 0}};
    return MeteredMetric(3, [](std::size_t i, std::size_t j) { return table[i][j]; }, 0, 5);
}

// Star around 0: points 1..7 at distance 1, points 8..12 at distance 5.
// Other pairs use the tree path through 0.
Distance star(std::size_t i, std::size_t j) {
    if (i == j) return 0;
    auto arm = [](std::size_t v) -> Distance { return v == 0 ? 0 : (v <= 7 ? 1 : 5); };
    return arm(i) + arm(j);
}

std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> v(hi - lo);
    std::iota(v.begin(), v.end(), lo);
    return v;
}

}  // namespace

TEST_CASE("query: identity, symmetry and the 3-point fixture") {
    auto m = three_point();
    CHECK(query(m, 2, 2) == 0);
    CHECK(m.meter().charged() == 1);
    CHECK(query(m, 1, 2) == query(m, 2, 1));
    CHECK(query(m, 0, 2) == 5);
    CHECK(m.meter().charged() == 4);
    CHECK(m.meter().raw_evals() == 4);
}

TEST_CASE("query: out-of-range index throws") {
    auto m = three_point();
    CHECK_THROWS_AS((void)query(m, 0, 3), std::out_of_range);
}

TEST_CASE("metric bounds are validated") {
    CHECK_THROWS_AS(MeteredMetric(2, star, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(MeteredMetric(2, star, -1, 1), std::invalid_argument);
}

TEST_CASE("ceil_sqrt is exact") {
    CHECK(ceil_sqrt(0) == 0);
    CHECK(ceil_sqrt(1) == 1);
    CHECK(ceil_sqrt(2) == 2);
    CHECK(ceil_sqrt(400) == 20);
    CHECK(ceil_sqrt(401) == 21);
    for (std::uint64_t x = 1; x < 5000; ++x) {
        const auto r = ceil_sqrt(x);
        REQUIRE(r * r >= x);
        REQUIRE((r - 1) * (r - 1) < x);
    }
}

TEST_CASE("grover_list: 100-point domain, cap 4, 4 matches charges 30") {
    // Points 1..4 sit at distance 1 from 0, the rest at distance 9.
    MeteredMetric m(
        101,
        [](std::size_t i, std::size_t j) -> Distance {
            if (i == j) return 0;
            auto arm = [](std::size_t v) -> Distance { return v == 0 ? 0 : (v <= 4 ? 1 : 9); };
            return arm(i) + arm(j);
        },
        0, 18);
    const auto dom = range(1, 101);
    const auto got = grover_list(m, 0, dom, [](Distance d) { return d <= 1; }, 4);
    CHECK(got.matches == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK_FALSE(got.overflow);
    CHECK(m.meter().charged() == 30);
}

TEST_CASE("grover_list: 9-point domain, no matches charges 6") {
    MeteredMetric m(10, star, 0, 10);
    const auto dom = range(1, 10);
    const auto got = grover_list(m, 0, dom, [](Distance d) { return d > 100; }, 3);
    CHECK(got.matches.empty());
    CHECK_FALSE(got.overflow);
    CHECK(m.meter().charged() == 6);
}

TEST_CASE("grover_list: degree-7 vertex with cap 5 overflows") {
    MeteredMetric m(13, star, 0, 10);
    const auto dom = range(1, 13);
    const auto got = grover_list(m, 0, dom, [](Distance d) { return d <= 1; }, 5);
    CHECK(got.matches == std::vector<std::size_t>{1, 2, 3, 4, 5});
    CHECK(got.overflow);
    CHECK(m.meter().charged() == ceil_sqrt(12 * 5) + ceil_sqrt(12));
}

TEST_CASE("grover_list: empty domain charges nothing") {
    MeteredMetric m(3, star, 0, 10);
    const auto got = grover_list(m, 0, {}, [](Distance) { return true; }, 1);
    CHECK(got.matches.empty());
    CHECK_FALSE(got.overflow);
    CHECK(m.meter().charged() == 0);
}

TEST_CASE("grover_list: rejects cap 0 and unsorted domains") {
    MeteredMetric m(13, star, 0, 10);
    const std::vector<std::size_t> unsorted{3, 1};
    CHECK_THROWS_AS((void)grover_list(m, 0, range(1, 3), [](Distance) { return true; }, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)grover_list(m, 0, unsorted, [](Distance) { return true; }, 2), std::invalid_argument);
}

TEST_CASE("grover_find_one: cost formula and lowest-index result") {
    MeteredMetric m(17, star, 0, 10);
    // Only the pivot itself is at distance 0.
    const auto dom = range(1, 17);
    const auto one = grover_find_one(m, 1, dom, [](Distance d) { return d == 0; });
    CHECK(one == 1u);
    CHECK(m.meter().charged() == 4);

    const auto none = grover_find_one(m, 0, dom, [](Distance d) { return d > 100; });
    CHECK_FALSE(none.has_value());
    CHECK(m.meter().charged() == 8);
}

TEST_CASE("grover_find_one: leader search returns the first representative in range") {
    MeteredMetric m(13, star, 0, 10);
    const std::vector<std::size_t> reps{2, 5, 9, 11};
    // From point 9 (arm 5): reps 2 and 5 are at distance 6, rep 11 at 10.
    CHECK(grover_find_one(m, 9, reps, [](Distance d) { return d <= 6; }) == 2u);
    CHECK(grover_find_one(m, 9, reps, [](Distance d) { return d >= 10; }) == 11u);
}

TEST_CASE("scan fidelity and meter additivity on random metrics") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto table = random_graph_metric(40, seed);
        auto m = make_metric(table);
        std::uint64_t expected_charge = 0;
        for (std::size_t pivot = 0; pivot < 40; pivot += 7) {
            std::vector<std::size_t> dom;
            for (std::size_t x = 0; x < 40; ++x) {
                if (x % 3 != 0) dom.push_back(x);
            }
            const Distance t = table.median();
            std::vector<std::size_t> scan;
            for (const auto x : dom) {
                if (table(pivot, x) <= t) scan.push_back(x);
            }
            for (const std::size_t cap : {1u, 4u, 40u}) {
                const auto got = grover_list(m, pivot, dom, [t](Distance d) { return d <= t; }, cap);
                const auto keep = std::min(cap, scan.size());
                REQUIRE(got.matches == std::vector<std::size_t>(scan.begin(), scan.begin() + static_cast<std::ptrdiff_t>(keep)));
                REQUIRE(got.overflow == (scan.size() > cap));
                const std::uint64_t listed = std::min<std::uint64_t>(cap, std::max<std::uint64_t>(1, scan.size()));
                expected_charge += ceil_sqrt(dom.size() * listed) + ceil_sqrt(dom.size());
            }
            const auto first = grover_find_one(m, pivot, dom, [t](Distance d) { return d <= t; });
            REQUIRE(first == (scan.empty() ? std::optional<std::size_t>{} : std::optional<std::size_t>{scan.front()}));
            expected_charge += ceil_sqrt(dom.size());
        }
        REQUIRE(m.meter().charged() == expected_charge);
    }
}
