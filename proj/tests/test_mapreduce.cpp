#include "doctest.h"
#include "test_support.hpp"

#include "subquad/band_matrix.hpp"
#include "subquad/mapreduce.hpp"
#include "subquad/mr_edit.hpp"
#include "subquad/strings.hpp"

#include <cmath>
#include <map>

using namespace subquad;
using subquad::testing::mutate;
using subquad::testing::random_string;
using subquad::testing::recursive_edit;

namespace {

const Mapper identity_map = [](const KeyValue &kv) { return std::vector<KeyValue>{kv}; };
const Reducer identity_reduce = [](const std::string &key, const std::vector<std::string> &values) {
    ReduceResult r;
    for (const auto &v : values) r.emitted.push_back({key, v});
    return r;
};

ClusterConfig roomy(std::size_t machines) {
    ClusterConfig cfg;
    cfg.machines = machines;
    cfg.mem_per_machine = 1ULL << 40;
    return cfg;
}

// Pair at exact distance `target`, drawn by planting and rejecting.
std::pair<std::string, std::string> pair_at(Rng &rng, std::size_t n, std::int64_t target) {
    for (;;) {
        std::string s1 = random_string(rng, n);
        std::string s2 = mutate(rng, s1, static_cast<std::size_t>(target));
        if (edit_distance(s1, s2) == target) return {s1, s2};
    }
}

BandMatrix random_band(Rng &rng, std::size_t a, std::size_t b, std::size_t d) {
    BandMatrix m(a, b, d);
    for (auto &c : m.cells()) c = uniform_below(rng, 5) == 0 ? BandMatrix::kInf : static_cast<Distance>(uniform_below(rng, 40));
    return m;
}

}  // namespace

TEST_CASE("byte records round trip and reject truncation") {
    const std::string bytes = ByteWriter().u64(7).i64(-3).str("ab").str("").take();
    ByteReader r(bytes);
    CHECK(r.u64() == 7);
    CHECK(r.i64() == -3);
    CHECK(r.str() == "ab");
    CHECK(r.str().empty());
    CHECK(r.done());
    ByteReader cut(std::string_view(bytes).substr(0, 10));
    cut.u64();
    CHECK_THROWS_AS(cut.u64(), std::out_of_range);
}

TEST_CASE("cluster sizing follows the machine exponent") {
    const ClusterConfig cfg = ClusterConfig::for_problem(512, 8.0 / 9.0, 0.5, 0.25, 128.0);
    CHECK(cfg.machines == 256);
    CHECK(cfg.mem_per_machine ==
          static_cast<std::uint64_t>(std::ceil(128.0 * std::pow(512.0, 8.0 / 9.0 + 0.25) / 0.25)));
    CHECK_THROWS_AS((void)ClusterConfig::for_problem(16, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("identity round returns the pairs in key order") {
    std::vector<KeyValue> input{{"c", "3"}, {"a", "1"}, {"b", "2"}, {"d", "4"}, {"e", "5"}};
    const RoundOutput out = run_round(identity_map, identity_reduce, input, roomy(3), 1);
    CHECK(out.trace.shuffle_volume == input.size());
    REQUIRE(out.output.size() == input.size());
    CHECK(out.output[0] == KeyValue{"a", "1"});
    CHECK(out.output[4] == KeyValue{"e", "5"});
    CHECK(out.trace.machine_mem.size() == 3);
}

TEST_CASE("word count") {
    const std::vector<KeyValue> input{{"0", "to be"}, {"1", "to go"}};
    const Mapper words = [](const KeyValue &kv) {
        std::vector<KeyValue> out;
        std::size_t pos = 0;
        while (pos <= kv.value.size()) {
            const std::size_t sp = std::min(kv.value.find(' ', pos), kv.value.size());
            out.push_back({kv.value.substr(pos, sp - pos), "1"});
            pos = sp + 1;
        }
        return out;
    };
    const Reducer count = [](const std::string &key, const std::vector<std::string> &values) {
        ReduceResult r;
        r.emitted.push_back({key, std::to_string(values.size())});
        return r;
    };
    const RoundOutput out = run_round(words, count, input, roomy(2), 1);
    const std::vector<KeyValue> expected{{"be", "1"}, {"go", "1"}, {"to", "2"}};
    CHECK(out.output == expected);
}

TEST_CASE("memory cap and reducer contract are enforced") {
    ClusterConfig tiny;
    tiny.machines = 2;
    tiny.mem_per_machine = 1;
    try {
        (void)run_round(identity_map, identity_reduce, {{"k", "v"}}, tiny, 4);
        FAIL("expected overflow");
    } catch (const MemoryOverflow &e) {
        CHECK(e.round == 4);
        CHECK(e.machine == 0);
        CHECK(std::string(e.what()).find("round 4") != std::string::npos);
    }

    const Reducer foreign = [](const std::string &, const std::vector<std::string> &) {
        ReduceResult r;
        r.emitted.push_back({"elsewhere", "x"});
        return r;
    };
    CHECK_THROWS_AS((void)run_round(identity_map, foreign, {{"k", "v"}}, roomy(1)), ContractViolation);

    // Reduce-side accounting: one key gathers every value on one machine.
    ClusterConfig narrow;
    narrow.machines = 4;
    narrow.mem_per_machine = 40;
    std::vector<KeyValue> many;
    for (int i = 0; i < 8; ++i) many.push_back({"same", "0123456789"});
    CHECK_THROWS_AS((void)run_round(identity_map, identity_reduce, many, narrow), MemoryOverflow);
}

TEST_CASE("rounds are deterministic") {
    Rng rng(5);
    std::vector<KeyValue> input;
    for (int i = 0; i < 200; ++i) input.push_back({random_string(rng, 3), random_string(rng, 5)});
    const RoundOutput a = run_round(identity_map, identity_reduce, input, roomy(7), 1);
    const RoundOutput b = run_round(identity_map, identity_reduce, input, roomy(7), 1);
    CHECK(a.output == b.output);
    CHECK(a.trace == b.trace);
}

TEST_CASE("band entries are sub-edit distances") {
    Rng rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const std::string s1 = random_string(rng, 14, 3);
        const std::string s2 = mutate(rng, s1, 3, 3);
        const std::size_t a = uniform_below(rng, 6);
        const std::size_t b = a + uniform_below(rng, s1.size() - a + 1);
        const std::size_t d = 3;
        const BandMatrix m = band_direct(s1, s2, a, b, d);
        for (std::int64_t p = -3; p <= 3; ++p) {
            for (std::int64_t q = -3; q <= 3; ++q) {
                const std::int64_t lo = static_cast<std::int64_t>(a) + p;
                const std::int64_t hi = static_cast<std::int64_t>(b) + q;
                if (lo < 0 || hi > static_cast<std::int64_t>(s2.size()) || hi < lo) {
                    CHECK(m.at(p, q) == BandMatrix::kInf);
                } else {
                    CHECK(m.at(p, q) == recursive_edit(std::string_view(s1).substr(a, b - a),
                                                       std::string_view(s2).substr(static_cast<std::size_t>(lo),
                                                                                   static_cast<std::size_t>(hi - lo))));
                }
            }
        }
    }
}

TEST_CASE("band product basics") {
    Rng rng(3);
    const BandMatrix a = random_band(rng, 0, 5, 2);
    CHECK(band_min_plus(a, BandMatrix::identity(5, 2)) == a);
    CHECK(band_min_plus(BandMatrix::identity(0, 2), a) == a);

    BandMatrix z1(0, 1, 1), z2(1, 2, 1);
    std::fill(z1.cells().begin(), z1.cells().end(), 0);
    std::fill(z2.cells().begin(), z2.cells().end(), 0);
    const BandMatrix z = band_min_plus(z1, z2);
    CHECK(std::all_of(z.cells().begin(), z.cells().end(), [](Distance v) { return v == 0; }));

    CHECK_THROWS_AS((void)band_min_plus(a, random_band(rng, 6, 9, 2)), std::invalid_argument);
    CHECK_THROWS_AS((void)band_min_plus(a, random_band(rng, 5, 9, 3)), std::invalid_argument);
}

TEST_CASE("splitting a pair at 32 and multiplying the halves") {
    Rng rng(64);
    const std::string s1 = random_string(rng, 64);
    const std::string s2 = mutate(rng, s1, 3);
    const BandMatrix left = band_direct(s1, s2, 0, 32, 4);
    const BandMatrix right = band_direct(s1, s2, 32, 64, 4);
    CHECK(band_min_plus(left, right) == band_direct(s1, s2, 0, 64, 4));
}

TEST_CASE("band product is associative and matches the serial reference") {
    Rng rng(99);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t d = 1 + uniform_below(rng, 4);
        const BandMatrix a = random_band(rng, 0, 3, d);
        const BandMatrix b = random_band(rng, 3, 7, d);
        const BandMatrix c = random_band(rng, 7, 8, d);
        CHECK(band_min_plus(band_min_plus(a, b), c) == band_min_plus(a, band_min_plus(b, c)));
        CHECK(band_min_plus(a, b) == band_min_plus_serial(a, b));
    }
}

TEST_CASE("small delta chain") {
    const ClusterConfig cfg = ClusterConfig::for_problem(256, 8.0 / 9.0, 0.5);

    SUBCASE("equal strings") {
        Rng rng(1);
        const std::string s = random_string(rng, 256);
        CHECK(mr_edit_small_delta(s, s, 8.0 / 256.0, cfg).cost == 0);
    }

    SUBCASE("planted distance 4 is recovered exactly") {
        Rng rng(2);
        const auto [s1, s2] = pair_at(rng, 256, 4);
        const double delta = 8.0 / 256.0;
        REQUIRE(-std::log(delta) / std::log(256.0) >= critical_alpha(cfg.x));
        const MrOutcome out = mr_edit_small_delta(s1, s2, delta, cfg);
        CHECK(out.cost == 4);
        const SmallDeltaPlan plan = plan_small_delta(256, 256, delta, cfg);
        CHECK(plan.blocks > 1);
        const auto halvings = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(plan.blocks))));
        CHECK(out.rounds() == 1 + 2 * halvings);
    }

    SUBCASE("exact on random planted pairs within the band") {
        Rng rng(3);
        for (int rep = 0; rep < 25; ++rep) {
            const std::size_t n = 32 + uniform_below(rng, 200);
            const std::string s1 = random_string(rng, n);
            const std::string s2 = mutate(rng, s1, uniform_below(rng, 10));
            const std::int64_t exact = edit_distance(s1, s2);
            const double delta = std::min(1.0, static_cast<double>(exact + 1) / static_cast<double>(std::max(n, s2.size())));
            const ClusterConfig c = ClusterConfig::for_problem(std::max(n, s2.size()), 8.0 / 9.0, 0.5);
            CHECK(mr_edit_small_delta(s1, s2, delta, c).cost == exact);
        }
    }

    SUBCASE("length gap outside the band") {
        Rng rng(4);
        const std::string s1 = random_string(rng, 100);
        const MrOutcome out = mr_edit_small_delta(s1, s1.substr(0, 80), 10.0 / 100.0, cfg);
        CHECK_FALSE(out.cost.has_value());
        CHECK(out.rounds() == 0);
    }

    SUBCASE("one block needs no multiplication") {
        Rng rng(5);
        const std::string s1 = random_string(rng, 200);
        const std::string s2 = mutate(rng, s1, 12);
        const double delta = 0.5;  // y clamps to 0: a single block
        REQUIRE(plan_small_delta(200, s2.size(), delta, cfg).blocks == 1);
        const MrOutcome out = mr_edit_small_delta(s1, s2, delta, cfg);
        CHECK(out.rounds() == 1);
        CHECK(out.cost == edit_bounded(s1, s2, 100));
    }
}

TEST_CASE("large delta rounds") {
    SUBCASE("equal strings") {
        Rng rng(6);
        const std::string s = random_string(rng, 300);
        const ClusterConfig cfg = ClusterConfig::for_problem(300, 8.0 / 9.0, 0.5);
        const MrOutcome out = mr_edit_large_delta(s, s, 0.5, 0.5, cfg);
        CHECK(out.cost == 0);
        CHECK(out.rounds() == 2);
    }

    SUBCASE("planted n = 512, distance 16") {
        Rng rng(7);
        const auto [s1, s2] = pair_at(rng, 512, 16);
        const double delta = 32.0 / 512.0;
        // This delta sits below the large-delta regime, so the band is wide;
        // give the machines room for it.
        const ClusterConfig cfg = ClusterConfig::for_problem(512, 8.0 / 9.0, 0.5, 0.25, 512.0);
        const MrOutcome out = mr_edit_large_delta(s1, s2, delta, 0.5, cfg);
        REQUIRE(out.cost.has_value());
        CHECK(*out.cost >= 16);
        CHECK(static_cast<double>(*out.cost) / 16.0 <= 3.5);

        const LargeDeltaPlan plan = plan_large_delta(512, s2.size(), delta, 0.5, cfg);
        CHECK(out.max_pair_offset <= plan.band);
        CHECK(out.evaluated_pairs > 0);
    }

    SUBCASE("never below the distance") {
        Rng rng(8);
        for (int rep = 0; rep < 10; ++rep) {
            const std::string s1 = random_string(rng, 256);
            const std::string s2 = mutate(rng, s1, 20 + uniform_below(rng, 60));
            const ClusterConfig cfg = ClusterConfig::for_problem(256, 8.0 / 9.0, 0.5);
            CHECK(*mr_edit_large_delta(s1, s2, 0.6, 0.5, cfg).cost >= edit_distance(s1, s2));
        }
    }
}

TEST_CASE("driver") {
    SUBCASE("equal strings through the equality branch") {
        Rng rng(9);
        const std::string s = random_string(rng, 200);
        const MrEditResult r = mr_edit(s, s, 0.5, ClusterConfig::for_problem(200, 8.0 / 9.0, 0.5));
        CHECK(r.approx.estimate == 0);
        CHECK(r.approx.path == ApproxPath::equal);
        CHECK(r.approx.factor_bound == doctest::Approx(3.5));
    }

    SUBCASE("ratio, rounds and memory on planted pairs") {
        Rng rng(10);
        for (const std::size_t n : {64u, 200u, 400u}) {
            const std::string s1 = random_string(rng, n);
            const std::string s2 = mutate(rng, s1, n / 6);
            const ClusterConfig cfg = ClusterConfig::for_problem(n, 8.0 / 9.0, 0.5);
            const MrEditResult r = mr_edit(s1, s2, 0.5, cfg);
            const std::int64_t exact = edit_distance(s1, s2);
            CHECK(r.approx.estimate >= exact);
            CHECK(static_cast<double>(r.approx.estimate) <= 3.5 * static_cast<double>(exact));
            CHECK(static_cast<double>(r.rounds) <= 12.0 * std::log2(static_cast<double>(n)));
            CHECK(r.max_machine_mem() <= cfg.mem_per_machine);
        }
    }

    SUBCASE("same input, same traces") {
        Rng rng(11);
        const std::string s1 = random_string(rng, 150);
        const std::string s2 = mutate(rng, s1, 30);
        const ClusterConfig cfg = ClusterConfig::for_problem(150, 8.0 / 9.0, 0.5);
        const MrEditResult a = mr_edit(s1, s2, 0.5, cfg);
        const MrEditResult b = mr_edit(s1, s2, 0.5, cfg);
        CHECK(a.approx.estimate == b.approx.estimate);
        CHECK(a.traces == b.traces);
    }

    SUBCASE("overflow propagates") {
        Rng rng(12);
        const std::string s1 = random_string(rng, 128);
        ClusterConfig cfg = ClusterConfig::for_problem(128, 8.0 / 9.0, 0.5);
        cfg.mem_per_machine = 64;
        CHECK_THROWS_AS((void)mr_edit(s1, mutate(rng, s1, 5), 0.5, cfg), MemoryOverflow);
    }
}
