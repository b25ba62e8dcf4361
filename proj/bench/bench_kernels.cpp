// Serial reference kernels against their OpenMP counterparts.

#include "subquad/band_matrix.hpp"
#include "subquad/mapreduce.hpp"
#include "subquad/rng.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace subquad;

BandMatrix random_band(std::uint64_t seed, std::size_t a, std::size_t b, std::size_t d) {
    Rng rng(seed);
    BandMatrix m(a, b, d);
    for (auto &c : m.cells()) c = static_cast<Distance>(uniform_below(rng, 1000));
    return m;
}

void BM_min_plus_serial(benchmark::State &state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const BandMatrix a = random_band(1, 0, 10, d), b = random_band(2, 10, 20, d);
    for (auto _ : state) benchmark::DoNotOptimize(band_min_plus_serial(a, b));
    state.SetComplexityN(state.range(0));
}

void BM_min_plus_openmp(benchmark::State &state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const BandMatrix a = random_band(1, 0, 10, d), b = random_band(2, 10, 20, d);
    for (auto _ : state) benchmark::DoNotOptimize(band_min_plus(a, b));
    state.SetComplexityN(state.range(0));
}

BENCHMARK(BM_min_plus_serial)->RangeMultiplier(2)->Range(16, 128)->Complexity(benchmark::oNCubed);
BENCHMARK(BM_min_plus_openmp)->RangeMultiplier(2)->Range(16, 128)->Complexity(benchmark::oNCubed);

// One shuffle round with a reducer that does real work per key.
void BM_round(benchmark::State &state) {
    std::vector<KeyValue> input;
    for (int i = 0; i < 2000; ++i) input.push_back({std::to_string(i % 97), std::string(32, static_cast<char>('a' + i % 7))});
    ClusterConfig cfg;
    cfg.machines = 16;
    cfg.mem_per_machine = 1ULL << 30;
    const Mapper map = [](const KeyValue &kv) { return std::vector<KeyValue>{kv}; };
    const Reducer reduce = [](const std::string &key, const std::vector<std::string> &values) {
        std::uint64_t h = 0;
        for (int rep = 0; rep < 200; ++rep) {
            for (const auto &v : values) h = h * 31 + fnv1a64(v);
        }
        ReduceResult r;
        r.emitted.push_back({key, std::to_string(h)});
        return r;
    };
    for (auto _ : state) benchmark::DoNotOptimize(run_round(map, reduce, input, cfg));
}

BENCHMARK(BM_round);

}  // namespace

BENCHMARK_MAIN();
