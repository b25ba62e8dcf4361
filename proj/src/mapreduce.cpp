#include "subquad/mapreduce.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>

namespace subquad {

ByteWriter &ByteWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
    }
    return *this;
}

ByteWriter &ByteWriter::str(std::string_view s) {
    const auto n = static_cast<std::uint32_t>(s.size());
    for (int i = 0; i < 4; ++i) {
        out_.push_back(static_cast<char>((n >> (8 * i)) & 0xffU));
    }
    out_.append(s);
    return *this;
}

std::uint64_t ByteReader::u64() {
    if (in_.size() - pos_ < 8) {
        throw std::out_of_range("truncated record");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
    }
    pos_ += 8;
    return v;
}

std::string_view ByteReader::str() {
    if (in_.size() - pos_ < 4) {
        throw std::out_of_range("truncated record");
    }
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) {
        n |= static_cast<std::uint32_t>(static_cast<unsigned char>(in_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
    }
    pos_ += 4;
    if (in_.size() - pos_ < n) {
        throw std::out_of_range("truncated record");
    }
    const std::string_view s = in_.substr(pos_, n);
    pos_ += n;
    return s;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 14695981039346656037ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

ClusterConfig ClusterConfig::for_problem(std::size_t n, double x, double eps, double slack, double mem_constant) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("eps must be positive");
    }
    const double nd = static_cast<double>(std::max<std::size_t>(n, 1));
    ClusterConfig cfg;
    cfg.x = x;
    cfg.mem_slack = slack;
    cfg.machines = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::pow(nd, x) - 1e-9)));
    cfg.mem_per_machine = static_cast<std::uint64_t>(std::ceil(mem_constant * std::pow(nd, x + slack) / (eps * eps)));
    return cfg;
}

std::uint64_t RoundTrace::max_machine_mem() const noexcept {
    return machine_mem.empty() ? 0 : *std::max_element(machine_mem.begin(), machine_mem.end());
}

std::uint64_t RoundTrace::total_work() const noexcept {
    return std::accumulate(machine_work.begin(), machine_work.end(), std::uint64_t{0});
}

MemoryOverflow::MemoryOverflow(std::size_t round_index, std::size_t machine_index, const char *phase,
                               std::uint64_t bytes, std::uint64_t cap)
    : std::runtime_error("round " + std::to_string(round_index) + ": machine " + std::to_string(machine_index) +
                         " holds " + std::to_string(bytes) + " bytes in the " + phase + " phase (cap " +
                         std::to_string(cap) + ")"),
      round{round_index},
      machine{machine_index} {}

namespace {

// Runs body(i) for i in [0, n) across OpenMP threads and rethrows the first
// exception (by index) afterwards.
template <class Body>
void parallel_for(std::size_t n, Body &&body) {
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

void check_memory(const std::vector<std::uint64_t> &mem, const ClusterConfig &cfg, std::size_t round,
                  const char *phase) {
    for (std::size_t m = 0; m < mem.size(); ++m) {
        if (mem[m] > cfg.mem_per_machine) {
            throw MemoryOverflow(round, m, phase, mem[m], cfg.mem_per_machine);
        }
    }
}

}  // namespace

RoundOutput run_round(const Mapper &mapper, const Reducer &reducer, const std::vector<KeyValue> &input,
                      const ClusterConfig &cfg, std::size_t round_index) {
    if (cfg.machines == 0) {
        throw std::invalid_argument("cluster needs at least one machine");
    }
    const std::size_t np = cfg.machines;
    RoundOutput out;
    RoundTrace &trace = out.trace;
    trace.round = round_index;
    trace.machine_mem.assign(np, 0);
    trace.machine_work.assign(np, 0);

    // Map phase.
    std::vector<std::vector<KeyValue>> mapped(input.size());
    parallel_for(input.size(), [&](std::size_t i) { mapped[i] = mapper(input[i]); });
    std::vector<std::uint64_t> map_mem(np, 0);
    for (std::size_t i = 0; i < input.size(); ++i) {
        const std::size_t m = i % np;
        map_mem[m] += input[i].serialized_size();
        for (const auto &kv : mapped[i]) map_mem[m] += kv.serialized_size();
        trace.machine_work[m] += 1;
    }
    check_memory(map_mem, cfg, round_index, "map");

    // Shuffle: group by key, values in input order.
    std::map<std::string, std::vector<std::string>> groups;
    for (auto &records : mapped) {
        for (auto &kv : records) {
            ++trace.shuffle_volume;
            trace.shuffle_bytes += kv.serialized_size();
            groups[kv.key].push_back(std::move(kv.value));
        }
    }
    mapped.clear();

    // Reduce phase.
    std::vector<const std::string *> keys;
    std::vector<const std::vector<std::string> *> values;
    keys.reserve(groups.size());
    values.reserve(groups.size());
    for (const auto &[k, v] : groups) {
        keys.push_back(&k);
        values.push_back(&v);
    }
    std::vector<ReduceResult> reduced(keys.size());
    parallel_for(keys.size(), [&](std::size_t i) { reduced[i] = reducer(*keys[i], *values[i]); });

    std::vector<std::uint64_t> reduce_mem(np, 0);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const std::string &key = *keys[i];
        const std::size_t m = static_cast<std::size_t>(fnv1a64(key) % np);
        std::uint64_t bytes = reduced[i].scratch_bytes;
        for (const auto &v : *values[i]) bytes += 8 + key.size() + v.size();
        for (const auto &kv : reduced[i].emitted) {
            if (kv.key != key) {
                throw ContractViolation("round " + std::to_string(round_index) + ": reducer for a key emitted a foreign key");
            }
            bytes += kv.serialized_size();
        }
        reduce_mem[m] += bytes;
        trace.machine_work[m] += reduced[i].work_units != 0 ? reduced[i].work_units : values[i]->size();
    }
    check_memory(reduce_mem, cfg, round_index, "reduce");

    for (std::size_t m = 0; m < np; ++m) {
        trace.machine_mem[m] = std::max(map_mem[m], reduce_mem[m]);
    }
    // Keys come out of the map in sorted order, so concatenation is sorted.
    for (auto &r : reduced) {
        for (auto &kv : r.emitted) out.output.push_back(std::move(kv));
    }
    return out;
}

std::vector<KeyValue> MapReduceJob::run(const Mapper &mapper, const Reducer &reducer,
                                        const std::vector<KeyValue> &input) {
    RoundOutput r = run_round(mapper, reducer, input, cfg_, traces_.size() + 1);
    traces_.push_back(std::move(r.trace));
    return std::move(r.output);
}

}  // namespace subquad
