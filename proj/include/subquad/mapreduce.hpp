#pragma once

// Deterministic simulated MapReduce.
//
// A round maps every input record, shuffles by key and reduces each key on
// one simulated machine. Map input i runs on machine i mod N_p; key k
// reduces on machine fnv1a64(k) mod N_p. A machine's memory in a phase is the
// serialized size of every record it holds (inputs plus outputs, plus scratch
// the reducer declares), summed over everything assigned to it. Exceeding
// mem_per_machine aborts the round.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace subquad {

struct KeyValue {
    std::string key;
    std::string value;

    /// 8 bytes of framing (two 32-bit lengths) plus payload.
    [[nodiscard]] std::uint64_t serialized_size() const noexcept { return 8 + key.size() + value.size(); }
    friend bool operator==(const KeyValue &, const KeyValue &) = default;
};

/// Little-endian writer used for keys and values. Strings are length-prefixed
/// (32-bit), so concatenated fields never collide.
class ByteWriter {
  public:
    ByteWriter &u64(std::uint64_t v);
    ByteWriter &i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
    ByteWriter &str(std::string_view s);
    [[nodiscard]] std::string take() { return std::move(out_); }
    [[nodiscard]] const std::string &view() const noexcept { return out_; }

  private:
    std::string out_;
};

class ByteReader {
  public:
    explicit ByteReader(std::string_view in) : in_{in} {}
    std::uint64_t u64();
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    std::string_view str();
    [[nodiscard]] bool done() const noexcept { return pos_ == in_.size(); }

  private:
    std::string_view in_;
    std::size_t pos_ = 0;
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

struct ClusterConfig {
    std::size_t machines = 1;                // N_p
    std::uint64_t mem_per_machine = 0;       // N_m, bytes
    double x = 8.0 / 9.0;                    // machine exponent
    double mem_slack = 0.25;                 // memory exponent above x

    /// N_p = ceil(n^x), N_m = ceil(mem_constant * n^(x + slack) / eps^2).
    static ClusterConfig for_problem(std::size_t n, double x, double eps, double slack = 0.25,
                                     double mem_constant = 256.0);
};

struct RoundTrace {
    std::size_t round = 0;
    std::vector<std::uint64_t> machine_mem;   // max over the two phases
    std::vector<std::uint64_t> machine_work;  // map records + reducer work
    std::uint64_t shuffle_volume = 0;         // records shuffled
    std::uint64_t shuffle_bytes = 0;

    [[nodiscard]] std::uint64_t max_machine_mem() const noexcept;
    [[nodiscard]] std::uint64_t total_work() const noexcept;
    friend bool operator==(const RoundTrace &, const RoundTrace &) = default;
};

struct ReduceResult {
    std::vector<KeyValue> emitted;
    std::uint64_t scratch_bytes = 0;  // working memory beyond inputs/outputs
    std::uint64_t work_units = 0;     // 0 means "one per input value"
};

using Mapper = std::function<std::vector<KeyValue>(const KeyValue &)>;
using Reducer = std::function<ReduceResult(const std::string &key, const std::vector<std::string> &values)>;

class MemoryOverflow : public std::runtime_error {
  public:
    MemoryOverflow(std::size_t round, std::size_t machine, const char *phase, std::uint64_t bytes,
                   std::uint64_t cap);
    std::size_t round;
    std::size_t machine;
};

class ContractViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

struct RoundOutput {
    std::vector<KeyValue> output;  // sorted by key; equal keys keep emission order
    RoundTrace trace;
};

/// Mapper and reducer must be pure: they may run concurrently.
RoundOutput run_round(const Mapper &mapper, const Reducer &reducer, const std::vector<KeyValue> &input,
                      const ClusterConfig &cfg, std::size_t round_index = 0);

/// Runs rounds in sequence and keeps their traces.
class MapReduceJob {
  public:
    explicit MapReduceJob(ClusterConfig cfg) : cfg_{cfg} {}

    std::vector<KeyValue> run(const Mapper &mapper, const Reducer &reducer, const std::vector<KeyValue> &input);

    [[nodiscard]] const ClusterConfig &config() const noexcept { return cfg_; }
    [[nodiscard]] const std::vector<RoundTrace> &traces() const noexcept { return traces_; }
    [[nodiscard]] std::size_t rounds() const noexcept { return traces_.size(); }

  private:
    ClusterConfig cfg_;
    std::vector<RoundTrace> traces_;
};

}  // namespace subquad
