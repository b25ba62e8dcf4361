#pragma once

// Distance oracle with a Grover-model query meter.
//
// Listing and search primitives run as classical scans (so their results are
// exactly those of a scan) but are charged the quantum query cost:
//   list up to m of N matches:  ceil(sqrt(N * min(m, max(1, #matches)))) + ceil(sqrt(N))
//   find one of N:              ceil(sqrt(N))
// All Grover constants are 1.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace subquad {

using Distance = std::int64_t;
using DistanceFn = std::function<Distance(std::size_t, std::size_t)>;

/// Plain copy of a meter's counters.
struct MeterReading {
    std::uint64_t charged = 0;
    std::uint64_t raw_evals = 0;
    std::uint64_t time_units = 0;

    MeterReading &operator+=(const MeterReading &o) noexcept {
        charged += o.charged;
        raw_evals += o.raw_evals;
        time_units += o.time_units;
        return *this;
    }
    friend bool operator==(const MeterReading &, const MeterReading &) = default;
};

/// Monotone counters. `charged` is in Grover query units, `raw_evals` counts
/// actual distance evaluations, `time_units` is a separate work meter callers
/// may charge (for example l² per window-distance evaluation).
class QueryMeter {
  public:
    QueryMeter() = default;
    QueryMeter(const QueryMeter &other) noexcept { *this = other; }
    QueryMeter &operator=(const QueryMeter &other) noexcept {
        charged_.store(other.charged(), std::memory_order_relaxed);
        raw_evals_.store(other.raw_evals(), std::memory_order_relaxed);
        time_units_.store(other.time_units(), std::memory_order_relaxed);
        return *this;
    }

    void charge(std::uint64_t units) noexcept { charged_.fetch_add(units, std::memory_order_relaxed); }
    void count_evals(std::uint64_t n) noexcept { raw_evals_.fetch_add(n, std::memory_order_relaxed); }
    void charge_time(std::uint64_t units) noexcept { time_units_.fetch_add(units, std::memory_order_relaxed); }

    [[nodiscard]] std::uint64_t charged() const noexcept { return charged_.load(std::memory_order_relaxed); }
    [[nodiscard]] std::uint64_t raw_evals() const noexcept { return raw_evals_.load(std::memory_order_relaxed); }
    [[nodiscard]] std::uint64_t time_units() const noexcept { return time_units_.load(std::memory_order_relaxed); }
    [[nodiscard]] MeterReading reading() const noexcept { return {charged(), raw_evals(), time_units()}; }

  private:
    std::atomic<std::uint64_t> charged_{0};
    std::atomic<std::uint64_t> raw_evals_{0};
    std::atomic<std::uint64_t> time_units_{0};
};

/// A finite metric behind an oracle. All distances are integers in
/// [lower_bound, upper_bound]; the caller asserts symmetry and d(i,i) = 0.
class MeteredMetric {
  public:
    MeteredMetric(std::size_t n, DistanceFn distance_fn, Distance lower_bound, Distance upper_bound);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] Distance lower_bound() const noexcept { return lower_; }
    [[nodiscard]] Distance upper_bound() const noexcept { return upper_; }
    [[nodiscard]] QueryMeter &meter() noexcept { return meter_; }
    [[nodiscard]] const QueryMeter &meter() const noexcept { return meter_; }

    /// Evaluates without charging Grover units (used by the scan simulations,
    /// which charge their own cost). Counts one raw evaluation.
    [[nodiscard]] Distance evaluate(std::size_t i, std::size_t j);

  private:
    std::size_t n_;
    DistanceFn distance_fn_;
    Distance lower_;
    Distance upper_;
    QueryMeter meter_;
};

/// Classical query: one unit. Throws std::out_of_range on a bad index.
Distance query(MeteredMetric &metric, std::size_t i, std::size_t j);

/// Test applied to d(pivot, x) for each candidate x.
using DistancePredicate = std::function<bool(Distance)>;

struct GroverListing {
    std::vector<std::size_t> matches;  // ascending
    bool overflow = false;             // more than `cap` matches exist
};

/// Lists up to `cap` candidates x in `domain` (ascending order required) with
/// predicate(d(pivot, x)).
GroverListing grover_list(MeteredMetric &metric, std::size_t pivot, std::span<const std::size_t> domain,
                          const DistancePredicate &predicate, std::size_t cap);

/// Lowest-index candidate satisfying the predicate.
std::optional<std::size_t> grover_find_one(MeteredMetric &metric, std::size_t pivot,
                                           std::span<const std::size_t> domain,
                                           const DistancePredicate &predicate);

/// ceil(sqrt(x)) computed exactly on integers.
std::uint64_t ceil_sqrt(std::uint64_t x) noexcept;

}  // namespace subquad
