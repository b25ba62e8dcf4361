#pragma once

// Edit distance on the simulated MapReduce cluster.
//
// Large delta: exact distances of useful window pairs in one round, the banded
// window DP on one machine in the next. Small delta: banded sub-edit-distance
// matrices per block of s1, multiplied pairwise in (min,+) until one is left.
// The driver runs a geometric grid of deltas side by side and keeps the
// cheapest answer.

#include "subquad/approx_edit.hpp"
#include "subquad/mapreduce.hpp"
#include "subquad/oracle.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace subquad {

/// alpha* with delta* = n^-alpha*: 2(4-x)/21 for x > 13/20, else 3(x+1)/16.
double critical_alpha(double x);

struct SmallDeltaPlan {
    double alpha = 0.0;
    double y = 0.0;            // blocks = ceil(n^y)
    double t = 0.0;            // machines per block = ceil(n^t)
    std::size_t band = 0;      // half width ceil(delta*n)
    std::size_t blocks = 0;
    std::size_t parts = 0;     // row groups per block
    std::size_t chunk = 0;     // input record length
};

struct LargeDeltaPlan {
    double alpha = 0.0;
    double beta = 0.0;
    std::size_t l = 0;
    std::size_t gamma = 0;
    std::size_t g = 0;
    std::size_t band = 0;      // useful pairs have |i - j| <= band
    std::size_t chunk = 0;
};

/// n is the longer length. Throws std::invalid_argument for delta outside (0, 1].
SmallDeltaPlan plan_small_delta(std::size_t n1, std::size_t n2, double delta, const ClusterConfig &cfg);
LargeDeltaPlan plan_large_delta(std::size_t n1, std::size_t n2, double delta, double eps, const ClusterConfig &cfg);

struct MrOutcome {
    /// Absent when the strings cannot be within delta*n of each other.
    std::optional<Distance> cost;
    std::vector<RoundTrace> traces;
    std::uint64_t evaluated_pairs = 0;  // large delta only
    std::size_t max_pair_offset = 0;    // largest |i - j| among them

    [[nodiscard]] std::size_t rounds() const noexcept { return traces.size(); }
    [[nodiscard]] std::uint64_t max_machine_mem() const noexcept;
    [[nodiscard]] std::uint64_t total_work() const noexcept;
};

/// Any finite cost is the cost of a real alignment; it equals edit(s1, s2)
/// whenever edit <= ceil(delta*n).
MrOutcome mr_edit_small_delta(std::string_view s1, std::string_view s2, double delta, const ClusterConfig &cfg);

/// Cost of the best window-compatible transformation over exact window-pair
/// distances inside the useful band. Always an upper bound on edit.
MrOutcome mr_edit_large_delta(std::string_view s1, std::string_view s2, double delta, double eps,
                              const ClusterConfig &cfg);

struct MrEditResult {
    ApproxResult approx;            // no script; factor_bound = 3 + eps
    std::vector<RoundTrace> traces;  // every round of every subproblem plus the combine round
    std::size_t rounds = 0;         // subproblems run side by side: longest one plus the combine round
    std::size_t subproblems = 0;
    double chosen_delta = 0.0;

    [[nodiscard]] std::uint64_t max_machine_mem() const noexcept;
};

/// Subproblems: delta = 0 (equality, same lengths only) and
/// delta_k = (1+eps/3)^k / n up to 1. Those with alpha >= alpha* go to the
/// exact small-delta chain, which only needs running at the largest of them;
/// the rest each run the large-delta rounds.
MrEditResult mr_edit(std::string_view s1, std::string_view s2, double eps, const ClusterConfig &cfg);

}  // namespace subquad
