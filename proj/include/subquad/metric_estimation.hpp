#pragma once

// Metric estimation under the Grover query model.
//
// Threshold estimation reports every pair at distance <= t and may add false
// positives up to a soundness radius. Full estimation sweeps geometric
// thresholds and assigns each pair the radius of the first threshold that
// covers it.

#include "subquad/oracle.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace subquad {

/// Symmetric boolean n×n matrix with reflexive diagonal.
class ThresholdMatrix {
  public:
    ThresholdMatrix() = default;
    ThresholdMatrix(std::size_t n, Distance threshold, double soundness_radius);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] Distance threshold() const noexcept { return t_; }
    /// Every marked pair is guaranteed to be within this distance.
    [[nodiscard]] double soundness_radius() const noexcept { return radius_; }

    [[nodiscard]] bool operator()(std::size_t i, std::size_t j) const noexcept { return cells_[i * n_ + j] != 0; }
    void mark(std::size_t i, std::size_t j) noexcept {
        cells_[i * n_ + j] = 1;
        cells_[j * n_ + i] = 1;
    }

    /// Number of hitting-set resets the fast variant needed (0 for the others).
    std::size_t resets = 0;

    friend bool operator==(const ThresholdMatrix &, const ThresholdMatrix &) = default;

  private:
    std::size_t n_ = 0;
    Distance t_ = 0;
    double radius_ = 0.0;
    std::vector<std::uint8_t> cells_;
};

/// Symmetric n×n matrix of distance upper bounds within `factor` of the truth.
class EstimateMatrix {
  public:
    EstimateMatrix() = default;
    EstimateMatrix(std::size_t n, double factor) : n_{n}, factor_{factor}, est_(n * n, 0) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double factor() const noexcept { return factor_; }
    [[nodiscard]] Distance operator()(std::size_t i, std::size_t j) const noexcept { return est_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, Distance v) noexcept {
        est_[i * n_ + j] = v;
        est_[j * n_ + i] = v;
    }

    friend bool operator==(const EstimateMatrix &, const EstimateMatrix &) = default;

  private:
    std::size_t n_ = 0;
    double factor_ = 1.0;
    std::vector<Distance> est_;
};

/// Degree-split threshold estimation; soundness radius 3t. Low-degree vertices
/// (at most ceil(n^tau) neighbours) are listed; a high-degree vertex v queries
/// all remaining distances, marks N(v,t) × N(v,2t) and removes N(v,t).
ThresholdMatrix estimate_with_threshold(MeteredMetric &metric, Distance t, double tau = 1.0 / 3.0);

/// (3 + eps)-approximate distance matrix.
EstimateMatrix estimate_metric(MeteredMetric &metric, double eps);

/// ceil(2 (n/degree) ln max(n,2)) distinct indices in [0, n), capped at n,
/// returned ascending.
std::vector<std::size_t> sample_hitting_set(std::size_t n_pts, std::uint64_t degree_threshold,
                                            std::uint64_t seed);

/// Approximation factor of the fast variant: max(1, 9/eps).
double fast_factor(double eps) noexcept;

/// Number of representative levels the fast variant may nest at this eps.
/// A run nesting L levels has soundness (2·3^L - 1)·t, which this keeps
/// within fast_factor(eps)·t.
std::size_t fast_max_levels(double eps) noexcept;

/// Hitting-set threshold estimation; soundness radius fast_factor(eps)·t.
/// Completeness is unconditional: a missed large neighbourhood triggers a
/// reseeded retry (at most 20), after which listings are uncapped.
ThresholdMatrix fast_estimate_with_threshold(MeteredMetric &metric, Distance t, double eps,
                                             std::uint64_t degree_threshold, std::uint64_t seed);

/// fast_factor(eps)·(1 + eps)-approximate matrix, degree threshold ceil(n^{2 eps}).
EstimateMatrix fast_estimate_metric(MeteredMetric &metric, double eps, std::uint64_t seed = 0);

}  // namespace subquad
