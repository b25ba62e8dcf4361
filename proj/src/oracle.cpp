#include "subquad/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace subquad {

MeteredMetric::MeteredMetric(std::size_t n, DistanceFn distance_fn, Distance lower_bound, Distance upper_bound)
    : n_{n}, distance_fn_{std::move(distance_fn)}, lower_{lower_bound}, upper_{upper_bound} {
    if (lower_bound < 0 || upper_bound < lower_bound) {
        throw std::invalid_argument("metric bounds must satisfy 0 <= lower <= upper");
    }
}

Distance MeteredMetric::evaluate(std::size_t i, std::size_t j) {
    if (i >= n_ || j >= n_) {
        throw std::out_of_range("point index (" + std::to_string(i) + ", " + std::to_string(j) +
                                ") outside metric of size " + std::to_string(n_));
    }
    meter_.count_evals(1);
    if (i == j) {
        return 0;
    }
    return distance_fn_(i, j);
}

Distance query(MeteredMetric &metric, std::size_t i, std::size_t j) {
    const Distance d = metric.evaluate(i, j);
    metric.meter().charge(1);
    return d;
}

std::uint64_t ceil_sqrt(std::uint64_t x) noexcept {
    if (x == 0) {
        return 0;
    }
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(x)));
    while (r * r > x) {
        --r;
    }
    while (r * r < x) {
        ++r;
    }
    return r;
}

namespace {

void require_sorted(std::span<const std::size_t> domain) {
    if (!std::is_sorted(domain.begin(), domain.end())) {
        throw std::invalid_argument("grover domain must be sorted ascending");
    }
}

}  // namespace

GroverListing grover_list(MeteredMetric &metric, std::size_t pivot, std::span<const std::size_t> domain,
                          const DistancePredicate &predicate, std::size_t cap) {
    if (cap == 0) {
        throw std::invalid_argument("grover_list cap must be at least 1");
    }
    GroverListing out;
    if (domain.empty()) {
        return out;
    }
    require_sorted(domain);
    // The scan stops once it has seen cap + 1 matches; that is all the cost
    // formula and the overflow flag need.
    std::size_t found = 0;
    for (const std::size_t x : domain) {
        if (predicate(metric.evaluate(pivot, x))) {
            ++found;
            if (found > cap) {
                out.overflow = true;
                break;
            }
            out.matches.push_back(x);
        }
    }
    const std::uint64_t listed = std::min<std::uint64_t>(cap, std::max<std::uint64_t>(1, found));
    metric.meter().charge(ceil_sqrt(domain.size() * listed) + ceil_sqrt(domain.size()));
    return out;
}

std::optional<std::size_t> grover_find_one(MeteredMetric &metric, std::size_t pivot,
                                           std::span<const std::size_t> domain,
                                           const DistancePredicate &predicate) {
    if (domain.empty()) {
        return std::nullopt;
    }
    require_sorted(domain);
    metric.meter().charge(ceil_sqrt(domain.size()));
    for (const std::size_t x : domain) {
        if (predicate(metric.evaluate(pivot, x))) {
            return x;
        }
    }
    return std::nullopt;
}

}  // namespace subquad
