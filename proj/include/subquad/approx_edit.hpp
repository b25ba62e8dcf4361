#pragma once

// Edit-distance approximation through window matchings whose window-pair
// distances come from metric estimation over the windows.
//
//   bounded_edit_approx  7+eps under the promise edit <= delta*n
//   edit_approx          geometric guesses for delta, first accepted script wins
//   edit_approx_boot     recursive variant whose window oracle is itself an
//                        approximation at 2*eps

#include "subquad/oracle.hpp"
#include "subquad/strings.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace subquad {

struct ApproxParams {
    /// Below this length (max of the two) the classic DP answers directly;
    /// the asymptotic window sizes are meaningless there.
    std::size_t size_floor = 4096;
    /// Hand the small-delta case to the banded exact algorithm.
    bool crossover = true;
    /// Force window size and gap. Either override also bypasses size_floor.
    std::optional<std::size_t> window_size;
    std::optional<std::size_t> gap;
    /// Seed for the randomized estimation used by the recursive variant.
    std::uint64_t seed = 0;

    [[nodiscard]] bool overridden() const noexcept { return window_size.has_value() || gap.has_value(); }
};

enum class ApproxPath : std::uint8_t { equal, exact, bounded, windows };

struct ApproxResult {
    std::int64_t estimate = 0;  // length of script
    std::optional<TransformationScript> script;
    double factor_bound = 1.0;
    MeterReading meter;
    /// False when the promise edit <= delta*n was observably broken: the
    /// banded search found nothing within delta*n (script is then the trivial
    /// one) or the script came out longer than the guarantee allows.
    bool guarantee_held = true;
    ApproxPath path = ApproxPath::exact;
    std::size_t depth = 0;  // deepest recursion level reached
};

/// Windows at beta = 6/7, gamma = ceil(1/(eps' delta)), eps' = eps/4.
ApproxResult bounded_edit_approx(std::string_view s1, std::string_view s2, double delta, double eps,
                                 const ApproxParams &params = {});

/// 7+eps approximation with no promise on the distance.
ApproxResult edit_approx(std::string_view s1, std::string_view s2, double eps, const ApproxParams &params = {});

struct BootstrapConfig {
    double eps = 0.1;
    std::size_t depth = 0;
    ApproxParams params;

    /// (sqrt(17) - 1)/4 + eps.
    [[nodiscard]] double beta() const noexcept;
    /// 1 - beta.
    [[nodiscard]] double phi() const noexcept { return 1.0 - beta(); }
    /// True once eps >= (5 - sqrt(17))/4; from there on the classic DP is used.
    [[nodiscard]] bool base_case() const noexcept;
};

/// e(eps) = 2 * (9/eps) * e(2 eps) + 1, equal to 1 in the base case.
double bootstrap_factor(double eps);

/// ceil(log2(1/eps)) + 1.
std::size_t bootstrap_depth_limit(double eps);

ApproxResult edit_approx_boot(std::string_view s1, std::string_view s2, const BootstrapConfig &cfg);

std::string_view to_string(ApproxPath path) noexcept;

}  // namespace subquad
