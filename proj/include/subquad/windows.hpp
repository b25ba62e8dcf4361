#pragma once

// Layered windows over a string and the window-compatible transformation DP.
//
// Windows are 1-based inclusive intervals [i*g + 1, i*g + l]. The DP works on
// prefix lengths: P(i) is the end of window i (P(0) = 0), so the boundary row
// c[i][0] = P(i) charges deleting everything up to window i.

#include "subquad/oracle.hpp"
#include "subquad/strings.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace subquad {

struct Window {
    std::size_t start = 0;  // 1-based, inclusive
    std::size_t end = 0;    // 1-based, inclusive

    [[nodiscard]] std::size_t length() const noexcept { return end + 1 - start; }
    friend bool operator==(const Window &, const Window &) = default;
};

struct WindowSet {
    std::size_t source_len = 0;
    std::size_t l = 0;
    std::size_t g = 0;
    std::size_t gamma = 0;
    bool degenerate = false;  // l exceeded the string: one window covering it
    std::vector<Window> windows;

    [[nodiscard]] std::size_t size() const noexcept { return windows.size(); }
};

/// l = floor(n^(1-beta)), g = floor(l/gamma) raised to 1.
WindowSet build_windows(std::size_t source_len, double beta, std::size_t gamma);

/// Explicit window size and gap (both >= 1).
WindowSet build_windows_explicit(std::size_t source_len, std::size_t l, std::size_t g);

/// Explicit windows followed by truncated windows [i*g + 1, len] at every
/// remaining grid start, so chains of windows can reach the end of the string.
WindowSet build_windows_covering(std::size_t source_len, std::size_t l, std::size_t g);

/// Upper bounds on window-pair distances, 0-based indices into W1 and W2.
struct WindowDistanceSource {
    std::function<Distance(std::size_t, std::size_t)> lookup;
    double factor = 1.0;
};

using WindowMatching = std::vector<std::pair<std::size_t, std::size_t>>;

struct WindowDpResult {
    Distance cost = 0;
    WindowMatching matching;  // 0-based, increasing on both sides
};

inline constexpr std::size_t kUnbanded = std::numeric_limits<std::size_t>::max();

/// Minimum over monotone non-overlapping window matchings of
///   sum of dist over matched pairs + characters outside matched windows.
/// With `band` set, only cells with |i - j| <= band are stored; lookups that
/// leave the band fall back to the nearest band cell plus deletion cost, so
/// the result is still the cost of a real matching.
WindowDpResult window_dp(const WindowSet &w1, const WindowSet &w2, const WindowDistanceSource &dist,
                         std::size_t band = kUnbanded);

struct MalformedMatching : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Script realising a matching: unmatched characters are deleted or
/// inserted, matched windows use their exact inner script.
TransformationScript reconstruct_script(std::string_view s1, std::string_view s2, const WindowMatching &matching,
                                        const WindowSet &w1, const WindowSet &w2);

/// ceil(delta * n / g).
std::size_t useful_band(double delta, std::size_t n, std::size_t g);

/// All (i, j) with |i - j| <= useful_band(delta, n, g), n the longer source.
std::vector<std::pair<std::size_t, std::size_t>> useful_pairs(const WindowSet &w1, const WindowSet &w2, double delta,
                                                              std::size_t g);

}  // namespace subquad
