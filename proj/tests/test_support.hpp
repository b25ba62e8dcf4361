#pragma once

// Test-only oracles and generators. Nothing here calls into the library's
// distance code, so it can check it independently.

#include "subquad/rng.hpp"
#include "subquad/windows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace subquad::testing {

/// Edit distance by plain recursion over suffixes, memoized on (i, j).
inline std::int64_t recursive_edit(std::string_view a, std::string_view b) {
    std::map<std::pair<std::size_t, std::size_t>, std::int64_t> memo;
    std::function<std::int64_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::int64_t {
        if (i == a.size()) return static_cast<std::int64_t>(b.size() - j);
        if (j == b.size()) return static_cast<std::int64_t>(a.size() - i);
        const auto key = std::make_pair(i, j);
        if (const auto it = memo.find(key); it != memo.end()) return it->second;
        std::int64_t best;
        if (a[i] == b[j]) {
            best = go(i + 1, j + 1);
        } else {
            best = 1 + std::min({go(i + 1, j + 1), go(i + 1, j), go(i, j + 1)});
        }
        memo.emplace(key, best);
        return best;
    };
    return go(0, 0);
}

inline std::string random_string(Rng &rng, std::size_t len, std::uint64_t alphabet = 4) {
    std::string s(len, 'a');
    for (char &c : s) c = static_cast<char>('a' + uniform_below(rng, alphabet));
    return s;
}

/// Applies `ops` random single-character edits (independent of the library).
inline std::string mutate(Rng &rng, std::string s, std::size_t ops, std::uint64_t alphabet = 4) {
    for (std::size_t k = 0; k < ops; ++k) {
        const auto kind = uniform_below(rng, 3);
        const char c = static_cast<char>('a' + uniform_below(rng, alphabet));
        if (kind == 0 || s.empty()) {
            s.insert(s.begin() + static_cast<std::ptrdiff_t>(uniform_below(rng, s.size() + 1)), c);
        } else if (kind == 1) {
            s.erase(s.begin() + static_cast<std::ptrdiff_t>(uniform_below(rng, s.size())));
        } else {
            s[uniform_below(rng, s.size())] = c;
        }
    }
    return s;
}

/// Exhaustive search over every monotone non-overlapping window matching.
/// Cost = sum of dist over matched pairs + all characters outside matched
/// windows on either side.
inline std::int64_t brute_force_matching(const WindowSet &w1, const WindowSet &w2,
                                         const std::function<std::int64_t(std::size_t, std::size_t)> &dist) {
    const auto total = static_cast<std::int64_t>(w1.source_len + w2.source_len);
    std::int64_t best = total;
    std::function<void(std::size_t, std::size_t, std::int64_t)> go = [&](std::size_t end1, std::size_t end2,
                                                                        std::int64_t acc) {
        best = std::min(best, acc);
        for (std::size_t i = 0; i < w1.size(); ++i) {
            if (w1.windows[i].start <= end1) continue;
            for (std::size_t j = 0; j < w2.size(); ++j) {
                if (w2.windows[j].start <= end2) continue;
                const auto saved = static_cast<std::int64_t>(w1.windows[i].length() + w2.windows[j].length());
                go(w1.windows[i].end, w2.windows[j].end, acc + dist(i, j) - saved);
            }
        }
    };
    go(0, 0, total);
    return best;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace subquad::testing
