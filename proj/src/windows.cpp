#include "subquad/windows.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace subquad {

WindowSet build_windows_explicit(std::size_t source_len, std::size_t l, std::size_t g) {
    if (l == 0 || g == 0) {
        throw std::invalid_argument("window size and gap must be at least 1");
    }
    WindowSet w;
    w.source_len = source_len;
    w.l = l;
    w.g = g;
    w.gamma = std::max<std::size_t>(1, l / g);
    if (source_len == 0) {
        return w;
    }
    if (l > source_len) {
        w.degenerate = true;
        w.windows.push_back({1, source_len});
        return w;
    }
    const std::size_t count = (source_len - l) / g + 1;
    w.windows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        w.windows.push_back({i * g + 1, i * g + l});
    }
    return w;
}

WindowSet build_windows_covering(std::size_t source_len, std::size_t l, std::size_t g) {
    WindowSet w = build_windows_explicit(source_len, l, g);
    if (w.degenerate || w.windows.empty()) {
        return w;
    }
    for (std::size_t s = w.windows.back().start - 1 + g; s < source_len; s += g) {
        w.windows.push_back({s + 1, source_len});
    }
    return w;
}

WindowSet build_windows(std::size_t source_len, double beta, std::size_t gamma) {
    if (gamma == 0) {
        throw std::invalid_argument("gamma must be at least 1");
    }
    const double raw = std::pow(static_cast<double>(source_len), 1.0 - beta);
    const auto l = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(raw + 1e-9)));
    // g = floor(l/gamma) is 0 once gamma > l; a gap of 0 has no meaning, so
    // the gap is raised to 1.
    const std::size_t g = std::max<std::size_t>(1, l / gamma);
    WindowSet w = build_windows_explicit(source_len, l, g);
    w.gamma = gamma;
    return w;
}

namespace {

enum class Step : std::uint8_t { remove, insert, match };

// Prefix end of window i (1-based), P(0) = 0.
std::vector<std::size_t> prefix_ends(const WindowSet &w) {
    std::vector<std::size_t> p(w.size() + 1, 0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        p[i + 1] = w.windows[i].end;
    }
    return p;
}

// before[i] = number of windows ending strictly before window i starts.
std::vector<std::size_t> windows_before(const WindowSet &w) {
    std::vector<std::size_t> ends(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        ends[i] = w.windows[i].end;
    }
    std::vector<std::size_t> before(w.size() + 1, 0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto it = std::lower_bound(ends.begin(), ends.end(), w.windows[i].start);
        before[i + 1] = static_cast<std::size_t>(it - ends.begin());
    }
    return before;
}

class BandedTable {
  public:
    BandedTable(std::size_t rows, std::size_t cols, std::size_t band) : cols_{cols}, band_{band} {
        offset_.resize(rows + 2, 0);
        for (std::size_t i = 0; i <= rows; ++i) {
            offset_[i + 1] = offset_[i] + (lo(i) <= hi(i) ? hi(i) + 1 - lo(i) : 0);
        }
        cost_.assign(offset_[rows + 1], 0);
        step_.assign(offset_[rows + 1], Step::remove);
    }

    [[nodiscard]] std::size_t lo(std::size_t i) const noexcept { return i > band_ ? i - band_ : 0; }
    [[nodiscard]] std::size_t hi(std::size_t i) const noexcept {
        return band_ >= cols_ || i + band_ >= cols_ ? cols_ : i + band_;
    }
    [[nodiscard]] bool inside(std::size_t i, std::size_t j) const noexcept { return j >= lo(i) && j <= hi(i); }

    Distance &cost(std::size_t i, std::size_t j) { return cost_[offset_[i] + (j - lo(i))]; }
    Step &step(std::size_t i, std::size_t j) { return step_[offset_[i] + (j - lo(i))]; }

  private:
    std::size_t cols_;
    std::size_t band_;
    std::vector<std::size_t> offset_;
    std::vector<Distance> cost_;
    std::vector<Step> step_;
};

}  // namespace

WindowDpResult window_dp(const WindowSet &w1, const WindowSet &w2, const WindowDistanceSource &dist,
                         std::size_t band) {
    const std::size_t k1 = w1.size();
    const std::size_t k2 = w2.size();
    const auto p1 = prefix_ends(w1);
    const auto p2 = prefix_ends(w2);
    const auto before1 = windows_before(w1);
    const auto before2 = windows_before(w2);
    const auto as_dist = [](std::size_t x) { return static_cast<Distance>(x); };

    BandedTable table(k1, k2, band);
    // Nearest band cell to (a, b) plus the deletions/insertions that bridge
    // the gap. Inside the band this is the cell itself.
    struct Clamped {
        std::size_t a, b;
        Distance extra;
    };
    const auto clamp = [&](std::size_t a, std::size_t b) -> Clamped {
        if (table.inside(a, b)) return {a, b, 0};
        if (a > b) {
            const std::size_t a2 = b + band;
            return {a2, b, as_dist(p1[a] - p1[a2])};
        }
        const std::size_t b2 = a + band;
        return {a, b2, as_dist(p2[b] - p2[b2])};
    };

    for (std::size_t i = 0; i <= k1; ++i) {
        for (std::size_t j = table.lo(i); j <= table.hi(i) && table.lo(i) <= table.hi(i); ++j) {
            if (i == 0 || j == 0) {
                table.cost(i, j) = as_dist(p1[i] + p2[j]);
                table.step(i, j) = i == 0 ? Step::insert : Step::remove;
                continue;
            }
            Distance best = std::numeric_limits<Distance>::max();
            Step how = Step::remove;
            if (table.inside(i - 1, j)) {
                best = table.cost(i - 1, j) + as_dist(p1[i] - p1[i - 1]);
            }
            if (table.inside(i, j - 1)) {
                const Distance c = table.cost(i, j - 1) + as_dist(p2[j] - p2[j - 1]);
                if (c < best) {
                    best = c;
                    how = Step::insert;
                }
            }
            const auto [a, b, extra] = clamp(before1[i], before2[j]);
            const Distance gap =
                as_dist(w1.windows[i - 1].start - 1 - p1[before1[i]]) + as_dist(w2.windows[j - 1].start - 1 - p2[before2[j]]);
            const Distance c = table.cost(a, b) + extra + gap + dist.lookup(i - 1, j - 1);
            if (c < best) {
                best = c;
                how = Step::match;
            }
            table.cost(i, j) = best;
            table.step(i, j) = how;
        }
    }

    WindowDpResult out;
    const auto [fi, fj, extra] = clamp(k1, k2);
    out.cost = table.cost(fi, fj) + extra + as_dist(w1.source_len - p1[k1]) + as_dist(w2.source_len - p2[k2]);
    std::size_t i = fi;
    std::size_t j = fj;
    while (i > 0 && j > 0) {
        switch (table.step(i, j)) {
            case Step::remove: --i; break;
            case Step::insert: --j; break;
            case Step::match: {
                out.matching.emplace_back(i - 1, j - 1);
                const auto c = clamp(before1[i], before2[j]);
                i = c.a;
                j = c.b;
                break;
            }
        }
    }
    std::reverse(out.matching.begin(), out.matching.end());
    return out;
}

namespace {

void check_chain(const WindowMatching &matching, const WindowSet &w, bool first) {
    const Window *prev = nullptr;
    for (const auto &pr : matching) {
        const std::size_t idx = first ? pr.first : pr.second;
        if (idx >= w.size()) {
            throw MalformedMatching("matched window index " + std::to_string(idx) + " out of range");
        }
        const Window &cur = w.windows[idx];
        if (prev != nullptr && cur.start <= prev->end) {
            throw MalformedMatching("matched windows overlap or are out of order");
        }
        prev = &cur;
    }
}

}  // namespace

TransformationScript reconstruct_script(std::string_view s1, std::string_view s2, const WindowMatching &matching,
                                        const WindowSet &w1, const WindowSet &w2) {
    if (w1.source_len != s1.size() || w2.source_len != s2.size()) {
        throw MalformedMatching("window sets do not describe the given strings");
    }
    check_chain(matching, w1, true);
    check_chain(matching, w2, false);

    TransformationScript out;
    std::size_t pos = 0;  // cursor in the intermediate string
    std::size_t c1 = 0;   // s1 characters consumed
    std::size_t c2 = 0;   // s2 characters produced
    auto bridge = [&](std::size_t upto1, std::size_t upto2) {
        for (; c1 < upto1; ++c1) out.ops.push_back(EditOp::remove(pos));
        for (; c2 < upto2; ++c2) out.ops.push_back(EditOp::insert(pos++, s2[c2]));
    };
    for (const auto &[i, j] : matching) {
        const Window &a = w1.windows[i];
        const Window &b = w2.windows[j];
        bridge(a.start - 1, b.start - 1);
        const auto inner = edit_exact(s1.substr(a.start - 1, a.length()), s2.substr(b.start - 1, b.length()));
        for (EditOp op : inner.script.ops) {
            op.position += pos;
            out.ops.push_back(op);
        }
        pos += b.length();
        c1 = a.end;
        c2 = b.end;
    }
    bridge(s1.size(), s2.size());
    return out;
}

std::size_t useful_band(double delta, std::size_t n, std::size_t g) {
    if (g == 0) {
        throw std::invalid_argument("gap must be at least 1");
    }
    if (delta < 0.0) {
        throw std::invalid_argument("delta must be non-negative");
    }
    return static_cast<std::size_t>(std::ceil(delta * static_cast<double>(n) / static_cast<double>(g) - 1e-9));
}

std::vector<std::pair<std::size_t, std::size_t>> useful_pairs(const WindowSet &w1, const WindowSet &w2, double delta,
                                                              std::size_t g) {
    const std::size_t band = useful_band(delta, std::max(w1.source_len, w2.source_len), g);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < w1.size(); ++i) {
        const std::size_t lo = i > band ? i - band : 0;
        const std::size_t hi = std::min(w2.size(), i + band + 1);
        for (std::size_t j = lo; j < hi; ++j) out.emplace_back(i, j);
    }
    return out;
}

}  // namespace subquad
