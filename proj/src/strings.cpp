#include "subquad/strings.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

namespace subquad {

namespace {

enum class Step : std::uint8_t { match, substitute, remove, insert };

// Converts an alignment (sequence of steps from the top-left corner) into ops
// on the intermediate string.
TransformationScript steps_to_script(std::string_view s2, const std::vector<Step> &steps) {
    TransformationScript script;
    std::size_t pos = 0;
    std::size_t j = 0;
    for (const Step st : steps) {
        switch (st) {
            case Step::match:
                ++pos;
                ++j;
                break;
            case Step::substitute:
                script.ops.push_back(EditOp::substitute(pos, s2[j]));
                ++pos;
                ++j;
                break;
            case Step::remove:
                script.ops.push_back(EditOp::remove(pos));
                break;
            case Step::insert:
                script.ops.push_back(EditOp::insert(pos, s2[j]));
                ++pos;
                ++j;
                break;
        }
    }
    return script;
}

}  // namespace

ExactEdit edit_exact(std::string_view s1, std::string_view s2) {
    const std::size_t n = s1.size();
    const std::size_t m = s2.size();
    const std::size_t w = m + 1;
    std::vector<std::int32_t> d((n + 1) * w);
    for (std::size_t j = 0; j <= m; ++j) {
        d[j] = static_cast<std::int32_t>(j);
    }
    for (std::size_t i = 1; i <= n; ++i) {
        std::int32_t *row = d.data() + i * w;
        const std::int32_t *up = row - w;
        row[0] = static_cast<std::int32_t>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            const std::int32_t diag = up[j - 1] + (s1[i - 1] == s2[j - 1] ? 0 : 1);
            row[j] = std::min({diag, up[j] + 1, row[j - 1] + 1});
        }
    }

    // Traceback from the bottom-right corner, preferring diagonal moves.
    std::vector<Step> steps;
    steps.reserve(n + m);
    std::size_t i = n;
    std::size_t j = m;
    while (i > 0 || j > 0) {
        const std::int32_t cur = d[i * w + j];
        if (i > 0 && j > 0) {
            const bool eq = s1[i - 1] == s2[j - 1];
            if (d[(i - 1) * w + j - 1] + (eq ? 0 : 1) == cur) {
                steps.push_back(eq ? Step::match : Step::substitute);
                --i;
                --j;
                continue;
            }
        }
        if (i > 0 && d[(i - 1) * w + j] + 1 == cur) {
            steps.push_back(Step::remove);
            --i;
        } else {
            steps.push_back(Step::insert);
            --j;
        }
    }
    std::reverse(steps.begin(), steps.end());
    return {d[n * w + m], steps_to_script(s2, steps)};
}

std::int64_t edit_distance(std::string_view s1, std::string_view s2) {
    if (s1.size() < s2.size()) {
        std::swap(s1, s2);
    }
    const std::size_t m = s2.size();
    std::vector<std::int32_t> row(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        row[j] = static_cast<std::int32_t>(j);
    }
    for (std::size_t i = 1; i <= s1.size(); ++i) {
        std::int32_t diag = row[0];
        row[0] = static_cast<std::int32_t>(i);
        const char c = s1[i - 1];
        for (std::size_t j = 1; j <= m; ++j) {
            const std::int32_t up = row[j];
            row[j] = std::min({diag + (c == s2[j - 1] ? 0 : 1), up + 1, row[j - 1] + 1});
            diag = up;
        }
    }
    return row[m];
}

namespace {

constexpr std::int64_t kUnreached = std::numeric_limits<std::int64_t>::min() / 4;

// Wavefront e holds, for each diagonal k = j - i in [-e, e], the furthest row i
// reachable with e edits (kUnreached if none). Index k + e.
struct Wavefronts {
    std::vector<std::vector<std::int64_t>> rows;
    std::int64_t distance = -1;
};

Wavefronts furthest_reaching(std::string_view s1, std::string_view s2, std::int64_t d_max,
                             bool keep_all) {
    const auto n1 = static_cast<std::int64_t>(s1.size());
    const auto n2 = static_cast<std::int64_t>(s2.size());
    const std::int64_t target = n2 - n1;
    Wavefronts out;
    if (d_max < 0 || (target < 0 ? -target : target) > d_max) {
        return out;
    }

    auto slide = [&](std::int64_t row, std::int64_t k) {
        while (row < n1 && row + k < n2 && s1[static_cast<std::size_t>(row)] ==
                                               s2[static_cast<std::size_t>(row + k)]) {
            ++row;
        }
        return row;
    };

    std::vector<std::int64_t> prev{slide(0, 0)};
    if (keep_all) {
        out.rows.push_back(prev);
    }
    if (target == 0 && prev[0] >= n1) {
        out.distance = 0;
        return out;
    }
    for (std::int64_t e = 1; e <= d_max; ++e) {
        std::vector<std::int64_t> cur(static_cast<std::size_t>(2 * e + 1), kUnreached);
        auto at_prev = [&](std::int64_t k) {
            return (k < -(e - 1) || k > e - 1) ? kUnreached : prev[static_cast<std::size_t>(k + e - 1)];
        };
        const std::int64_t lo = std::max(-e, -n1);
        const std::int64_t hi = std::min(e, n2);
        for (std::int64_t k = lo; k <= hi; ++k) {
            std::int64_t row = kUnreached;
            if (const auto r = at_prev(k); r != kUnreached) row = std::max(row, r + 1);      // substitute
            if (const auto r = at_prev(k - 1); r != kUnreached) row = std::max(row, r);      // insert
            if (const auto r = at_prev(k + 1); r != kUnreached) row = std::max(row, r + 1);  // delete
            if (row == kUnreached) {
                continue;
            }
            row = std::min({row, n1, n2 - k});
            if (row < std::max<std::int64_t>(0, -k)) {
                continue;
            }
            cur[static_cast<std::size_t>(k + e)] = slide(row, k);
        }
        if (keep_all) {
            out.rows.push_back(cur);
        }
        if (target >= -e && target <= e && cur[static_cast<std::size_t>(target + e)] >= n1) {
            out.distance = e;
            return out;
        }
        prev = std::move(cur);
    }
    return out;
}

}  // namespace

std::optional<std::int64_t> edit_bounded(std::string_view s1, std::string_view s2, std::int64_t d_max) {
    const auto w = furthest_reaching(s1, s2, d_max, false);
    if (w.distance < 0) {
        return std::nullopt;
    }
    return w.distance;
}

std::optional<ExactEdit> edit_bounded_script(std::string_view s1, std::string_view s2,
                                             std::int64_t d_max) {
    const auto w = furthest_reaching(s1, s2, d_max, true);
    if (w.distance < 0) {
        return std::nullopt;
    }
    const auto n1 = static_cast<std::int64_t>(s1.size());
    const auto n2 = static_cast<std::int64_t>(s2.size());

    auto get = [&](std::int64_t e, std::int64_t k) {
        if (e < 0 || k < -e || k > e) return kUnreached;
        return w.rows[static_cast<std::size_t>(e)][static_cast<std::size_t>(k + e)];
    };

    // D is nondecreasing along a diagonal, so every row between the diagonal's
    // first cell and its furthest point at level e - 1 costs at most e - 1.
    auto reachable = [&](std::int64_t e, std::int64_t k, std::int64_t row) {
        return row >= std::max<std::int64_t>(0, -k) && row <= get(e, k);
    };

    std::vector<Step> steps;
    std::int64_t k = n2 - n1;
    std::int64_t row = n1;
    std::int64_t e = w.distance;
    while (row > 0 || row + k > 0) {
        if (e > 0 && reachable(e - 1, k, row - 1)) {
            steps.push_back(Step::substitute);
            --row;
            --e;
        } else if (e > 0 && reachable(e - 1, k - 1, row)) {
            steps.push_back(Step::insert);
            --k;
            --e;
        } else if (e > 0 && reachable(e - 1, k + 1, row - 1)) {
            steps.push_back(Step::remove);
            --row;
            ++k;
            --e;
        } else {
            steps.push_back(Step::match);
            --row;
        }
    }
    std::reverse(steps.begin(), steps.end());
    return ExactEdit{w.distance, steps_to_script(s2, steps)};
}

std::string apply_script(std::string_view s, const TransformationScript &script) {
    std::string out(s);
    for (const EditOp &op : script.ops) {
        switch (op.kind) {
            case EditKind::insert:
                if (op.position > out.size()) {
                    throw MalformedScript("insert position " + std::to_string(op.position) + " beyond length " +
                                          std::to_string(out.size()));
                }
                out.insert(out.begin() + static_cast<std::ptrdiff_t>(op.position), op.symbol);
                break;
            case EditKind::remove:
                if (op.position >= out.size()) {
                    throw MalformedScript("delete position " + std::to_string(op.position) + " beyond length " +
                                          std::to_string(out.size()));
                }
                out.erase(out.begin() + static_cast<std::ptrdiff_t>(op.position));
                break;
            case EditKind::substitute:
                if (op.position >= out.size()) {
                    throw MalformedScript("substitute position " + std::to_string(op.position) + " beyond length " +
                                          std::to_string(out.size()));
                }
                out[op.position] = op.symbol;
                break;
        }
    }
    return out;
}

bool validate_script(std::string_view s1, std::string_view s2, const TransformationScript &script) {
    try {
        return apply_script(s1, script) == s2;
    } catch (const MalformedScript &) {
        return false;
    }
}

TransformationScript trivial_script(std::string_view s1, std::string_view s2) {
    TransformationScript script;
    script.ops.reserve(s1.size() + s2.size());
    for (std::size_t i = 0; i < s1.size(); ++i) {
        script.ops.push_back(EditOp::remove(0));
    }
    for (std::size_t j = 0; j < s2.size(); ++j) {
        script.ops.push_back(EditOp::insert(j, s2[j]));
    }
    return script;
}

}  // namespace subquad
