#include "subquad/band_matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace subquad {

BandMatrix::BandMatrix(std::size_t a, std::size_t b, std::size_t d)
    : a_{a}, b_{b}, d_{d}, cells_((2 * d + 1) * (2 * d + 1), kInf) {
    if (b < a) {
        throw std::invalid_argument("band anchors must satisfy a <= b");
    }
}

BandMatrix BandMatrix::identity(std::size_t a, std::size_t d) {
    BandMatrix m(a, a, d);
    const auto dd = static_cast<std::int64_t>(d);
    for (std::int64_t p = -dd; p <= dd; ++p) m.set(p, p, 0);
    return m;
}

std::uint64_t band_direct_row(std::string_view block, std::size_t a, const S2Slice &s2, std::size_t d,
                              std::int64_t p, Distance *out) {
    const std::size_t w = 2 * d + 1;
    std::fill(out, out + w, BandMatrix::kInf);
    const std::size_t b = a + block.size();
    const auto start = static_cast<std::int64_t>(a) + p;
    if (start < 0 || start > static_cast<std::int64_t>(s2.total)) {
        return 0;
    }
    const auto s = static_cast<std::size_t>(start);
    const std::size_t stop = std::max(s, std::min(s2.total, b + d));
    if (s < s2.at || stop > s2.at + s2.text.size()) {
        throw std::out_of_range("band_direct_row: s2 slice does not cover the row");
    }
    const std::string_view target = s2.text.substr(s - s2.at, stop - s);

    // row[j] = edit(block[0, i), target[0, j)).
    std::vector<Distance> row(target.size() + 1);
    for (std::size_t j = 0; j <= target.size(); ++j) row[j] = static_cast<Distance>(j);
    for (std::size_t i = 1; i <= block.size(); ++i) {
        Distance diag = row[0];
        row[0] = static_cast<Distance>(i);
        for (std::size_t j = 1; j <= target.size(); ++j) {
            const Distance up = row[j];
            const Distance sub = diag + (block[i - 1] == target[j - 1] ? 0 : 1);
            row[j] = std::min({sub, up + 1, row[j - 1] + 1});
            diag = up;
        }
    }
    const auto dd = static_cast<std::int64_t>(d);
    for (std::int64_t q = -dd; q <= dd; ++q) {
        const std::int64_t end = static_cast<std::int64_t>(b) + q;
        const std::int64_t len = end - start;
        if (len < 0 || end > static_cast<std::int64_t>(s2.total)) continue;
        out[static_cast<std::size_t>(q + dd)] = row[static_cast<std::size_t>(len)];
    }
    return static_cast<std::uint64_t>(block.size() * target.size());
}

BandMatrix band_direct(std::string_view s1, std::string_view s2, std::size_t a, std::size_t b, std::size_t d) {
    if (b < a || b > s1.size()) {
        throw std::invalid_argument("band anchors outside s1");
    }
    BandMatrix m(a, b, d);
    const auto dd = static_cast<std::int64_t>(d);
    for (std::int64_t p = -dd; p <= dd; ++p) {
        band_direct_row(s1.substr(a, b - a), a, {s2, 0, s2.size()}, d, p,
                        m.cells().data() + static_cast<std::size_t>(p + dd) * m.width());
    }
    return m;
}

void min_plus_accumulate(const Distance *a, const Distance *b, Distance *c, std::size_t m, std::size_t k,
                         std::size_t n) noexcept {
    for (std::size_t i = 0; i < m; ++i) {
        Distance *crow = c + i * n;
        for (std::size_t r = 0; r < k; ++r) {
            const Distance x = a[i * k + r];
            if (x >= BandMatrix::kInf) continue;
            const Distance *brow = b + r * n;
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] = std::min(crow[j], std::min(x + brow[j], BandMatrix::kInf));
            }
        }
    }
}

namespace {

BandMatrix product_shell(const BandMatrix &lhs, const BandMatrix &rhs) {
    if (lhs.b() != rhs.a()) {
        throw std::invalid_argument("band_min_plus: left end anchor differs from right start anchor");
    }
    if (lhs.half_width() != rhs.half_width()) {
        throw std::invalid_argument("band_min_plus: half widths differ");
    }
    return BandMatrix(lhs.a(), rhs.b(), lhs.half_width());
}

}  // namespace

BandMatrix band_min_plus_serial(const BandMatrix &lhs, const BandMatrix &rhs) {
    BandMatrix out = product_shell(lhs, rhs);
    const std::size_t w = out.width();
    min_plus_accumulate(lhs.cells().data(), rhs.cells().data(), out.cells().data(), w, w, w);
    return out;
}

BandMatrix band_min_plus(const BandMatrix &lhs, const BandMatrix &rhs) {
    BandMatrix out = product_shell(lhs, rhs);
    const std::size_t w = out.width();
    const Distance *a = lhs.cells().data();
    const Distance *b = rhs.cells().data();
    Distance *c = out.cells().data();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < w; ++i) {
        min_plus_accumulate(a + i * w, b, c + i * w, 1, w, w);
    }
    return out;
}

}  // namespace subquad
