#pragma once

// Offset-indexed sub-edit-distance matrices and their (min,+) product.
//
// For anchors a <= b in s1 (0-based, b exclusive) and half-width d, entry
// (p, q) with p, q in [-d, d] is edit(s1[a, b), s2[a+p, b+q)); coordinates
// that leave s2, or give a negative-length substring, hold kInf.

#include "subquad/oracle.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace subquad {

class BandMatrix {
  public:
    static constexpr Distance kInf = std::numeric_limits<Distance>::max() / 4;

    BandMatrix() = default;
    BandMatrix(std::size_t a, std::size_t b, std::size_t d);

    /// (min,+) identity over [a, a): 0 on the diagonal, kInf elsewhere.
    static BandMatrix identity(std::size_t a, std::size_t d);

    [[nodiscard]] std::size_t a() const noexcept { return a_; }
    [[nodiscard]] std::size_t b() const noexcept { return b_; }
    [[nodiscard]] std::size_t half_width() const noexcept { return d_; }
    [[nodiscard]] std::size_t width() const noexcept { return 2 * d_ + 1; }

    /// Offsets in [-d, d].
    [[nodiscard]] Distance at(std::int64_t p, std::int64_t q) const noexcept { return cells_[index(p, q)]; }
    void set(std::int64_t p, std::int64_t q, Distance v) noexcept { cells_[index(p, q)] = v; }

    /// Row-major storage, row r = offset r - d.
    [[nodiscard]] std::vector<Distance> &cells() noexcept { return cells_; }
    [[nodiscard]] const std::vector<Distance> &cells() const noexcept { return cells_; }

    friend bool operator==(const BandMatrix &, const BandMatrix &) = default;

  private:
    [[nodiscard]] std::size_t index(std::int64_t p, std::int64_t q) const noexcept {
        const auto d = static_cast<std::int64_t>(d_);
        return static_cast<std::size_t>((p + d) * (2 * d + 1) + (q + d));
    }

    std::size_t a_ = 0;
    std::size_t b_ = 0;
    std::size_t d_ = 0;
    std::vector<Distance> cells_;
};

/// Part of s2 held locally: text = s2[at, at + text.size()), total = |s2|.
struct S2Slice {
    std::string_view text;
    std::size_t at = 0;
    std::size_t total = 0;
};

/// One row of the direct construction for block = s1[a, a + |block|):
/// out[q + d] for q in [-d, d], from a single DP of the block against
/// s2[a+p, min(|s2|, b+d)). The slice must cover that range (throws
/// std::out_of_range otherwise). Returns the DP cell count.
std::uint64_t band_direct_row(std::string_view block, std::size_t a, const S2Slice &s2, std::size_t d,
                              std::int64_t p, Distance *out);

/// Every entry by direct DP, one row per offset p.
BandMatrix band_direct(std::string_view s1, std::string_view s2, std::size_t a, std::size_t b, std::size_t d);

/// C = min(C, A * B) for row-major blocks A (m x k), B (k x n), C (m x n);
/// kInf absorbs. Serial.
void min_plus_accumulate(const Distance *a, const Distance *b, Distance *c, std::size_t m, std::size_t k,
                         std::size_t n) noexcept;

/// C(p, q) = min_r A(p, r) + B(r, q), rows split across OpenMP threads.
/// Throws std::invalid_argument unless A.b == B.a and widths agree.
BandMatrix band_min_plus(const BandMatrix &lhs, const BandMatrix &rhs);

/// Single-threaded reference for band_min_plus.
BandMatrix band_min_plus_serial(const BandMatrix &lhs, const BandMatrix &rhs);

}  // namespace subquad
