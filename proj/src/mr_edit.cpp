#include "subquad/mr_edit.hpp"

#include "subquad/band_matrix.hpp"
#include "subquad/strings.hpp"
#include "subquad/windows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace subquad {

namespace {

constexpr std::uint32_t kInf32 = std::numeric_limits<std::uint32_t>::max();

std::size_t ceil_pow(std::size_t n, double e) {
    const double v = std::ceil(std::pow(static_cast<double>(n), e) - 1e-9);
    return std::max<std::size_t>(1, static_cast<std::size_t>(v));
}

double alpha_of(double delta, std::size_t n) {
    if (n <= 1) return 0.0;
    return -std::log(delta) / std::log(static_cast<double>(n));
}

void check_delta(double delta) {
    if (!(delta > 0.0) || delta > 1.0) {
        throw std::invalid_argument("delta must lie in (0, 1]");
    }
}

// Distances travel as 32-bit words; kInf maps to all ones.
std::string pack_cells(const Distance *cells, std::size_t count) {
    std::string out(count * 4, '\0');
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint32_t v = cells[i] >= BandMatrix::kInf ? kInf32 : static_cast<std::uint32_t>(cells[i]);
        for (int b = 0; b < 4; ++b) out[i * 4 + static_cast<std::size_t>(b)] = static_cast<char>((v >> (8 * b)) & 0xffU);
    }
    return out;
}

std::vector<Distance> unpack_cells(std::string_view in) {
    std::vector<Distance> out(in.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[i * 4 + static_cast<std::size_t>(b)]))
                 << (8 * b);
        }
        out[i] = v == kInf32 ? BandMatrix::kInf : static_cast<Distance>(v);
    }
    return out;
}

// Input records: both strings cut into chunks, one record per chunk.
struct Chunk {
    std::uint64_t which = 0;  // 1 or 2
    std::uint64_t pos = 0;
    std::string_view text;
};

std::vector<KeyValue> chunk_input(std::string_view s1, std::string_view s2, std::size_t chunk) {
    std::vector<KeyValue> out;
    const std::string_view sides[2] = {s1, s2};
    for (std::uint64_t which = 1; which <= 2; ++which) {
        const std::string_view s = sides[which - 1];
        for (std::size_t pos = 0; pos < s.size(); pos += chunk) {
            out.push_back({ByteWriter().str("in").u64(which).u64(pos).take(),
                           ByteWriter().u64(which).u64(pos).str(s.substr(pos, chunk)).take()});
        }
    }
    return out;
}

Chunk read_chunk(std::string_view value) {
    ByteReader r(value);
    Chunk c;
    c.which = r.u64();
    c.pos = r.u64();
    c.text = r.str();
    return c;
}

bool overlaps(const Chunk &c, std::size_t lo, std::size_t hi) {
    return lo < hi && c.pos < hi && c.pos + c.text.size() > lo;
}

// s[lo, hi) of one side rebuilt from the chunks a reducer received.
std::string assemble(const std::vector<Chunk> &chunks, std::uint64_t which, std::size_t lo, std::size_t hi) {
    std::string out(hi - lo, '\0');
    std::size_t covered = 0;
    for (const Chunk &c : chunks) {
        if (c.which != which || !overlaps(c, lo, hi)) continue;
        const std::size_t from = std::max<std::size_t>(lo, c.pos);
        const std::size_t to = std::min<std::size_t>(hi, c.pos + c.text.size());
        std::copy_n(c.text.data() + (from - c.pos), to - from, out.data() + (from - lo));
        covered += to - from;
    }
    if (covered != hi - lo) {
        throw std::logic_error("reducer is missing input characters");
    }
    return out;
}

std::vector<Chunk> read_chunks(const std::vector<std::string> &values) {
    std::vector<Chunk> out;
    out.reserve(values.size());
    for (const auto &v : values) out.push_back(read_chunk(v));
    return out;
}

std::uint64_t sum_work(const std::vector<RoundTrace> &traces) {
    std::uint64_t w = 0;
    for (const auto &t : traces) w += t.total_work();
    return w;
}

std::uint64_t max_mem(const std::vector<RoundTrace> &traces) {
    std::uint64_t m = 0;
    for (const auto &t : traces) m = std::max(m, t.max_machine_mem());
    return m;
}

// ---------------------------------------------------------------------------
// Small delta: (min,+) chain of block band matrices.

// Rectangle [r0, r1) x [c0, c1) of band matrix idx at a doubling level.
struct Piece {
    std::uint64_t level = 0;
    std::uint64_t idx = 0;
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    std::uint64_t r0 = 0, r1 = 0, c0 = 0, c1 = 0;
    std::vector<Distance> cells;

    [[nodiscard]] std::size_t cols() const noexcept { return c1 - c0; }
    [[nodiscard]] Distance at(std::size_t r, std::size_t c) const { return cells[(r - r0) * cols() + (c - c0)]; }
};

std::string encode_piece(const Piece &p) {
    return ByteWriter()
        .u64(p.level)
        .u64(p.idx)
        .u64(p.a)
        .u64(p.b)
        .u64(p.r0)
        .u64(p.r1)
        .u64(p.c0)
        .u64(p.c1)
        .str(pack_cells(p.cells.data(), p.cells.size()))
        .take();
}

Piece decode_piece(std::string_view v) {
    ByteReader r(v);
    Piece p;
    p.level = r.u64();
    p.idx = r.u64();
    p.a = r.u64();
    p.b = r.u64();
    p.r0 = r.u64();
    p.r1 = r.u64();
    p.c0 = r.u64();
    p.c1 = r.u64();
    p.cells = unpack_cells(r.str());
    if (p.cells.size() != (p.r1 - p.r0) * (p.c1 - p.c0)) {
        throw std::logic_error("piece size does not match its rectangle");
    }
    return p;
}

// Sub-rectangle of a piece.
Piece crop(const Piece &p, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
    Piece out{p.level, p.idx, p.a, p.b, r0, r1, c0, c1, {}};
    out.cells.reserve((r1 - r0) * (c1 - c0));
    for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) out.cells.push_back(p.at(r, c));
    }
    return out;
}

// Fill dense block [r0, r1) x [c0, c1) from pieces; throws unless every cell
// is covered exactly once.
std::vector<Distance> dense_tile(const std::vector<const Piece *> &pieces, std::size_t r0, std::size_t r1,
                                 std::size_t c0, std::size_t c1) {
    const std::size_t cols = c1 - c0;
    std::vector<Distance> out((r1 - r0) * cols, BandMatrix::kInf);
    std::size_t filled = 0;
    for (const Piece *p : pieces) {
        const std::size_t ra = std::max<std::size_t>(r0, p->r0), rb = std::min<std::size_t>(r1, p->r1);
        const std::size_t ca = std::max<std::size_t>(c0, p->c0), cb = std::min<std::size_t>(c1, p->c1);
        for (std::size_t r = ra; r < rb; ++r) {
            for (std::size_t c = ca; c < cb; ++c) out[(r - r0) * cols + (c - c0)] = p->at(r, c);
        }
        if (ra < rb && ca < cb) filled += (rb - ra) * (cb - ca);
    }
    if (filled != out.size()) {
        throw std::logic_error("tile is not covered by its pieces");
    }
    return out;
}

struct Span {
    std::size_t lo = 0;
    std::size_t hi = 0;
};

Span split(std::size_t total, std::size_t parts, std::size_t k) { return {k * total / parts, (k + 1) * total / parts}; }

Span tile_span(std::size_t w, std::size_t ts, std::size_t k) { return {k * ts, std::min(w, (k + 1) * ts)}; }

}  // namespace

double critical_alpha(double x) { return x > 13.0 / 20.0 ? 2.0 * (4.0 - x) / 21.0 : 3.0 * (x + 1.0) / 16.0; }

std::uint64_t MrOutcome::max_machine_mem() const noexcept { return max_mem(traces); }
std::uint64_t MrOutcome::total_work() const noexcept { return sum_work(traces); }
std::uint64_t MrEditResult::max_machine_mem() const noexcept { return max_mem(traces); }

SmallDeltaPlan plan_small_delta(std::size_t n1, std::size_t n2, double delta, const ClusterConfig &cfg) {
    check_delta(delta);
    const std::size_t n = std::max(n1, n2);
    SmallDeltaPlan plan;
    plan.alpha = alpha_of(delta, n);
    plan.y = std::clamp((6.0 * plan.alpha + 2.0 * cfg.x - 3.0) / 5.0, 0.0, 1.0);
    plan.t = std::max(0.0, cfg.x - plan.y);
    plan.band = static_cast<std::size_t>(std::ceil(delta * static_cast<double>(n) - 1e-9));
    plan.blocks = std::min(ceil_pow(n, plan.y), std::max<std::size_t>(1, n1));
    plan.parts = std::min(ceil_pow(n, plan.t), 2 * plan.band + 1);
    plan.chunk = ceil_pow(n, 1.0 - cfg.x);
    return plan;
}

MrOutcome mr_edit_small_delta(std::string_view s1, std::string_view s2, double delta, const ClusterConfig &cfg) {
    const SmallDeltaPlan plan = plan_small_delta(s1.size(), s2.size(), delta, cfg);
    const std::size_t n1 = s1.size();
    const std::size_t n2 = s2.size();
    const std::size_t d = plan.band;
    const std::size_t w = 2 * d + 1;
    const auto diff = static_cast<std::int64_t>(n2) - static_cast<std::int64_t>(n1);

    MrOutcome out;
    if (static_cast<std::size_t>(std::llabs(diff)) > d) {
        return out;
    }
    if (n1 == 0) {
        out.cost = static_cast<Distance>(n2);
        return out;
    }

    const std::size_t blocks = plan.blocks;
    const std::size_t rows_per_part = (w + plan.parts - 1) / plan.parts;
    const std::size_t parts = (w + rows_per_part - 1) / rows_per_part;
    const auto block = [&](std::size_t k) { return split(n1, blocks, k); };
    const auto rows = [&](std::size_t q) { return tile_span(w, rows_per_part, q); };
    // s2 range a reducer needs for rows of part q in block k.
    const auto s2_need = [&](std::size_t k, std::size_t q) {
        const Span bk = block(k);
        const auto lo = std::clamp<std::int64_t>(static_cast<std::int64_t>(bk.lo + rows(q).lo) - static_cast<std::int64_t>(d),
                                                 0, static_cast<std::int64_t>(n2));
        const auto l = static_cast<std::size_t>(lo);
        return Span{l, std::max(l, std::min(n2, bk.hi + d))};
    };
    const auto build_key = [](std::size_t k, std::size_t q) { return ByteWriter().str("build").u64(k).u64(q).take(); };

    MapReduceJob job(cfg);

    const Mapper build_map = [&](const KeyValue &kv) {
        const Chunk c = read_chunk(kv.value);
        std::vector<KeyValue> emitted;
        for (std::size_t k = 0; k < blocks; ++k) {
            for (std::size_t q = 0; q < parts; ++q) {
                const Span need = c.which == 1 ? block(k) : s2_need(k, q);
                if (overlaps(c, need.lo, need.hi)) emitted.push_back({build_key(k, q), kv.value});
            }
        }
        return emitted;
    };
    const Reducer build_reduce = [&](const std::string &key, const std::vector<std::string> &values) {
        ByteReader kr(key);
        kr.str();
        const std::size_t k = kr.u64();
        const std::size_t q = kr.u64();
        const auto chunks = read_chunks(values);
        const Span bk = block(k);
        const Span need = s2_need(k, q);
        const std::string text1 = assemble(chunks, 1, bk.lo, bk.hi);
        const std::string text2 = assemble(chunks, 2, need.lo, need.hi);
        const Span rr = rows(q);
        Piece p{0, k, bk.lo, bk.hi, rr.lo, rr.hi, 0, w, std::vector<Distance>((rr.hi - rr.lo) * w)};
        ReduceResult res;
        for (std::size_t r = rr.lo; r < rr.hi; ++r) {
            res.work_units += band_direct_row(text1, bk.lo, {text2, need.lo, n2}, d,
                                              static_cast<std::int64_t>(r) - static_cast<std::int64_t>(d),
                                              p.cells.data() + (r - rr.lo) * w);
        }
        res.scratch_bytes = (need.hi - need.lo + 1) * sizeof(Distance) + p.cells.size() * sizeof(Distance);
        res.emitted.push_back({key, encode_piece(p)});
        return res;
    };
    std::vector<KeyValue> records = job.run(build_map, build_reduce, chunk_input(s1, s2, plan.chunk));

    std::size_t count = blocks;
    std::uint64_t level = 0;
    while (count > 1) {
        const std::size_t pairs = count / 2;
        const bool odd = count % 2 == 1;
        const double share = static_cast<double>(cfg.machines) / static_cast<double>(pairs);
        const std::size_t t_req =
            std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(std::cbrt(share) - 1e-9)), 1, w);
        const std::size_t ts = (w + t_req - 1) / t_req;
        const std::size_t tiles = (w + ts - 1) / ts;
        const auto mul_key = [](std::size_t p, std::size_t i, std::size_t j, std::size_t k) {
            return ByteWriter().str("mul").u64(p).u64(i).u64(j).u64(k).take();
        };
        const auto carry_key = [](std::size_t p) { return ByteWriter().str("carry").u64(p).take(); };

        // Round A: every tile product A(I,K) * B(K,J) on its own key.
        const Mapper map_a = [&](const KeyValue &kv) {
            const Piece piece = decode_piece(kv.value);
            std::vector<KeyValue> emitted;
            if (odd && piece.idx == count - 1) {
                emitted.push_back({carry_key(piece.idx / 2), kv.value});
                return emitted;
            }
            const std::size_t p = piece.idx / 2;
            const bool left = piece.idx % 2 == 0;
            for (std::size_t tr = piece.r0 / ts; tr * ts < piece.r1; ++tr) {
                for (std::size_t tc = piece.c0 / ts; tc * ts < piece.c1; ++tc) {
                    const Span rs = tile_span(w, ts, tr);
                    const Span cs = tile_span(w, ts, tc);
                    const std::string part =
                        encode_piece(crop(piece, std::max<std::size_t>(rs.lo, piece.r0), std::min<std::size_t>(rs.hi, piece.r1),
                                          std::max<std::size_t>(cs.lo, piece.c0), std::min<std::size_t>(cs.hi, piece.c1)));
                    for (std::size_t other = 0; other < tiles; ++other) {
                        emitted.push_back({left ? mul_key(p, tr, other, tc) : mul_key(p, other, tc, tr), part});
                    }
                }
            }
            return emitted;
        };
        const Reducer reduce_a = [&](const std::string &key, const std::vector<std::string> &values) {
            ReduceResult res;
            ByteReader kr(key);
            const std::string_view tag = kr.str();
            if (tag == "carry") {
                const std::size_t p = kr.u64();
                for (const auto &v : values) {
                    Piece piece = decode_piece(v);
                    piece.level = level + 1;
                    piece.idx = p;
                    res.emitted.push_back({key, encode_piece(piece)});
                }
                return res;
            }
            const std::size_t p = kr.u64();
            const std::size_t ti = kr.u64();
            const std::size_t tj = kr.u64();
            const std::size_t tk = kr.u64();
            std::vector<Piece> decoded;
            decoded.reserve(values.size());
            for (const auto &v : values) decoded.push_back(decode_piece(v));
            std::vector<const Piece *> lhs, rhs;
            for (const Piece &piece : decoded) (piece.idx == 2 * p ? lhs : rhs).push_back(&piece);
            if (lhs.empty() || rhs.empty() || lhs.front()->b != rhs.front()->a) {
                throw std::logic_error("tile product needs adjacent left and right matrices");
            }
            const Span is = tile_span(w, ts, ti), js = tile_span(w, ts, tj), ks = tile_span(w, ts, tk);
            const auto a = dense_tile(lhs, is.lo, is.hi, ks.lo, ks.hi);
            const auto b = dense_tile(rhs, ks.lo, ks.hi, js.lo, js.hi);
            Piece c{level + 1, p, lhs.front()->a, rhs.front()->b, is.lo, is.hi, js.lo, js.hi,
                    std::vector<Distance>((is.hi - is.lo) * (js.hi - js.lo), BandMatrix::kInf)};
            const std::size_t m = is.hi - is.lo, kk = ks.hi - ks.lo, nn = js.hi - js.lo;
            min_plus_accumulate(a.data(), b.data(), c.cells.data(), m, kk, nn);
            res.work_units = m * kk * nn;
            res.scratch_bytes = (a.size() + b.size() + c.cells.size()) * sizeof(Distance);
            res.emitted.push_back({key, encode_piece(c)});
            return res;
        };
        records = job.run(map_a, reduce_a, records);

        // Round B: entrywise min of the partial products of each output tile.
        const Mapper map_b = [](const KeyValue &kv) {
            const Piece piece = decode_piece(kv.value);
            return std::vector<KeyValue>{{ByteWriter().str("min").u64(piece.idx).u64(piece.r0).u64(piece.c0).take(), kv.value}};
        };
        const Reducer reduce_b = [](const std::string &key, const std::vector<std::string> &values) {
            ReduceResult res;
            Piece acc = decode_piece(values.front());
            for (std::size_t v = 1; v < values.size(); ++v) {
                const Piece next = decode_piece(values[v]);
                if (next.r0 != acc.r0 || next.r1 != acc.r1 || next.c0 != acc.c0 || next.c1 != acc.c1) {
                    throw std::logic_error("partial products disagree on their tile");
                }
                for (std::size_t i = 0; i < acc.cells.size(); ++i) acc.cells[i] = std::min(acc.cells[i], next.cells[i]);
            }
            res.work_units = acc.cells.size() * values.size();
            res.scratch_bytes = acc.cells.size() * sizeof(Distance) * 2;
            res.emitted.push_back({key, encode_piece(acc)});
            return res;
        };
        records = job.run(map_b, reduce_b, records);
        count = (count + 1) / 2;
        ++level;
    }

    const std::size_t row = d;
    const auto col = static_cast<std::size_t>(static_cast<std::int64_t>(d) + diff);
    for (const auto &kv : records) {
        const Piece piece = decode_piece(kv.value);
        if (piece.r0 <= row && row < piece.r1 && piece.c0 <= col && col < piece.c1) {
            const Distance v = piece.at(row, col);
            if (v < BandMatrix::kInf) out.cost = v;
        }
    }
    out.traces = job.traces();
    return out;
}

// ---------------------------------------------------------------------------
// Large delta: useful window pairs, then the banded window DP.

LargeDeltaPlan plan_large_delta(std::size_t n1, std::size_t n2, double delta, double eps, const ClusterConfig &cfg) {
    check_delta(delta);
    if (!(eps > 0.0)) {
        throw std::invalid_argument("eps must be positive");
    }
    const std::size_t n = std::max(n1, n2);
    LargeDeltaPlan plan;
    plan.alpha = alpha_of(delta, n);
    plan.beta = std::min(1.0, plan.alpha + cfg.mem_slack / 2.0);
    plan.l = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), 1.0 - plan.beta) + 1e-9)));
    plan.gamma = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(1.0 / (delta * eps) - 1e-9)));
    plan.g = std::max<std::size_t>(1, plan.l / plan.gamma);
    plan.l -= plan.l % plan.g;  // windows tile exactly when g divides l
    plan.band = useful_band(delta, n, plan.g);
    plan.chunk = ceil_pow(n, 1.0 - cfg.x);
    return plan;
}

MrOutcome mr_edit_large_delta(std::string_view s1, std::string_view s2, double delta, double eps,
                              const ClusterConfig &cfg) {
    const LargeDeltaPlan plan = plan_large_delta(s1.size(), s2.size(), delta, eps, cfg);
    const std::size_t n1 = s1.size();
    const std::size_t n2 = s2.size();
    MrOutcome out;
    if (n1 == 0 || n2 == 0) {
        out.cost = static_cast<Distance>(std::max(n1, n2));
        return out;
    }
    const WindowSet w1 = build_windows_covering(n1, plan.l, plan.g);
    const WindowSet w2 = build_windows_covering(n2, plan.l, plan.g);
    const std::size_t k1 = w1.size();
    const std::size_t k2 = w2.size();
    const std::size_t band = plan.band;
    const std::size_t groups = std::min(cfg.machines, k1);
    const auto group = [&](std::size_t q) { return split(k1, groups, q); };
    const auto partners = [&](std::size_t i) { return Span{i > band ? i - band : 0, std::min(k2, i + band + 1)}; };
    // Character ranges (0-based, half-open) a group needs from each side.
    const auto need1 = [&](std::size_t q) {
        const Span gi = group(q);
        return Span{w1.windows[gi.lo].start - 1, w1.windows[gi.hi - 1].end};
    };
    const auto need2 = [&](std::size_t q) {
        const Span gi = group(q);
        const Span lo = partners(gi.lo), hi = partners(gi.hi - 1);
        if (lo.lo >= hi.hi) return Span{0, 0};
        return Span{w2.windows[lo.lo].start - 1, w2.windows[hi.hi - 1].end};
    };
    const auto pairs_key = [](std::size_t q) { return ByteWriter().str("pairs").u64(q).take(); };

    MapReduceJob job(cfg);

    const Mapper map_pairs = [&](const KeyValue &kv) {
        const Chunk c = read_chunk(kv.value);
        std::vector<KeyValue> emitted;
        for (std::size_t q = 0; q < groups; ++q) {
            const Span need = c.which == 1 ? need1(q) : need2(q);
            if (overlaps(c, need.lo, need.hi)) emitted.push_back({pairs_key(q), kv.value});
        }
        return emitted;
    };
    const Reducer reduce_pairs = [&](const std::string &key, const std::vector<std::string> &values) {
        ByteReader kr(key);
        kr.str();
        const std::size_t q = kr.u64();
        const auto chunks = read_chunks(values);
        const Span r1 = need1(q), r2 = need2(q);
        const std::string text1 = assemble(chunks, 1, r1.lo, r1.hi);
        const std::string text2 = assemble(chunks, 2, r2.lo, r2.hi);
        const Span gi = group(q);
        ReduceResult res;
        ByteWriter value;
        value.u64(gi.lo).u64(gi.hi);
        std::vector<Distance> row;
        for (std::size_t i = gi.lo; i < gi.hi; ++i) {
            const Window &a = w1.windows[i];
            const std::string_view sub1 = std::string_view(text1).substr(a.start - 1 - r1.lo, a.length());
            const Span js = partners(i);
            row.clear();
            for (std::size_t j = js.lo; j < js.hi; ++j) {
                const Window &b = w2.windows[j];
                row.push_back(edit_distance(sub1, std::string_view(text2).substr(b.start - 1 - r2.lo, b.length())));
                res.work_units += a.length() * b.length();
            }
            value.u64(js.lo).str(pack_cells(row.data(), row.size()));
        }
        res.scratch_bytes = 2 * (plan.l + 1) * sizeof(Distance);  // two DP rows
        res.emitted.push_back({key, value.take()});
        return res;
    };
    const std::vector<KeyValue> distances = job.run(map_pairs, reduce_pairs, chunk_input(s1, s2, plan.chunk));

    const auto read_group = [&](std::string_view v, auto &&visit) {
        ByteReader r(v);
        const std::size_t lo = r.u64();
        const std::size_t hi = r.u64();
        for (std::size_t i = lo; i < hi; ++i) {
            const std::size_t j0 = r.u64();
            const auto cells = unpack_cells(r.str());
            for (std::size_t t = 0; t < cells.size(); ++t) visit(i, j0 + t, cells[t]);
        }
    };
    for (const auto &kv : distances) {
        read_group(kv.value, [&](std::size_t i, std::size_t j, Distance) {
            ++out.evaluated_pairs;
            out.max_pair_offset = std::max(out.max_pair_offset, i > j ? i - j : j - i);
        });
    }

    const Mapper map_dp = [](const KeyValue &kv) { return std::vector<KeyValue>{{"dp", kv.value}}; };
    const Reducer reduce_dp = [&](const std::string &key, const std::vector<std::string> &values) {
        const std::size_t width = std::min(2 * band + 1, k2 + band + 1);
        std::vector<Distance> table(k1 * width, -1);
        std::uint64_t stored = 0;
        for (const auto &v : values) {
            read_group(v, [&](std::size_t i, std::size_t j, Distance dist) {
                table[i * width + (j + band - i)] = dist;
                ++stored;
            });
        }
        const WindowDistanceSource src{[&](std::size_t i, std::size_t j) -> Distance {
                                           const std::size_t off = i > j ? i - j : j - i;
                                           if (off <= band) {
                                               const Distance v = table[i * width + (j + band - i)];
                                               if (v >= 0) return v;
                                           }
                                           return static_cast<Distance>(w1.windows[i].length() + w2.windows[j].length());
                                       },
                                       1.0};
        const WindowDpResult dp = window_dp(w1, w2, src, band);
        ReduceResult res;
        res.work_units = stored;
        // lookup table plus the DP's banded cost and step tables
        res.scratch_bytes = table.size() * sizeof(Distance) + (k1 + 1) * std::min(2 * band + 1, k2 + 1) * (sizeof(Distance) + 1);
        res.emitted.push_back({key, ByteWriter().i64(dp.cost).take()});
        return res;
    };
    const std::vector<KeyValue> final_records = job.run(map_dp, reduce_dp, distances);
    ByteReader r(final_records.at(0).value);
    out.cost = r.i64();
    out.traces = job.traces();
    return out;
}

// ---------------------------------------------------------------------------
// Driver.

namespace {

// delta = 0: both strings cut the same way, one key per chunk position.
MrOutcome equality_round(std::string_view s1, std::string_view s2, const ClusterConfig &cfg, std::size_t chunk) {
    MrOutcome out;
    if (s1.size() != s2.size()) {
        return out;
    }
    MapReduceJob job(cfg);
    const Mapper map = [](const KeyValue &kv) {
        const Chunk c = read_chunk(kv.value);
        return std::vector<KeyValue>{{ByteWriter().str("eq").u64(c.pos).take(), kv.value}};
    };
    const Reducer reduce = [](const std::string &key, const std::vector<std::string> &values) {
        bool same = values.size() == 2 && read_chunk(values[0]).text == read_chunk(values[1]).text;
        ReduceResult res;
        res.emitted.push_back({key, ByteWriter().u64(same ? 0 : 1).take()});
        return res;
    };
    const auto records = job.run(map, reduce, chunk_input(s1, s2, chunk));
    bool equal = true;
    for (const auto &kv : records) equal = equal && ByteReader(kv.value).u64() == 0;
    if (equal) out.cost = 0;
    out.traces = job.traces();
    return out;
}

}  // namespace

MrEditResult mr_edit(std::string_view s1, std::string_view s2, double eps, const ClusterConfig &cfg) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("eps must be positive");
    }
    const std::size_t n = std::max(s1.size(), s2.size());
    MrEditResult result;
    result.approx.factor_bound = 3.0 + eps;
    result.approx.script.reset();
    if (n == 0) {
        result.approx.estimate = 0;
        result.approx.path = ApproxPath::equal;
        return result;
    }

    std::vector<double> grid;
    const double step = 1.0 + eps / 3.0;
    for (double delta = 1.0 / static_cast<double>(n);; delta *= step) {
        if (delta >= 1.0) {
            grid.push_back(1.0);
            break;
        }
        grid.push_back(delta);
    }
    const double a_star = critical_alpha(cfg.x);
    double small_delta = 0.0;
    std::vector<double> large;
    for (const double delta : grid) {
        if (alpha_of(delta, n) >= a_star - 1e-12) {
            small_delta = std::max(small_delta, delta);
        } else {
            large.push_back(delta);
        }
    }

    struct Sub {
        double delta;
        ApproxPath path;
        MrOutcome outcome;
    };
    std::vector<Sub> subs;
    subs.push_back({0.0, ApproxPath::equal, equality_round(s1, s2, cfg, ceil_pow(n, 1.0 - cfg.x))});
    if (small_delta > 0.0) {
        subs.push_back({small_delta, ApproxPath::exact, mr_edit_small_delta(s1, s2, small_delta, cfg)});
    }
    for (const double delta : large) {
        subs.push_back({delta, ApproxPath::windows, mr_edit_large_delta(s1, s2, delta, eps, cfg)});
    }

    // One record per subproblem, keyed by its index; the combine round keeps the cheapest.
    std::vector<KeyValue> answers;
    std::size_t longest = 0;
    for (std::size_t k = 0; k < subs.size(); ++k) {
        const MrOutcome &o = subs[k].outcome;
        longest = std::max(longest, o.rounds());
        result.traces.insert(result.traces.end(), o.traces.begin(), o.traces.end());
        result.approx.meter.time_units += o.total_work();
        result.approx.meter.raw_evals += o.evaluated_pairs;
        answers.push_back({ByteWriter().str("sub").u64(k).take(),
                           ByteWriter().u64(k).u64(o.cost.has_value() ? 1 : 0).i64(o.cost.value_or(0)).take()});
    }
    const Mapper map = [](const KeyValue &kv) { return std::vector<KeyValue>{{"combine", kv.value}}; };
    const Reducer reduce = [](const std::string &key, const std::vector<std::string> &values) {
        bool found = false;
        std::uint64_t best_k = 0;
        std::int64_t best = 0;
        for (const auto &v : values) {
            ByteReader r(v);
            const std::uint64_t k = r.u64();
            const bool has = r.u64() != 0;
            const std::int64_t cost = r.i64();
            if (has && (!found || cost < best)) {
                found = true;
                best = cost;
                best_k = k;
            }
        }
        ReduceResult res;
        res.emitted.push_back({key, ByteWriter().u64(found ? 1 : 0).u64(best_k).i64(best).take()});
        return res;
    };
    RoundOutput combined = run_round(map, reduce, answers, cfg, longest + 1);
    result.traces.push_back(combined.trace);
    result.rounds = longest + 1;
    result.subproblems = subs.size();

    ByteReader r(combined.output.at(0).value);
    const bool found = r.u64() != 0;
    const std::size_t k = r.u64();
    const std::int64_t best = r.i64();
    if (!found) {
        throw std::logic_error("no subproblem produced a cost");
    }
    result.approx.estimate = best;
    result.approx.path = subs[k].path;
    result.chosen_delta = subs[k].delta;
    return result;
}

}  // namespace subquad
