#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "interval_set.hpp"
#include "odometer.hpp"
#include "rational.hpp"
#include "tower.hpp"

namespace ktower {

/// Every intermediate object of one successful kr_prime run.
struct KrPrimeTrace {
    Tower input_tower;
    std::int64_t n = 0;
    std::int64_t N = 0;
    int attempts = 0;
    int master_exponent = 0;
    std::int64_t master_height = 0;
    IntervalSet master_base;              // B
    std::vector<IntervalSet> b_sets;      // B_1..B_k
    std::vector<std::int64_t> n_positions;
    std::vector<std::size_t> d_indices;   // 0-based column index chosen at each step
    std::int64_t b_hat_min_return = 0;
    std::vector<std::int64_t> b_hat_heights;
    IntervalSet d_hat;
    std::vector<std::int64_t> d_hat_heights;
    std::vector<IntervalSet> e_sets;
    std::vector<std::int64_t> h_hats;
    Rational eps0 = 0;
    std::vector<IntervalSet> f_sets;
    IntervalSet output_base;              // D
};

struct KrPrimeOptions {
    int max_retries = 8;
    std::int64_t max_master_height = std::int64_t{1} << 26;
};

namespace detail {

// First cylinder of length m that fits inside c, if any.
inline std::optional<IntervalSet> first_cylinder_inside(const IntervalSet& c, std::int64_t p, int m) {
    const Integer g = ipow(p, m);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Rational scaled = c.lo(i) * Rational(g);
        Integer q = numerator_of(scaled) / denominator_of(scaled);
        if (Rational(q) < scaled) ++q;
        if (Rational(q + 1, g) <= c.hi(i)) return IntervalSet::interval(Rational(q, g), Rational(q + 1, g));
    }
    return std::nullopt;
}

// 0, -1, +1, -2, +2, ...: nearer offsets first, downward before upward.
inline std::vector<std::int64_t> nearest_offsets(std::int64_t radius) {
    std::vector<std::int64_t> out{0};
    for (std::int64_t d = 1; d <= radius; ++d) {
        out.push_back(-d);
        out.push_back(d);
    }
    return out;
}

struct KrAttempt {
    std::optional<std::pair<Tower, KrPrimeTrace>> result;
    std::string failure;
};

inline KrAttempt kr_prime_attempt(const OdometerSystem& sys, const Tower& t, std::int64_t n, int m) {
    KrAttempt out;
    auto fail = [&](std::string why) {
        out.failure = "master 2^" + std::to_string(m) + ": " + std::move(why);
        return out;
    };
    const std::int64_t p = sys.base();
    const std::size_t k = t.columns.size();
    std::vector<IntervalSet> cs;
    std::vector<std::int64_t> hs;
    for (const auto& col : t.columns) {
        cs.push_back(col.base);
        hs.push_back(col.height);
    }
    const std::int64_t N = *std::max_element(hs.begin(), hs.end());
    const IntervalSet c = unite_all(cs);
    const std::int64_t block = n + 3 * N;
    const std::int64_t gap = 10 * block * block;

    KrPrimeTrace tr;
    tr.input_tower = t;
    tr.n = n;
    tr.N = N;
    tr.master_exponent = m;
    const std::int64_t M = static_cast<std::int64_t>(ipow(p, m));
    tr.master_height = M;

    // Step 1a: Rokhlin column over a cylinder B inside C; its levels are the cylinders T^j B.
    const auto b = first_cylinder_inside(c, p, m);
    if (!b) return fail("no cylinder of this length fits inside the base");
    tr.master_base = *b;

    // Step 1b: visit levels n_1 < n_2 < ... spaced at least `gap` apart, each meeting a fresh C_d.
    std::vector<std::int64_t> starts{0};
    std::vector<bool> used(k, false);
    IntervalSet used_c;
    for (std::size_t i = 0; i < k; ++i) {
        bool found = false;
        for (std::int64_t lv = starts.back() + gap; lv < M && !found; ++lv) {
            bool in_range = false;
            for (auto s : starts) {
                const std::int64_t off = ((lv - s) % M + M) % M;
                if (off <= gap) in_range = true;
            }
            if (in_range) continue;
            const IntervalSet level = image(sys, *b, lv);
            if (((level & c) - used_c).empty()) continue;
            for (std::size_t d = 0; d < k && !found; ++d) {
                if (used[d]) continue;
                IntervalSet bi = level & cs[d];
                if (bi.empty()) continue;
                used[d] = true;
                used_c = used_c | cs[d];
                tr.b_sets.push_back(std::move(bi));
                tr.n_positions.push_back(lv);
                tr.d_indices.push_back(d);
                starts.push_back(lv);
                found = true;
            }
        }
        if (!found) return fail("no admissible level for visit " + std::to_string(i + 1));
    }

    // Step 1c: return times of B^ = union B_i. A point of B_i can only land in B_j after
    // a time congruent to n_j - n_i modulo M.
    std::map<std::int64_t, std::vector<IntervalSet>> bhat_cols;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<std::pair<std::int64_t, std::size_t>> cand;
        for (std::size_t j = 0; j < k; ++j) {
            std::int64_t off = ((tr.n_positions[j] - tr.n_positions[i]) % M + M) % M;
            if (off == 0) off = M;
            for (std::int64_t wrap = 0; wrap < 4; ++wrap) cand.emplace_back(off + wrap * M, j);
        }
        std::sort(cand.begin(), cand.end());
        IntervalSet rest = tr.b_sets[i];
        for (auto [l, j] : cand) {
            if (rest.empty()) break;
            IntervalSet hit = rest & image(sys, tr.b_sets[j], -l);
            if (hit.empty()) continue;
            rest = rest - hit;
            bhat_cols[l].push_back(std::move(hit));
        }
        if (!rest.empty()) return fail("return times of the visit sets exceed 4 master periods");
    }
    tr.b_hat_min_return = bhat_cols.begin()->first;
    for (const auto& [h, parts] : bhat_cols) tr.b_hat_heights.push_back(h);
    if (tr.b_hat_min_return < gap) return fail("visit sets return before " + std::to_string(gap));

    // Step 1d: cut each column into blocks of sizes block+1 and block, then slide each block
    // bottom to the nearest level lying in C.
    std::map<std::int64_t, IntervalSet> shifted_c;
    const auto offsets = nearest_offsets(N);
    for (auto d : offsets) shifted_c[d] = image(sys, c, -d);
    std::vector<IntervalSet> dhat_parts;
    for (const auto& [h, parts] : bhat_cols) {
        const IntervalSet base = unite_all(parts);
        const std::int64_t q = h / block, r = h % block;
        if (q < r) return fail("column height " + std::to_string(h) + " cannot be cut into blocks");
        std::int64_t start = 0;
        for (std::int64_t i = 0; i < q; ++i) {
            IntervalSet u = image(sys, base, start);
            for (auto d : offsets) {
                if (u.empty()) break;
                const IntervalSet piece = u & shifted_c.at(d);
                if (piece.empty()) continue;
                dhat_parts.push_back(image(sys, piece, d));
                u = u - piece;
            }
            if (!u.empty()) return fail("a block bottom is farther than N from the base");
            start += (i < r) ? block + 1 : block;
        }
    }
    tr.d_hat = unite_all(dhat_parts);
    if (!is_subset(tr.d_hat, c)) return fail("D^ left the base");
    const Tower dhat_tower = group_by_height(kakutani_tower(sys, tr.d_hat, n + 5 * N));
    tr.d_hat_heights = heights(dhat_tower);
    if (tr.d_hat_heights.front() < n + N) return fail("D^ return time below n+N");

    // Step 2: pieces F_i of doubling measure, each moved up by its own column height h_i.
    for (std::size_t i = 0; i < k; ++i) {
        bool found = false;
        for (const auto& col : dhat_tower.columns) {
            const IntervalSet s = col.base & cs[i];
            if (s.empty()) continue;
            tr.e_sets.push_back(leftmost_subset(s, s.measure() / 2));
            tr.h_hats.push_back(col.height);
            found = true;
            break;
        }
        if (!found) return fail("D^ misses column base " + std::to_string(i + 1));
    }
    std::vector<IntervalSet> fresh;
    for (std::size_t i = 0; i < k; ++i) {
        fresh.push_back(tr.e_sets[i] - image(sys, tr.e_sets[i], tr.h_hats[i]));
        tr.eps0 = i == 0 ? fresh[0].measure() : std::min(tr.eps0, fresh[i].measure());
    }
    if (tr.eps0 <= 0) return fail("some E_i is invariant under its return map");
    Rational want = tr.eps0 / Rational(Integer(1) << (k + 2));
    IntervalSet moved_up;
    std::vector<IntervalSet> lifted;
    for (std::size_t i = 0; i < k; ++i) {
        const IntervalSet avail = fresh[i] - moved_up;
        if (avail.measure() < want) return fail("not enough room for F_" + std::to_string(i + 1));
        tr.f_sets.push_back(leftmost_subset(avail, want));
        moved_up = moved_up | image(sys, tr.f_sets[i], tr.h_hats[i]);
        lifted.push_back(image(sys, tr.f_sets[i], hs[i]));
        want *= 2;
    }
    tr.output_base = (tr.d_hat - unite_all(tr.f_sets)) | unite_all(lifted);

    Tower result = group_by_height(kakutani_tower(sys, tr.output_base, n + 6 * N));
    const auto hd = heights(result);
    if (!is_subset(tr.output_base, c)) return fail("D left the base");
    if (hd.front() < n || hd.back() > n + 6 * N) return fail("return times of D leave [n, n+6N]");
    if (gcd_heights(hd) != 1) return fail("heights of D are not coprime");
    out.result.emplace(std::move(result), std::move(tr));
    return out;
}

} // namespace detail

/// From a K-R tower with coprime heights, a K-R tower over D inside its base whose return
/// times lie in [n, n + 6N] and whose heights are again coprime (N = tallest input column).
inline std::pair<Tower, KrPrimeTrace> kr_prime(const OdometerSystem& sys, const Tower& t, std::int64_t n,
                                               const KrPrimeOptions& opt = {}) {
    require(!t.columns.empty(), "kr_prime: empty input tower");
    require(n >= 1, "kr_prime: n must be >= 1");
    for (const auto& col : t.columns)
        require(col.height >= 1 && col.base.measure() > 0, "kr_prime: columns need positive height and base");
    require(gcd_heights(t) == 1, "kr_prime: input heights are not coprime");
    require(tower_base(t).measure() == [&] {
        Rational s = 0;
        for (const auto& col : t.columns) s += col.base.measure();
        return s;
    }(), "kr_prime: column bases overlap");
    require(kac_sum(t) == 1 && carrier(sys, t) == IntervalSet::full(),
            "kr_prime: input is not a K-R tower (levels overlap or miss part of the space)");
    for (const auto& col : t.columns)
        require(is_subset(image(sys, col.base, col.height), tower_base(t)), "kr_prime: a column top does not return to the base");

    const std::int64_t p = sys.base();
    const std::size_t k = t.columns.size();
    std::int64_t N = 0;
    Rational smallest = t.columns.front().base.measure();
    for (const auto& col : t.columns) {
        N = std::max(N, col.height);
        smallest = std::min(smallest, col.base.measure());
    }
    const std::int64_t block = n + 3 * N;
    const Rational bound = smallest / Rational(10 * static_cast<std::int64_t>(k) * block * block + static_cast<std::int64_t>(k));
    int m = 0;
    while (!(Rational(1, ipow(p, m)) < bound && ipow(p, m) > 20 * block * block)) ++m;

    std::string failures;
    for (int attempt = 0; attempt < opt.max_retries; ++attempt, ++m) {
        if (ipow(p, m) > opt.max_master_height) {
            failures += "; master height p^" + std::to_string(m) + " above the configured cap";
            break;
        }
        auto a = detail::kr_prime_attempt(sys, t, n, m);
        if (a.result) {
            a.result->second.attempts = attempt + 1;
            return std::move(*a.result);
        }
        failures += (failures.empty() ? "" : "; ") + a.failure;
    }
    throw budget_error("kr_prime: retry with larger master tower (" + failures + ")");
}

} // namespace ktower
