#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "interval_set.hpp"
#include "odometer.hpp"
#include "partition.hpp"
#include "rational.hpp"
#include "word.hpp"

namespace ktower {

/// Levels T^j(base), 0 <= j < height.
struct Column {
    IntervalSet base;
    std::int64_t height = 1;
    bool operator==(const Column&) const = default;
};

struct Tower {
    std::vector<Column> columns;
    bool operator==(const Tower&) const = default;
};

/// A tower with one name per column; names[i].size() == columns[i].height.
struct NamedTower {
    Tower tower;
    std::vector<Word> names;
};

inline IntervalSet column_carrier(const OdometerSystem& sys, const Column& c) {
    return orbit_buckets(sys, c.base, std::vector<int>(static_cast<std::size_t>(std::max<std::int64_t>(c.height, 0)), 0), 1)[0];
}

inline IntervalSet carrier(const OdometerSystem& sys, const Tower& t) {
    std::vector<IntervalSet> parts;
    for (const auto& c : t.columns) parts.push_back(column_carrier(sys, c));
    return unite_all(parts);
}

inline IntervalSet tower_base(const Tower& t) {
    std::vector<IntervalSet> parts;
    for (const auto& c : t.columns) parts.push_back(c.base);
    return unite_all(parts);
}

inline std::vector<std::int64_t> heights(const Tower& t) {
    std::vector<std::int64_t> h;
    for (const auto& c : t.columns) h.push_back(c.height);
    return h;
}

/// Distinct heights, ascending.
inline std::vector<std::int64_t> distinct_heights(const Tower& t) {
    auto h = heights(t);
    std::sort(h.begin(), h.end());
    h.erase(std::unique(h.begin(), h.end()), h.end());
    return h;
}

inline std::int64_t gcd_heights(const std::vector<std::int64_t>& h) {
    std::int64_t g = 0;
    for (auto x : h) g = std::gcd(g, x);
    return g;
}

inline std::int64_t gcd_heights(const Tower& t) { return gcd_heights(heights(t)); }

/// Levels of the column are pairwise disjoint.
inline bool column_is_disjoint(const OdometerSystem& sys, const Column& c) {
    if (c.height < 1) return false;
    const auto carrier = column_carrier(sys, c);
    return carrier.measure() == c.base.measure() * Rational(c.height);
}

/// Columns are individually disjoint and have pairwise disjoint carriers.
inline bool tower_is_valid(const OdometerSystem& sys, const Tower& t) {
    std::vector<IntervalSet> carriers;
    Rational total = 0;
    for (const auto& c : t.columns) {
        if (c.height < 1) return false;
        carriers.push_back(column_carrier(sys, c));
        total += c.base.measure() * Rational(c.height);
    }
    return unite_all(carriers).measure() == total;
}

/// Sum over columns of height times base measure.
inline Rational kac_sum(const Tower& t) {
    Rational s = 0;
    for (const auto& c : t.columns) s += Rational(c.height) * c.base.measure();
    return s;
}

/// A column of height N covering at least 1 - 1/N of the space.
///
/// The full-period column over [0, p^-m) is cut into floor(p^m / N) stacked blocks of
/// height N; the block bottoms form the base. m is the least exponent meeting the bound,
/// so whenever p^m >= N already suffices the base is the single cylinder [0, p^-m).
inline Column rokhlin_tower(const OdometerSystem& sys, std::int64_t N) {
    require(N >= 1, "rokhlin_tower: height must be >= 1");
    int m = 0;
    Integer g = 1;
    while ((g / N) * N * N < (N - 1) * g) {
        ++m;
        g *= sys.base();
    }
    const IntervalSet root = cylinder_set(sys, Word(static_cast<std::size_t>(m), 0));
    std::vector<IntervalSet> bottoms;
    const auto blocks = static_cast<std::int64_t>(g / N);
    for (std::int64_t i = 0; i < blocks; ++i) bottoms.push_back(image(sys, root, i * N));
    return {unite_all(bottoms), N};
}

/// Columns over B_k = {x in B : first return to B at time k}, ascending k.
///
/// The orbit front T^k(points of B not yet returned) is pushed forward one step at a time;
/// whatever of it lands in B at step k is pulled back to form B_k.
namespace detail {

// Returns false when some mass has not come back within max_h steps.
template <class U>
bool kakutani_sweep(const IntervalSet& b, int m, std::int64_t p, std::int64_t max_h, Tower& t) {
    const auto powers = grid_powers<U>(m, p);
    const auto cells = to_ranges<U>(b, m, p);
    auto front = unit_step<U>(cells, m, powers, p, true);
    auto both = [](bool x, bool y) { return x && y; };
    auto minus = [](bool x, bool y) { return x && !y; };
    for (std::int64_t k = 1; k <= max_h; ++k) {
        const auto hit = combine_ranges<U>(front, cells, both);
        if (!hit.empty()) {
            t.columns.push_back({from_ranges<U>(step_ranges<U>(hit, m, p, -k), m, p), k});
            front = combine_ranges<U>(front, hit, minus);
        }
        if (front.empty()) return true;
        front = unit_step<U>(front, m, powers, p, true);
    }
    return false;
}

} // namespace detail

inline Tower kakutani_tower(const OdometerSystem& sys, const IntervalSet& b, std::int64_t max_h) {
    require(b.measure() > 0, "kakutani_tower: base has measure 0");
    require(max_h >= 1, "kakutani_tower: max_h must be >= 1");
    const std::int64_t p = sys.base();
    Tower t;
    auto exceeded = [&](const Rational& left) {
        return budget_error("height budget exceeded: mass " + to_string(left) + " of the base has not returned within " +
                            std::to_string(max_h) + " steps");
    };
    const int m = detail::common_grid_exponent(b, p);
    if (m >= 0) {
        // same sweep on integer cell ranges
        const bool done = detail::fits_machine_grid(p, m) ? detail::kakutani_sweep<std::uint64_t>(b, m, p, max_h, t)
                                                          : detail::kakutani_sweep<Integer>(b, m, p, max_h, t);
        if (done) return t;
        Rational back = 0;
        for (const auto& c : t.columns) back += c.base.measure();
        throw exceeded(b.measure() - back);
    }
    IntervalSet front = image(sys, b, 1);
    for (std::int64_t k = 1; k <= max_h; ++k) {
        const IntervalSet hit = front & b;
        if (!hit.empty()) {
            t.columns.push_back({image(sys, hit, -k), k});
            front = front - hit;
        }
        if (front.empty()) return t;
        front = image(sys, front, 1);
    }
    throw exceeded(front.measure());
}

/// Return-time classes of t grouped into one column per height, ascending height.
inline Tower group_by_height(const Tower& t) {
    std::map<std::int64_t, std::vector<IntervalSet>> by;
    for (const auto& c : t.columns) by[c.height].push_back(c.base);
    Tower out;
    for (auto& [h, parts] : by) out.columns.push_back({unite_all(parts), h});
    return out;
}

/// Splits each column into sub-columns on which the (a, height)-name is constant.
/// Sub-columns keep the order of their parent and are sorted by name within it.
inline NamedTower refine_tower_named(const OdometerSystem& sys, const Tower& t, const Partition& a) {
    NamedTower out;
    for (const auto& col : t.columns) {
        // pieces are carried at the current level; names grow by one symbol per level
        std::vector<std::pair<IntervalSet, Word>> pieces{{col.base, {}}};
        for (std::int64_t j = 0; j < col.height; ++j) {
            std::vector<std::pair<IntervalSet, Word>> next;
            for (auto& [set, name] : pieces) {
                for (std::size_t s = 0; s < a.size(); ++s) {
                    IntervalSet part = set & a.cell(s);
                    if (part.empty()) continue;
                    Word w = name;
                    w.push_back(static_cast<int>(s) + 1);
                    next.emplace_back(std::move(part), std::move(w));
                }
            }
            if (j + 1 < col.height)
                for (auto& pr : next) pr.first = image(sys, pr.first, 1);
            pieces = std::move(next);
        }
        std::sort(pieces.begin(), pieces.end(), [](const auto& x, const auto& y) { return x.second < y.second; });
        for (auto& [set, name] : pieces) {
            out.tower.columns.push_back({image(sys, set, -(col.height - 1)), col.height});
            out.names.push_back(std::move(name));
        }
    }
    return out;
}

inline Tower refine_tower(const OdometerSystem& sys, const Tower& t, const Partition& a) {
    return refine_tower_named(sys, t, a).tower;
}

/// A K-R tower whose return times are exactly N1 and N2.
///
/// A single full-period column over [0, p^-m) is cut into a blocks of height N1 followed by
/// b blocks of height N2, where p^m = a*N1 + b*N2 with a, b >= 1; the block bottoms form
/// the new base. The smallest such m is used.
inline Tower tower_n1n2(const OdometerSystem& sys, std::int64_t n1, std::int64_t n2) {
    require(n1 >= 1 && n1 < n2, "tower_n1n2: need 1 <= N1 < N2");
    require(std::gcd(n1, n2) == 1, "tower_n1n2: N1 and N2 must be coprime");
    const std::int64_t p = sys.base();
    for (int m = 0; m < 62; ++m) {
        const Integer big = ipow(p, m);
        if (big > Integer(std::int64_t{1} << 60)) break;
        const auto master = static_cast<std::int64_t>(big);
        for (std::int64_t a = 1; a * n1 + n2 <= master; ++a) {
            const std::int64_t rest = master - a * n1;
            if (rest % n2 != 0) continue;
            const std::int64_t b = rest / n2;
            const IntervalSet root = cylinder_set(sys, Word(static_cast<std::size_t>(m), 0));
            std::vector<IntervalSet> short_starts, long_starts;
            std::int64_t level = 0;
            for (std::int64_t i = 0; i < a; ++i, level += n1) short_starts.push_back(image(sys, root, level));
            for (std::int64_t i = 0; i < b; ++i, level += n2) long_starts.push_back(image(sys, root, level));
            return Tower{{{unite_all(short_starts), n1}, {unite_all(long_starts), n2}}};
        }
    }
    throw budget_error("increase master height: no power of " + std::to_string(p) + " below 2^60 splits into blocks of " +
                       std::to_string(n1) + " and " + std::to_string(n2));
}

/// Result of repeatedly trimming the landing set of the tallest column.
struct InfiniteHeightsResult {
    IntervalSet base;
    Tower tower;
    std::vector<IntervalSet> bases;   // C_1, C_2, ..., C_{iterations+1}
    std::vector<IntervalSet> removed; // E_1, ..., E_iterations
    std::vector<std::size_t> height_counts;
};

/// Starting from the Kakutani tower over B0, repeatedly remove from the base a small piece
/// E_k of T^h(base of the tallest column), h its height. Each removal stretches the orbits
/// that landed in E_k and creates a height larger than all previous ones.
inline InfiniteHeightsResult infinite_heights_iterate(const OdometerSystem& sys, const IntervalSet& b0,
                                                      std::int64_t iterations, std::int64_t max_h = 1 << 16) {
    require(iterations >= 1, "infinite_heights_iterate: iterations must be >= 1");
    InfiniteHeightsResult r;
    IntervalSet c = b0;
    Tower t = group_by_height(kakutani_tower(sys, c, max_h));
    r.bases.push_back(c);
    r.height_counts.push_back(t.columns.size());
    for (std::int64_t k = 1; k <= iterations; ++k) {
        Rational smallest = t.columns.front().base.measure();
        for (const auto& col : t.columns) smallest = std::min(smallest, col.base.measure());
        const Rational bound = smallest / Rational(Integer(1) << k);
        const Column& top = t.columns.back();
        const IntervalSet landing = image(sys, top.base, top.height);
        const IntervalSet e = leftmost_subset(landing, bound / 2);
        c = c - e;
        t = group_by_height(kakutani_tower(sys, c, max_h));
        r.removed.push_back(e);
        r.bases.push_back(c);
        r.height_counts.push_back(t.columns.size());
    }
    r.base = c;
    r.tower = std::move(t);
    return r;
}

} // namespace ktower
