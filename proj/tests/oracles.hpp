#pragma once

// Reference implementations used only by the tests. They are deliberately naive: point by
// point, cell by cell, no shared code with the library's fast paths.

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include <ktower/interval_set.hpp>
#include <ktower/rational.hpp>

namespace oracle {

using ktower::Integer;
using ktower::IntervalSet;
using ktower::Rational;
using ktower::denominator_of;
using ktower::numerator_of;
using ktower::power_exponent;

// Big-endian digits of the grid cell q at resolution p^-m: d_0 is the most significant.
inline std::vector<int> cell_digits(std::int64_t q, int m, std::int64_t p) {
    std::vector<int> d(static_cast<std::size_t>(m));
    for (int i = m - 1; i >= 0; --i) {
        d[static_cast<std::size_t>(i)] = static_cast<int>(q % p);
        q /= p;
    }
    return d;
}

inline std::int64_t cell_index(const std::vector<int>& d, std::int64_t p) {
    std::int64_t q = 0;
    for (int x : d) q = q * p + x;
    return q;
}

// One application of the adding machine to a digit word, carrying towards higher indices.
// Carries off the end are dropped; on a whole cylinder that is exactly T.
inline void add_one(std::vector<int>& d, std::int64_t p) {
    for (auto& x : d) {
        if (++x < p) return;
        x = 0;
    }
}

inline void sub_one(std::vector<int>& d, std::int64_t p) {
    for (auto& x : d) {
        if (x-- > 0) return;
        x = static_cast<int>(p - 1);
    }
}

// T^s(a) for a set whose endpoints lie on the grid p^-m, one grid cell at a time.
inline IntervalSet image_by_cells(const IntervalSet& a, std::int64_t p, int m, std::int64_t s) {
    std::int64_t g = 1;
    for (int i = 0; i < m; ++i) g *= p;
    std::vector<IntervalSet::Interval> out;
    for (std::int64_t q = 0; q < g; ++q) {
        const Rational mid(Integer(2 * q + 1), Integer(2 * g));
        if (!a.contains(mid)) continue;
        auto d = cell_digits(q, m, p);
        for (std::int64_t i = 0; i < (s < 0 ? -s : s); ++i) (s > 0 ? add_one(d, p) : sub_one(d, p));
        const std::int64_t r = cell_index(d, p);
        out.push_back({Rational(Integer(r), Integer(g)), Rational(Integer(r + 1), Integer(g))});
    }
    return IntervalSet::from_intervals(out);
}

// Random union of grid cells at resolution p^-m.
inline IntervalSet random_grid_set(std::mt19937_64& rng, std::int64_t p, int m, double density = 0.4) {
    std::int64_t g = 1;
    for (int i = 0; i < m; ++i) g *= p;
    std::bernoulli_distribution pick(density);
    std::vector<IntervalSet::Interval> parts;
    for (std::int64_t q = 0; q < g; ++q)
        if (pick(rng)) parts.push_back({Rational(Integer(q), Integer(g)), Rational(Integer(q + 1), Integer(g))});
    return IntervalSet::from_intervals(parts);
}

// Random set with arbitrary rational endpoints below the given denominator bound.
inline IntervalSet random_rational_set(std::mt19937_64& rng, int pieces, std::int64_t den_bound) {
    std::uniform_int_distribution<std::int64_t> den(1, den_bound);
    std::vector<Rational> pts;
    for (int i = 0; i < 2 * pieces; ++i) {
        const std::int64_t q = den(rng);
        std::uniform_int_distribution<std::int64_t> num(0, q);
        pts.emplace_back(Integer(num(rng)), Integer(q));
    }
    std::sort(pts.begin(), pts.end());
    std::vector<IntervalSet::Interval> parts;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) parts.push_back({pts[i], pts[i + 1]});
    return IntervalSet::from_intervals(parts);
}

// Membership indicator of a on the midpoints of a fine uniform grid; used to compare set
// operations pointwise.
inline std::vector<bool> sample(const IntervalSet& a, std::int64_t n) {
    std::vector<bool> out(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a.contains(Rational(Integer(2 * i + 1), Integer(2 * n)));
    return out;
}

// Return time of every grid cell of b, by stepping the cell's digits until it lands in b again.
// Valid when b is a union of cells of size p^-m: T maps such cells onto such cells.
inline std::map<std::int64_t, IntervalSet> return_times_by_cells(const IntervalSet& b, std::int64_t p, int m, std::int64_t cap) {
    std::int64_t g = 1;
    for (int i = 0; i < m; ++i) g *= p;
    // b as integer cell ranges [lo, hi)
    std::vector<std::pair<std::int64_t, std::int64_t>> cells;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const Rational lo = b.lo(i) * Rational(g), hi = b.hi(i) * Rational(g);
        if (denominator_of(lo) != 1 || denominator_of(hi) != 1) throw std::logic_error("return_times_by_cells: set is off the grid");
        cells.emplace_back(static_cast<std::int64_t>(numerator_of(lo)), static_cast<std::int64_t>(numerator_of(hi)));
    }
    auto member = [&](std::int64_t q) {
        auto it = std::upper_bound(cells.begin(), cells.end(), std::make_pair(q, INT64_MAX));
        return it != cells.begin() && q < std::prev(it)->second;
    };
    std::map<std::int64_t, std::vector<IntervalSet::Interval>> parts;
    for (auto [lo, hi] : cells)
        for (std::int64_t q = lo; q < hi; ++q) {
            auto d = cell_digits(q, m, p);
            std::int64_t r = 0;
            do {
                add_one(d, p);
                ++r;
            } while (r <= cap && !member(cell_index(d, p)));
            parts[r].push_back({Rational(Integer(q), Integer(g)), Rational(Integer(q + 1), Integer(g))});
        }
    std::map<std::int64_t, IntervalSet> out;
    for (auto& [r, v] : parts) out[r] = IntervalSet::from_intervals(v);
    return out;
}

inline int grid_exponent(const IntervalSet& a, std::int64_t p) {
    int m = 0;
    for (const auto& x : a.points()) m = std::max(m, power_exponent(denominator_of(x), p));
    return m;
}

} // namespace oracle

namespace oracle {

// Midpoints of every elementary piece cut out by the endpoints of the given sets. Two sets
// built from these endpoints agree iff they agree at all of these points.
inline std::vector<Rational> probe_points(const std::vector<IntervalSet>& sets) {
    std::set<Rational> cuts{Rational(0), Rational(1)};
    for (const auto& s : sets)
        for (const auto& x : s.points()) cuts.insert(x);
    std::vector<Rational> probes;
    for (auto it = cuts.begin(); std::next(it) != cuts.end(); ++it) probes.push_back((*it + *std::next(it)) / 2);
    return probes;
}

} // namespace oracle
