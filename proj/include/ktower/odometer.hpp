#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "interval_set.hpp"
#include "rational.hpp"
#include "word.hpp"

namespace ktower {

/// The p-adic adding machine realised on [0,1).
///
/// A point x is identified with its base-p expansion x = sum d_i p^-(i+1). T adds one to
/// d_0 and carries into d_1, d_2, ...; the digit word d_0 d_1 ... is read little-endian as
/// a p-adic integer. Cylinders of length n are permuted cyclically, so T^(p^n) fixes each one.
class OdometerSystem {
public:
    explicit OdometerSystem(std::int64_t base_p) : p_(base_p) {
        require(base_p >= 2, "odometer base must be >= 2, got " + std::to_string(base_p));
    }
    std::int64_t base() const { return p_; }
    bool operator==(const OdometerSystem&) const = default;

private:
    std::int64_t p_;
};

namespace detail {

// Grid path: every endpoint is a multiple of p^-m. Each interval is split into aligned
// cylinders; a cylinder of length n is moved by adding `steps` to its little-endian index
// modulo p^n. U is std::uint64_t when p^m fits comfortably, Integer otherwise.
template <class U>
U reverse_digits(U q, int n, std::int64_t p) {
    U r = 0;
    const U pp = static_cast<U>(p);
    for (int i = 0; i < n; ++i) {
        r = r * pp + q % pp;
        q /= pp;
    }
    return r;
}

template <class U>
U mod_steps(std::int64_t steps, const U& modulus) {
    if constexpr (std::is_same_v<U, std::uint64_t>) {
        const auto mod = static_cast<std::int64_t>(modulus);
        std::int64_t r = steps % mod;
        if (r < 0) r += mod;
        return static_cast<U>(r);
    } else {
        U r = U(steps) % modulus;
        if (r < 0) r += modulus;
        return r;
    }
}

// Half-open integer ranges [lo, hi) of grid cells, sorted, disjoint and non-touching.
template <class U>
using CellRanges = std::vector<std::pair<U, U>>;

template <class U>
CellRanges<U> merge_ranges(CellRanges<U> blocks) {
    std::sort(blocks.begin(), blocks.end());
    CellRanges<U> out;
    for (auto& [lo, hi] : blocks) {
        if (!out.empty() && lo <= out.back().second) {
            if (hi > out.back().second) out.back().second = hi;
        } else {
            out.emplace_back(lo, hi);
        }
    }
    return out;
}

// T^(+-1) on one range: cells whose leading digit does not overflow move as a block; the
// rest wraps that digit and carries (or borrows) into the next one, one digit per round.
template <class U>
void unit_step_range(U lo, U hi, int m, const std::vector<U>& powers, std::int64_t p, bool forward, CellRanges<U>& out) {
    U offset = 0;
    const U pm1 = static_cast<U>(p - 1);
    while (lo < hi) {
        if (m == 0) {
            out.emplace_back(offset + lo, offset + hi);
            return;
        }
        const U top = powers[static_cast<std::size_t>(m - 1)];
        if (forward) {
            const U edge = top * pm1;
            if (lo < edge) {
                const U e = hi < edge ? hi : edge;
                out.emplace_back(offset + lo + top, offset + e + top);
                lo = e;
            }
            if (lo >= hi) return;
            lo -= edge;
            hi -= edge;
        } else {
            if (hi > top) {
                const U s = lo > top ? lo : top;
                out.emplace_back(offset + s - top, offset + hi - top);
                hi = s;
            }
            if (lo >= hi) return;
            offset += top * pm1;
        }
        --m;
    }
}

template <class U>
std::vector<U> grid_powers(int m, std::int64_t p) {
    std::vector<U> powers(static_cast<std::size_t>(m) + 1);
    powers[0] = 1;
    for (int j = 1; j <= m; ++j) powers[j] = powers[j - 1] * static_cast<U>(p);
    return powers;
}

template <class U>
CellRanges<U> unit_step(const CellRanges<U>& a, int m, const std::vector<U>& powers, std::int64_t p, bool forward) {
    CellRanges<U> blocks;
    blocks.reserve(a.size() * 2);
    for (const auto& [first, last] : a) unit_step_range<U>(first, last, m, powers, p, forward, blocks);
    return merge_ranges(std::move(blocks));
}

template <class U>
CellRanges<U> step_ranges(const CellRanges<U>& a, int m, std::int64_t p, std::int64_t steps) {
    if (steps == 0) return a;
    const auto powers = grid_powers<U>(m, p);
    if (steps == 1 || steps == -1) return unit_step<U>(a, m, powers, p, steps == 1);
    std::vector<U> shift(static_cast<std::size_t>(m) + 1);
    for (int n = 0; n <= m; ++n) shift[n] = mod_steps<U>(steps, powers[n]);
    CellRanges<U> blocks;
    blocks.reserve(a.size() * 2);
    for (const auto& [first, last] : a) {
        U lo = first;
        while (lo < last) {
            int j = 0;
            while (j < m && lo % powers[j + 1] == 0 && lo + powers[j + 1] <= last) ++j;
            const U size = powers[j];
            const int n = m - j;
            const U c = reverse_digits<U>(lo / size, n, p);
            const U q2 = reverse_digits<U>((c + shift[n]) % powers[n], n, p);
            blocks.emplace_back(q2 * size, q2 * size + size);
            lo += size;
        }
    }
    return merge_ranges(std::move(blocks));
}

template <class U, class Keep>
CellRanges<U> combine_ranges(const CellRanges<U>& a, const CellRanges<U>& b, Keep keep) {
    CellRanges<U> out;
    std::size_t ia = 0, ib = 0;
    // walk the endpoints of both lists in order; 2*i is a lower end, 2*i+1 an upper end
    bool inside = false;
    U open{};
    auto at = [](const CellRanges<U>& v, std::size_t i) -> const U& { return i % 2 == 0 ? v[i / 2].first : v[i / 2].second; };
    const std::size_t na = a.size() * 2, nb = b.size() * 2;
    while (ia < na || ib < nb) {
        U x;
        if (ib >= nb || (ia < na && at(a, ia) <= at(b, ib))) x = at(a, ia);
        else x = at(b, ib);
        while (ia < na && at(a, ia) == x) ++ia;
        while (ib < nb && at(b, ib) == x) ++ib;
        const bool now = keep(ia % 2 == 1, ib % 2 == 1);
        if (now && !inside) open = x;
        if (!now && inside) out.emplace_back(open, x);
        inside = now;
    }
    return out;
}

template <class U>
CellRanges<U> to_ranges(const IntervalSet& a, int m, std::int64_t p) {
    const Integer g = ipow(p, m);
    CellRanges<U> out;
    out.reserve(a.size());
    auto cvt = [&](const Rational& x) -> U {
        Integer k = numerator_of(x) * (g / denominator_of(x));
        if constexpr (std::is_same_v<U, std::uint64_t>) return static_cast<U>(k);
        else return k;
    };
    for (std::size_t i = 0; i < a.size(); ++i) out.emplace_back(cvt(a.lo(i)), cvt(a.hi(i)));
    return out;
}

template <class U>
IntervalSet from_ranges(const CellRanges<U>& r, int m, std::int64_t p) {
    const Integer g = ipow(p, m);
    std::vector<Rational> pts;
    pts.reserve(r.size() * 2);
    for (const auto& [lo, hi] : r) {
        pts.emplace_back(Integer(lo), g);
        pts.emplace_back(Integer(hi), g);
    }
    return IntervalSet::from_canonical_points(std::move(pts));
}

template <class U>
IntervalSet grid_image(const IntervalSet& a, int m, std::int64_t p, std::int64_t steps) {
    return from_ranges<U>(step_ranges<U>(to_ranges<U>(a, m, p), m, p, steps), m, p);
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// General path for arbitrary rational endpoints: split by the leading digit, strip it,
// and recurse on the tail with the carried step count. A piece that covers its whole
// digit cylinder is mapped onto a whole cylinder and stops the recursion; partial pieces
// are stretched by p at every level, so the recursion terminates.
inline IntervalSet general_image(const IntervalSet& a, std::int64_t p, std::int64_t steps) {
    if (steps == 0 || a.empty()) return a;
    if (a == IntervalSet::full()) return a;
    const std::int64_t s0 = ((steps % p) + p) % p;
    const std::int64_t q = floor_div(steps - s0, p);
    std::vector<IntervalSet::Interval> out;
    const Rational rp(p);
    for (std::int64_t c = 0; c < p; ++c) {
        const IntervalSet cell = IntervalSet::interval(Rational(c) / rp, Rational(c + 1) / rp);
        const IntervalSet piece = a & cell;
        if (piece.empty()) continue;
        std::vector<Rational> stretched;
        for (const auto& x : piece.points()) stretched.push_back(x * rp - Rational(c));
        const IntervalSet tail = IntervalSet::from_canonical_points(std::move(stretched));
        const std::int64_t digit = (c + s0) % p;
        const std::int64_t carry = (c + s0) >= p ? 1 : 0;
        const IntervalSet moved = general_image(tail, p, q + carry);
        for (std::size_t i = 0; i < moved.size(); ++i)
            out.push_back({(moved.lo(i) + Rational(digit)) / rp, (moved.hi(i) + Rational(digit)) / rp});
    }
    return IntervalSet::from_intervals(std::move(out));
}

// Smallest m with every endpoint a multiple of p^-m, or -1.
inline bool fits_machine_grid(std::int64_t p, int m) { return ipow(p, m) * p < (Integer(1) << 62); }

inline int common_grid_exponent(const IntervalSet& a, std::int64_t p) {
    int m = 0;
    for (const auto& x : a.points()) {
        const int e = power_exponent(denominator_of(x), p);
        if (e < 0) return -1;
        m = std::max(m, e);
    }
    return m;
}

} // namespace detail

enum class ImagePath { automatic, grid, general };

/// T^steps(a), exact. Negative steps apply the inverse map.
inline IntervalSet image(const OdometerSystem& sys, const IntervalSet& a, std::int64_t steps,
                         ImagePath path = ImagePath::automatic) {
    const std::int64_t p = sys.base();
    if (steps == 0 || a.empty()) return a;
    if (path == ImagePath::general) return detail::general_image(a, p, steps);
    const int m = detail::common_grid_exponent(a, p);
    if (m < 0) {
        require(path != ImagePath::grid, "image: endpoints are not on a p-adic grid");
        return detail::general_image(a, p, steps);
    }
    if (detail::fits_machine_grid(p, m)) return detail::grid_image<std::uint64_t>(a, m, p, steps);
    return detail::grid_image<Integer>(a, m, p, steps);
}

namespace detail {

template <class U>
std::vector<IntervalSet> orbit_buckets_on_grid(const IntervalSet& a, const std::vector<int>& label, std::size_t buckets, int m,
                                               std::int64_t p) {
    const auto powers = grid_powers<U>(m, p);
    std::vector<CellRanges<U>> acc(buckets);
    auto level = to_ranges<U>(a, m, p);
    for (std::size_t j = 0; j < label.size(); ++j) {
        if (label[j] >= 0) {
            auto& dst = acc[static_cast<std::size_t>(label[j])];
            dst.insert(dst.end(), level.begin(), level.end());
        }
        if (j + 1 < label.size()) level = unit_step<U>(level, m, powers, p, true);
    }
    std::vector<IntervalSet> out;
    out.reserve(buckets);
    for (auto& r : acc) out.push_back(from_ranges<U>(merge_ranges(std::move(r)), m, p));
    return out;
}

} // namespace detail

/// Sorts the orbit segment a, Ta, ..., T^(n-1)a into buckets: out[b] is the union of the
/// T^j a with label[j] == b. A negative label drops the level.
inline std::vector<IntervalSet> orbit_buckets(const OdometerSystem& sys, const IntervalSet& a, const std::vector<int>& label,
                                              std::size_t buckets) {
    for (int b : label) require(b < static_cast<int>(buckets), "orbit_buckets: label outside the bucket range");
    const std::int64_t p = sys.base();
    const int m = detail::common_grid_exponent(a, p);
    if (m >= 0 && !a.empty()) {
        return detail::fits_machine_grid(p, m) ? detail::orbit_buckets_on_grid<std::uint64_t>(a, label, buckets, m, p)
                                               : detail::orbit_buckets_on_grid<Integer>(a, label, buckets, m, p);
    }
    std::vector<std::vector<IntervalSet>> acc(buckets);
    IntervalSet level = a;
    for (std::size_t j = 0; j < label.size(); ++j) {
        if (label[j] >= 0) acc[static_cast<std::size_t>(label[j])].push_back(level);
        if (j + 1 < label.size()) level = image(sys, level, 1);
    }
    std::vector<IntervalSet> out;
    for (auto& v : acc) out.push_back(unite_all(v));
    return out;
}

/// Pullback T^-steps(a).
inline IntervalSet preimage(const OdometerSystem& sys, const IntervalSet& a, std::int64_t steps) {
    return image(sys, a, -steps);
}

/// [v, v + p^-n) where v = sum digits_i p^-(i+1).
inline IntervalSet cylinder_set(const OdometerSystem& sys, const Word& digits) {
    const std::int64_t p = sys.base();
    Integer num = 0;
    for (int d : digits) {
        require(d >= 0 && d < p, "cylinder digit " + std::to_string(d) + " outside 0.." + std::to_string(p - 1));
        num = num * p + d;
    }
    const Integer den = ipow(p, static_cast<std::int64_t>(digits.size()));
    return IntervalSet::interval(Rational(num, den), Rational(num + 1, den));
}

/// Digits of the cylinder obtained by adding one (with carry) to `digits`.
inline Word increment_digits(const OdometerSystem& sys, Word digits) {
    for (auto& d : digits) {
        if (++d < sys.base()) return digits;
        d = 0;
    }
    return digits;
}

/// T^(p^|digits|) maps the cylinder onto itself.
inline bool cylinder_period_check(const OdometerSystem& sys, const Word& digits) {
    const IntervalSet c = cylinder_set(sys, digits);
    const Integer period = ipow(sys.base(), static_cast<std::int64_t>(digits.size()));
    require(period <= Integer(std::numeric_limits<std::int64_t>::max()), "cylinder too long for a step count");
    return image(sys, c, static_cast<std::int64_t>(period)) == c;
}

/// T^n x for a point with terminating base-p expansion, n >= 0.
inline Rational point_orbit(const OdometerSystem& sys, const Rational& x, std::int64_t n) {
    const std::int64_t p = sys.base();
    require(x >= 0 && x < 1, "point " + to_string(x) + " outside [0,1)");
    require(n >= 0, "point_orbit: negative step count");
    const int e = power_exponent(denominator_of(x), p);
    require(e >= 0, "point " + to_string(x) + " has no terminating base-" + std::to_string(p) + " expansion");
    // little-endian p-adic integer of the digit word
    Integer big_endian = numerator_of(x);
    Integer value = 0;
    for (int i = 0; i < e; ++i) {
        value = value * p + big_endian % p;
        big_endian /= p;
    }
    value += n;
    int digits = 0;
    for (Integer v = value; v > 0; v /= p) ++digits;
    digits = std::max(digits, e);
    Integer out = 0;
    Integer v = value;
    for (int i = 0; i < digits; ++i) {
        out = out * p + v % p;
        v /= p;
    }
    return Rational(out, ipow(p, digits));
}

/// The (cells, length)-name of x: symbol i (1-based) at slot n iff T^n x lies in cells[i-1].
inline Word point_name(const OdometerSystem& sys, const Rational& x, const std::vector<IntervalSet>& cells,
                       std::int64_t length) {
    require(x >= 0 && x < 1, "point " + to_string(x) + " outside [0,1)");
    Word name;
    name.reserve(static_cast<std::size_t>(std::max<std::int64_t>(length, 0)));
    for (std::int64_t n = 0; n < length; ++n) {
        const Rational y = point_orbit(sys, x, n);
        int symbol = 0;
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (cells[i].contains(y)) {
                symbol = static_cast<int>(i) + 1;
                break;
            }
        require(symbol != 0, "cells do not cover the orbit point " + to_string(y));
        name.push_back(symbol);
    }
    return name;
}

} // namespace ktower
