#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace ktower {

/// A finite union of half-open intervals [lo, hi) inside [0, 1).
///
/// The representation is canonical: intervals are non-empty, sorted, and separated by
/// gaps of positive length, so two sets are equal exactly when their representations
/// are. Endpoints are stored flattened as lo_0 < hi_0 < lo_1 < hi_1 < ...
class IntervalSet {
public:
    struct Interval {
        Rational lo;
        Rational hi;
    };

    IntervalSet() = default;

    static IntervalSet full() { return interval(Rational(0), Rational(1)); }

    static IntervalSet interval(const Rational& lo, const Rational& hi) {
        require(lo >= 0 && hi <= 1 && lo <= hi,
                "interval [" + to_string(lo) + "," + to_string(hi) + ") is not inside [0,1)");
        IntervalSet s;
        if (lo < hi) s.pts_ = {lo, hi};
        return s;
    }

    /// Canonicalises an arbitrary list of (possibly overlapping or empty) intervals.
    static IntervalSet from_intervals(std::vector<Interval> parts) {
        for (const auto& iv : parts)
            require(iv.lo >= 0 && iv.hi <= 1 && iv.lo <= iv.hi, "interval outside [0,1)");
        std::sort(parts.begin(), parts.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
        IntervalSet s;
        for (auto& iv : parts) {
            if (iv.lo == iv.hi) continue;
            if (!s.pts_.empty() && iv.lo <= s.pts_.back()) {
                if (iv.hi > s.pts_.back()) s.pts_.back() = std::move(iv.hi);
            } else {
                s.pts_.push_back(std::move(iv.lo));
                s.pts_.push_back(std::move(iv.hi));
            }
        }
        return s;
    }

    /// Builds from endpoints already known to be canonical. Checked.
    static IntervalSet from_canonical_points(std::vector<Rational> pts) {
        require(pts.size() % 2 == 0, "odd number of endpoints");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == 0) require(pts[0] >= 0, "endpoint below 0");
            else require(pts[i - 1] < pts[i], "endpoints not strictly increasing");
        }
        require(pts.empty() || pts.back() <= 1, "endpoint above 1");
        IntervalSet s;
        s.pts_ = std::move(pts);
        return s;
    }

    bool empty() const { return pts_.empty(); }
    std::size_t size() const { return pts_.size() / 2; }
    const Rational& lo(std::size_t i) const { return pts_[2 * i]; }
    const Rational& hi(std::size_t i) const { return pts_[2 * i + 1]; }
    const std::vector<Rational>& points() const { return pts_; }

    std::vector<Interval> intervals() const {
        std::vector<Interval> out;
        out.reserve(size());
        for (std::size_t i = 0; i < size(); ++i) out.push_back({lo(i), hi(i)});
        return out;
    }

    Rational measure() const {
        Rational m = 0;
        for (std::size_t i = 0; i < size(); ++i) m += hi(i) - lo(i);
        return m;
    }

    bool contains(const Rational& x) const {
        // first endpoint strictly greater than x; x is inside iff that index is odd
        auto it = std::upper_bound(pts_.begin(), pts_.end(), x);
        return (it - pts_.begin()) % 2 == 1;
    }

    bool operator==(const IntervalSet&) const = default;

    std::string str() const {
        if (empty()) return "{}";
        std::string out = "{";
        for (std::size_t i = 0; i < size(); ++i) {
            if (i) out += ", ";
            out += "[" + to_string(lo(i)) + "," + to_string(hi(i)) + ")";
        }
        return out + "}";
    }

    /// Pointwise combination: a point lies in the result iff keep(in_a, in_b).
    template <class Keep>
    static IntervalSet combine(const IntervalSet& a, const IntervalSet& b, Keep keep) {
        const auto& pa = a.pts_;
        const auto& pb = b.pts_;
        IntervalSet out;
        out.pts_.reserve(pa.size() + pb.size());
        std::size_t ia = 0, ib = 0;
        bool inside = false;
        while (ia < pa.size() || ib < pb.size()) {
            const Rational* x;
            if (ib >= pb.size() || (ia < pa.size() && pa[ia] <= pb[ib])) x = &pa[ia];
            else x = &pb[ib];
            const Rational at = *x;
            while (ia < pa.size() && pa[ia] == at) ++ia;
            while (ib < pb.size() && pb[ib] == at) ++ib;
            const bool now = keep(ia % 2 == 1, ib % 2 == 1);
            if (now != inside) {
                out.pts_.push_back(at);
                inside = now;
            }
        }
        return out;
    }

private:
    std::vector<Rational> pts_;
};

enum class SetOp { unite, intersect, subtract, sym_diff };

inline IntervalSet boolean_op(const IntervalSet& a, const IntervalSet& b, SetOp which) {
    switch (which) {
    case SetOp::unite: return IntervalSet::combine(a, b, [](bool x, bool y) { return x || y; });
    case SetOp::intersect: return IntervalSet::combine(a, b, [](bool x, bool y) { return x && y; });
    case SetOp::subtract: return IntervalSet::combine(a, b, [](bool x, bool y) { return x && !y; });
    case SetOp::sym_diff: return IntervalSet::combine(a, b, [](bool x, bool y) { return x != y; });
    }
    return {};
}

inline IntervalSet operator|(const IntervalSet& a, const IntervalSet& b) { return boolean_op(a, b, SetOp::unite); }
inline IntervalSet operator&(const IntervalSet& a, const IntervalSet& b) { return boolean_op(a, b, SetOp::intersect); }
inline IntervalSet operator-(const IntervalSet& a, const IntervalSet& b) { return boolean_op(a, b, SetOp::subtract); }
inline IntervalSet operator^(const IntervalSet& a, const IntervalSet& b) { return boolean_op(a, b, SetOp::sym_diff); }

inline Rational measure(const IntervalSet& a) { return a.measure(); }

// Both tests walk the smaller side and binary-search the other one.
inline bool is_subset(const IntervalSet& a, const IntervalSet& b) {
    const auto& pts = b.points();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto idx = static_cast<std::size_t>(std::upper_bound(pts.begin(), pts.end(), a.lo(i)) - pts.begin());
        if (idx % 2 == 0 || a.hi(i) > pts[idx]) return false;
    }
    return true;
}

inline bool is_disjoint(const IntervalSet& a, const IntervalSet& b) {
    if (a.size() > b.size()) return is_disjoint(b, a);
    const auto& pts = b.points();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto idx = static_cast<std::size_t>(std::upper_bound(pts.begin(), pts.end(), a.lo(i)) - pts.begin());
        if (idx % 2 == 1) return false;
        if (idx < pts.size() && pts[idx] < a.hi(i)) return false;
    }
    return true;
}

/// Union of many sets by pairwise merging, so already sorted runs are never re-sorted.
inline IntervalSet unite_all(const std::vector<IntervalSet>& sets) {
    std::vector<IntervalSet> layer;
    for (const auto& s : sets)
        if (!s.empty()) layer.push_back(s);
    if (layer.empty()) return {};
    while (layer.size() > 1) {
        std::vector<IntervalSet> next;
        next.reserve((layer.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < layer.size(); i += 2) next.push_back(layer[i] | layer[i + 1]);
        if (layer.size() % 2 == 1) next.push_back(std::move(layer.back()));
        layer = std::move(next);
    }
    return std::move(layer.front());
}

/// Reads "[a,b)" pieces in any order, with or without the braces and separators that
/// str() prints; "{}" is the empty set.
inline IntervalSet parse_interval_set(std::string_view text) {
    std::vector<IntervalSet::Interval> parts;
    std::size_t i = 0;
    const std::string whole(text);
    while (true) {
        const auto open = text.find('[', i);
        if (open == std::string_view::npos) break;
        const auto comma = text.find(',', open);
        const auto close = text.find(')', open);
        require(comma != std::string_view::npos && close != std::string_view::npos && comma < close,
                "malformed interval set '" + whole + "'");
        const auto trim = [](std::string_view v) {
            while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
            while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
            return v;
        };
        const Rational lo = parse_rational(trim(text.substr(open + 1, comma - open - 1)));
        const Rational hi = parse_rational(trim(text.substr(comma + 1, close - comma - 1)));
        require(lo >= 0 && lo <= hi && hi <= 1, "interval [" + to_string(lo) + "," + to_string(hi) + ") is not inside [0,1)");
        parts.push_back({lo, hi});
        i = close + 1;
    }
    for (char c : text.substr(i)) require(c == ' ' || c == '{' || c == '}' || c == ',', "malformed interval set '" + whole + "'");
    return IntervalSet::from_intervals(std::move(parts));
}

/// The subset of `a` with measure exactly `m` obtained by sweeping `a` from the left.
inline IntervalSet leftmost_subset(const IntervalSet& a, const Rational& m) {
    require(m >= 0, "leftmost_subset: negative measure " + to_string(m));
    require(m <= a.measure(), "leftmost_subset: measure " + to_string(m) + " exceeds " + to_string(a.measure()));
    std::vector<Rational> pts;
    Rational left = m;
    for (std::size_t i = 0; i < a.size() && left > 0; ++i) {
        const Rational len = a.hi(i) - a.lo(i);
        pts.push_back(a.lo(i));
        if (len <= left) {
            pts.push_back(a.hi(i));
            left -= len;
        } else {
            pts.push_back(a.lo(i) + left);
            left = 0;
        }
    }
    // touching pieces cannot occur: consecutive intervals of a are separated by gaps
    return IntervalSet::from_canonical_points(std::move(pts));
}

} // namespace ktower
