#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "interval_set.hpp"
#include "odometer.hpp"
#include "rational.hpp"
#include "word.hpp"

namespace ktower {

/// Ordered cells A_1..A_k covering [0,1) disjointly. Cells may be empty; the index of a
/// cell is part of the partition's identity.
class Partition {
public:
    Partition() : cells_{IntervalSet::full()} {}

    explicit Partition(std::vector<IntervalSet> cells) : cells_(std::move(cells)) {
        require(!cells_.empty(), "partition needs at least one cell");
        Rational total = 0;
        for (const auto& c : cells_) total += c.measure();
        require(total == 1, "partition cells have total measure " + to_string(total) + ", expected 1");
        require(unite_all(cells_) == IntervalSet::full(), "partition cells do not cover [0,1)");
    }

    static Partition trivial() { return Partition(); }

    std::size_t size() const { return cells_.size(); }
    const IntervalSet& cell(std::size_t i) const { return cells_.at(i); }
    const std::vector<IntervalSet>& cells() const { return cells_; }

    /// 1-based symbol of the cell containing x.
    int symbol_of(const Rational& x) const {
        for (std::size_t i = 0; i < cells_.size(); ++i)
            if (cells_[i].contains(x)) return static_cast<int>(i) + 1;
        throw precondition_error("point " + to_string(x) + " outside [0,1)");
    }

    bool operator==(const Partition&) const = default;

private:
    std::vector<IntervalSet> cells_;
};

/// Two-cell partition {[0,c), [c,1)}.
inline Partition split_at(const Rational& c) {
    return Partition({IntervalSet::interval(0, c), IntervalSet::interval(c, 1)});
}

/// Cells A_i & B_j in lexicographic order of (i, j); empty intersections stay as cells.
inline Partition join(const Partition& a, const Partition& b) {
    std::vector<IntervalSet> cells;
    cells.reserve(a.size() * b.size());
    for (const auto& x : a.cells())
        for (const auto& y : b.cells()) cells.push_back(x & y);
    return Partition(std::move(cells));
}

inline Partition pullback(const OdometerSystem& sys, const Partition& a, std::int64_t i) {
    std::vector<IntervalSet> cells;
    cells.reserve(a.size());
    for (const auto& c : a.cells()) cells.push_back(preimage(sys, c, i));
    return Partition(std::move(cells));
}

/// Join of T^-i a over m <= i <= n. The cell for index word (a_m..a_n) sits at the
/// lexicographic rank of that word.
inline Partition span(const OdometerSystem& sys, const Partition& a, std::int64_t m, std::int64_t n) {
    require(m <= n, "span: need m <= n");
    Partition out = pullback(sys, a, m);
    for (std::int64_t i = m + 1; i <= n; ++i) out = join(out, pullback(sys, a, i));
    return out;
}

/// Index of the span cell for word w over alphabet size k (symbols 1..k).
inline std::size_t word_rank(const Word& w, std::size_t k) {
    std::size_t r = 0;
    for (int s : w) {
        require(s >= 1 && static_cast<std::size_t>(s) <= k, "symbol out of alphabet");
        r = r * k + static_cast<std::size_t>(s - 1);
    }
    return r;
}

inline Word word_of_rank(std::size_t r, std::size_t k, std::size_t length) {
    Word w(length);
    for (std::size_t i = length; i-- > 0;) {
        w[i] = static_cast<int>(r % k) + 1;
        r /= k;
    }
    return w;
}

/// Every cell of a lies inside some cell of b.
inline bool refines(const Partition& a, const Partition& b) {
    for (const auto& x : a.cells()) {
        bool inside = false;
        for (const auto& y : b.cells())
            if (is_subset(x, y)) {
                inside = true;
                break;
            }
        if (!inside) return false;
    }
    return true;
}

/// Half the total measure of the cellwise symmetric differences.
inline Rational partition_metric(const Partition& a, const Partition& b) {
    require(a.size() == b.size(), "partition_metric: cell counts " + std::to_string(a.size()) + " and " +
                                      std::to_string(b.size()) + " differ");
    Rational sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a.cell(i) ^ b.cell(i)).measure();
    return sum / 2;
}

/// For each cell of a, the index of the cell of b containing it.
/// Empty cells have no containing cell of their own; they go to the same index when b
/// has one, and to the first cell otherwise.
inline std::vector<std::size_t> refinement_map(const Partition& a, const Partition& b) {
    std::vector<std::size_t> phi(a.size());
    for (std::size_t t = 0; t < a.size(); ++t) {
        if (a.cell(t).empty()) {
            phi[t] = t < b.size() ? t : 0;
            continue;
        }
        bool found = false;
        for (std::size_t s = 0; s < b.size() && !found; ++s)
            if (is_subset(a.cell(t), b.cell(s))) {
                phi[t] = s;
                found = true;
            }
        require(found, "transfer_refinement: first partition does not refine the third");
    }
    return phi;
}

/// Moves b along the perturbation a -> a_prime: B'_s is the union of the A'_t whose A_t
/// lies in B_s.
inline Partition transfer_refinement(const Partition& a, const Partition& a_prime, const Partition& b) {
    require(a.size() == a_prime.size(), "transfer_refinement: a and a_prime differ in cell count");
    const auto phi = refinement_map(a, b);
    std::vector<std::vector<IntervalSet>> groups(b.size());
    for (std::size_t t = 0; t < a.size(); ++t) groups[phi[t]].push_back(a_prime.cell(t));
    std::vector<IntervalSet> cells;
    cells.reserve(b.size());
    for (auto& g : groups) cells.push_back(unite_all(g));
    return Partition(std::move(cells));
}

} // namespace ktower
