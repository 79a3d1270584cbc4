#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "interval_set.hpp"
#include "odometer.hpp"
#include "partition.hpp"
#include "rational.hpp"
#include "tower.hpp"
#include "word.hpp"

namespace ktower {

inline constexpr std::int64_t default_word_cap = std::int64_t{1} << 24;

/// All m-words over {1..k} concatenated in lexicographic order; length m * k^m.
inline Word universal_word(int k, int m, std::int64_t cap = default_word_cap) {
    require(k >= 2 && m >= 1, "universal_word: need k >= 2 and m >= 1");
    const Integer len = Integer(m) * ipow(k, m);
    require(len <= cap, "universal_word: length " + len.str() + " exceeds the size cap " + std::to_string(cap));
    const auto count = static_cast<std::int64_t>(ipow(k, m));
    Word out;
    out.reserve(static_cast<std::size_t>(len));
    Word block(static_cast<std::size_t>(m), 1);
    for (std::int64_t i = 0; i < count; ++i) {
        out.insert(out.end(), block.begin(), block.end());
        for (int pos = m - 1; pos >= 0; --pos) {
            if (++block[static_cast<std::size_t>(pos)] <= k) break;
            block[static_cast<std::size_t>(pos)] = 1;
        }
    }
    return out;
}

/// k cells, everything in cell 1.
inline Partition fresh_partition(std::size_t k) {
    require(k >= 1, "fresh_partition: need k >= 1");
    std::vector<IntervalSet> cells(k);
    cells[0] = IntervalSet::full();
    return Partition(std::move(cells));
}

/// Paints names[i] on the first |names[i]| levels of columns[i]; the rest of the space keeps
/// its cell in `prev`.
inline Partition copy_names(const OdometerSystem& sys, const Partition& prev,
                            const std::vector<std::pair<Column, Word>>& jobs) {
    const std::size_t k = prev.size();
    std::vector<std::vector<IntervalSet>> painted(k);
    std::vector<IntervalSet> touched;
    for (const auto& [col, name] : jobs) {
        require(static_cast<std::int64_t>(name.size()) <= col.height,
                "copy name: name of length " + std::to_string(name.size()) + " is longer than the column height " +
                    std::to_string(col.height));
        std::vector<int> label;
        label.reserve(name.size());
        for (int s : name) {
            require(s >= 1 && static_cast<std::size_t>(s) <= k, "copy name: symbol " + std::to_string(s) + " outside 1.." + std::to_string(k));
            label.push_back(s - 1);
        }
        auto sets = orbit_buckets(sys, col.base, label, k);
        for (std::size_t s = 0; s < k; ++s) {
            touched.push_back(sets[s]);
            painted[s].push_back(std::move(sets[s]));
        }
    }
    const IntervalSet all_touched = unite_all(touched);
    std::vector<IntervalSet> cells;
    cells.reserve(k);
    for (std::size_t s = 0; s < k; ++s) cells.push_back((prev.cell(s) - all_touched) | unite_all(painted[s]));
    return Partition(std::move(cells));
}

/// One painting instruction: every point of `set` moves to cell `symbol` (1-based).
struct LevelPaint {
    IntervalSet set;
    int symbol = 1;
};

/// Applies the paints on top of prev; later paints win where sets overlap.
inline Partition repaint(const Partition& prev, const std::vector<LevelPaint>& jobs) {
    const std::size_t k = prev.size();
    std::vector<std::vector<IntervalSet>> painted(k);
    std::vector<IntervalSet> all;
    Rational total = 0;
    for (const auto& job : jobs) {
        require(job.symbol >= 1 && static_cast<std::size_t>(job.symbol) <= k,
                "repaint: symbol " + std::to_string(job.symbol) + " outside 1.." + std::to_string(k));
        all.push_back(job.set);
        total += job.set.measure();
    }
    const IntervalSet touched = unite_all(all);
    if (touched.measure() == total) {
        for (const auto& job : jobs) painted[static_cast<std::size_t>(job.symbol - 1)].push_back(job.set);
    } else {
        IntervalSet later;
        for (auto it = jobs.rbegin(); it != jobs.rend(); ++it) {
            painted[static_cast<std::size_t>(it->symbol - 1)].push_back(it->set - later);
            later = later | it->set;
        }
    }
    std::vector<IntervalSet> cells;
    cells.reserve(k);
    for (std::size_t s = 0; s < k; ++s) cells.push_back((prev.cell(s) - touched) | unite_all(painted[s]));
    return Partition(std::move(cells));
}

inline Partition copy_name_on_column(const OdometerSystem& sys, const Partition& prev, const Column& col, const Word& name) {
    return copy_names(sys, prev, {{col, name}});
}

/// Exact cylinder measures rho(w) = mu(intersection of T^-i A_{w_i}) for every word of
/// length 1..L with positive measure.
struct SymbolicApprox {
    std::size_t k = 0;
    std::int64_t window = 0;
    std::map<Word, Rational> rho;

    Rational at(const Word& w) const {
        auto it = rho.find(w);
        return it == rho.end() ? Rational(0) : it->second;
    }

    std::vector<Word> support(std::size_t length) const {
        std::vector<Word> out;
        for (const auto& [w, r] : rho)
            if (w.size() == length) out.push_back(w);
        return out;
    }

    bool operator==(const SymbolicApprox&) const = default;
};

inline constexpr std::size_t default_symbolic_cap = 1 << 20;

/// Cylinder set of w (symbols 1..k) under partition a: the points whose name starts with w.
inline IntervalSet cylinder_of_word(const OdometerSystem& sys, const Partition& a, const Word& w) {
    IntervalSet s = IntervalSet::full();
    for (std::size_t i = 0; i < w.size() && !s.empty(); ++i) {
        require(w[i] >= 1 && static_cast<std::size_t>(w[i]) <= a.size(), "word symbol outside the partition alphabet");
        s = s & preimage(sys, a.cell(static_cast<std::size_t>(w[i] - 1)), static_cast<std::int64_t>(i));
    }
    return s;
}

inline SymbolicApprox symbolic_measure(const OdometerSystem& sys, const Partition& a, std::int64_t L,
                                       std::size_t cap = default_symbolic_cap) {
    require(L >= 1, "symbolic_measure: window must be >= 1");
    SymbolicApprox out;
    out.k = a.size();
    out.window = L;
    std::vector<std::pair<Word, IntervalSet>> layer{{Word{}, IntervalSet::full()}};
    for (std::int64_t len = 0; len < L; ++len) {
        std::vector<IntervalSet> pulled;
        for (const auto& c : a.cells()) pulled.push_back(preimage(sys, c, len));
        std::vector<std::pair<Word, IntervalSet>> next;
        for (const auto& [w, set] : layer)
            for (std::size_t s = 0; s < a.size(); ++s) {
                IntervalSet part = set & pulled[s];
                if (part.empty()) continue;
                Word ws = w;
                ws.push_back(static_cast<int>(s) + 1);
                out.rho.emplace(ws, part.measure());
                next.emplace_back(std::move(ws), std::move(part));
                require(out.rho.size() <= cap, "symbolic_measure: more than " + std::to_string(cap) + " support words");
            }
        layer = std::move(next);
    }
    return out;
}

/// {n in [0, L) : the name of T^n x starts with target}.
inline std::vector<std::int64_t> visit_set(const OdometerSystem& sys, const Rational& x, const Partition& a,
                                           const Word& target, std::int64_t L) {
    require(!target.empty(), "visit_set: empty target word");
    require(L >= 0, "visit_set: negative window");
    const Word name = point_name(sys, x, a.cells(), L + static_cast<std::int64_t>(target.size()) - 1);
    std::vector<std::int64_t> out;
    for (std::int64_t n = 0; n < L; ++n)
        if (std::equal(target.begin(), target.end(), name.begin() + n)) out.push_back(n);
    return out;
}

/// {n in [0, L) : some support word shows u at position 0 and v at position n}.
inline std::vector<std::int64_t> hit_set(const SymbolicApprox& approx, const Word& u, const Word& v, std::int64_t L) {
    require(!u.empty() && !v.empty(), "hit_set: empty word");
    require(static_cast<std::int64_t>(u.size() + v.size()) + L <= approx.window,
            "hit_set: window " + std::to_string(approx.window) + " too small for |u| + L + |v|");
    std::vector<std::int64_t> out;
    for (std::int64_t n = 0; n < L; ++n) {
        const std::size_t len = std::max(u.size(), static_cast<std::size_t>(n) + v.size());
        bool hit = false;
        for (const auto& [z, r] : approx.rho) {
            if (z.size() != len) continue;
            if (std::equal(u.begin(), u.end(), z.begin()) && std::equal(v.begin(), v.end(), z.begin() + n)) {
                hit = true;
                break;
            }
        }
        if (hit) out.push_back(n);
    }
    return out;
}

} // namespace ktower
