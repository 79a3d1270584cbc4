#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "errors.hpp"
#include "symbolic.hpp"

namespace ktower {

// A finite truncation of a subset of the nonnegative integers, seen through [0, window).
struct WindowSet {
    std::int64_t window = 0;
    std::vector<std::int64_t> members;

    static WindowSet make(std::int64_t window, std::vector<std::int64_t> members) {
        require(window >= 0, "WindowSet: negative window");
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        for (auto m : members) require(m >= 0 && m < window, "WindowSet: member outside [0, window)");
        return WindowSet{window, std::move(members)};
    }

    bool contains(std::int64_t n) const { return std::binary_search(members.begin(), members.end(), n); }
    bool operator==(const WindowSet&) const = default;
};

inline std::int64_t max_gap(const WindowSet& s) {
    require(!s.members.empty(), "max_gap: empty set");
    std::int64_t gap = s.members.front();
    for (std::size_t i = 1; i < s.members.size(); ++i) gap = std::max(gap, s.members[i] - s.members[i - 1]);
    return std::max(gap, s.window - s.members.back());
}

inline std::int64_t longest_run(const WindowSet& s) {
    std::int64_t best = 0, cur = 0;
    for (std::size_t i = 0; i < s.members.size(); ++i) {
        cur = (i && s.members[i] == s.members[i - 1] + 1) ? cur + 1 : 1;
        best = std::max(best, cur);
    }
    return best;
}

struct IntervalWitness {
    std::int64_t first = 0;
    std::int64_t last = 0;
    bool operator==(const IntervalWitness&) const = default;
};

// First maximal chain of members with consecutive gaps <= g spanning at least r integers.
inline std::optional<IntervalWitness> piecewise_syndetic_witness(const WindowSet& s, std::int64_t g, std::int64_t r) {
    require(g >= 1 && r >= 1, "piecewise_syndetic_witness: g and r must be >= 1");
    const auto& m = s.members;
    std::size_t i = 0;
    while (i < m.size()) {
        std::size_t j = i;
        while (j + 1 < m.size() && m[j + 1] - m[j] <= g) ++j;
        if (m[j] - m[i] + 1 >= r) return IntervalWitness{m[i], m[j]};
        i = j + 1;
    }
    return std::nullopt;
}

struct ThickSyndeticCertificate {
    WindowSet starts;
    std::int64_t gap = 0;
    bool operator==(const ThickSyndeticCertificate&) const = default;
};

// Starts x with x..x+r-1 all in s, over the window [0, L-r+1) where such a run fits.
inline std::optional<ThickSyndeticCertificate> thickly_syndetic_witness(const WindowSet& s, std::int64_t r, std::int64_t g) {
    require(r >= 1 && g >= 1, "thickly_syndetic_witness: r and g must be >= 1");
    if (s.window < r) return std::nullopt;
    std::vector<std::int64_t> starts;
    std::int64_t run = 0;
    for (std::size_t i = 0; i < s.members.size(); ++i) {
        run = (i && s.members[i] == s.members[i - 1] + 1) ? run + 1 : 1;
        if (run >= r) starts.push_back(s.members[i] - r + 1);
    }
    if (starts.empty()) return std::nullopt;
    WindowSet st{s.window - r + 1, std::move(starts)};
    const auto gap = max_gap(st);
    if (gap > g) return std::nullopt;
    return ThickSyndeticCertificate{std::move(st), gap};
}

// Heuristic: support words w (|w| <= r/2) such that every length-r support word containing w
// contains it inside every length-r/2 sub-window; then shrunk to its largest subword-closed part.
inline std::set<Word> window_minimal_words(const SymbolicApprox& approx, std::int64_t r) {
    require(r >= 2 && r <= approx.window, "window_minimal_words: need 2 <= r <= window");
    const auto half = static_cast<std::size_t>(r / 2);
    const auto longs = approx.support(static_cast<std::size_t>(r));
    std::set<Word> good;
    for (std::size_t len = 1; len <= half; ++len)
        for (const auto& w : approx.support(len)) {
            bool ok = true;
            for (const auto& z : longs) {
                if (!contains_factor(z, w)) continue;
                for (std::size_t a = 0; ok && a + half <= z.size(); ++a)
                    ok = contains_factor(Word(z.begin() + static_cast<std::ptrdiff_t>(a),
                                              z.begin() + static_cast<std::ptrdiff_t>(a + half)), w);
                if (!ok) break;
            }
            if (ok) good.insert(w);
        }
    // shortest first, so a word survives only if its two maximal proper factors already did
    std::set<Word> closed;
    for (std::size_t len = 1; len <= half; ++len)
        for (const auto& w : good) {
            if (w.size() != len) continue;
            if (len == 1 || (closed.count(Word(w.begin() + 1, w.end())) && closed.count(Word(w.begin(), w.end() - 1))))
                closed.insert(w);
        }
    return closed;
}

inline bool is_subword_closed(const std::set<Word>& words) {
    for (const auto& w : words)
        if (w.size() > 1 && (!words.count(Word(w.begin() + 1, w.end())) || !words.count(Word(w.begin(), w.end() - 1))))
            return false;
    return true;
}

} // namespace ktower
