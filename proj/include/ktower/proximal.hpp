#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "detectors.hpp"
#include "errors.hpp"
#include "kr_prime.hpp"
#include "partition.hpp"
#include "symbolic.hpp"
#include "tower.hpp"

namespace ktower {

// Concatenation of whole column names whose lengths add up to exactly `gap`.
// Heights are used largest first, each as often as the rest can still complete the gap.
inline Word gap_fill_word(const std::vector<Word>& names, const std::vector<std::int64_t>& heights, std::int64_t gap,
                          std::int64_t cap = default_word_cap) {
    require(!names.empty() && names.size() == heights.size(), "gap_fill_word: one name per height");
    require(gap >= 0 && gap <= cap, "gap_fill_word: gap outside [0, cap]");
    std::int64_t g = 0;
    for (std::size_t i = 0; i < heights.size(); ++i) {
        require(heights[i] >= 1 && static_cast<std::int64_t>(names[i].size()) == heights[i],
                "gap_fill_word: name length must equal its height");
        g = std::gcd(g, heights[i]);
    }
    require(g == 1, "gap_fill_word: heights are not coprime");

    std::vector<std::size_t> order(heights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return heights[a] > heights[b]; });
    // reach[i][v]: v is a sum of heights order[i..]
    const auto n = order.size();
    std::vector<std::vector<char>> reach(n + 1, std::vector<char>(static_cast<std::size_t>(gap) + 1, 0));
    reach[n][0] = 1;
    for (std::size_t i = n; i-- > 0;) {
        const auto h = heights[order[i]];
        for (std::int64_t v = 0; v <= gap; ++v)
            reach[i][static_cast<std::size_t>(v)] = reach[i + 1][static_cast<std::size_t>(v)] ||
                                                    (v >= h && reach[i][static_cast<std::size_t>(v - h)]);
    }
    if (!reach[0][static_cast<std::size_t>(gap)]) {
        std::int64_t frob = 0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) frob = std::max(frob, heights[a] * heights[b]);
        throw precondition_error("gap_fill_word: gap " + std::to_string(gap) +
                                 " is not a sum of the column heights (every gap >= " + std::to_string(frob) + " is)");
    }
    Word out;
    std::int64_t left = gap;
    for (std::size_t i = 0; i < n; ++i) {
        const auto h = heights[order[i]];
        std::int64_t c = left / h;
        while (!reach[i + 1][static_cast<std::size_t>(left - c * h)]) --c;
        for (std::int64_t t = 0; t < c; ++t) out.insert(out.end(), names[order[i]].begin(), names[order[i]].end());
        left -= c * h;
    }
    return out;
}

// A word made of whole column names that contains `word` at `offset`.
struct HostWord {
    Word host;
    std::size_t offset = 0;
};

inline std::optional<std::size_t> find_factor(const Word& hay, const Word& needle) {
    auto it = std::search(hay.begin(), hay.end(), needle.begin(), needle.end());
    if (it == hay.end()) return std::nullopt;
    return static_cast<std::size_t>(it - hay.begin());
}

// Each word inside one column name, else inside the concatenation of two.
inline std::vector<HostWord> find_hosts(const std::vector<Word>& column_names, const std::vector<Word>& words) {
    std::vector<HostWord> out;
    for (const auto& w : words) {
        std::optional<HostWord> found;
        for (const auto& c : column_names)
            if (auto at = find_factor(c, w)) {
                found = HostWord{c, *at};
                break;
            }
        for (std::size_t a = 0; a < column_names.size() && !found; ++a)
            for (std::size_t b = 0; b < column_names.size() && !found; ++b) {
                const Word two = concat(column_names[a], column_names[b]);
                if (auto at = find_factor(two, w)) found = HostWord{two, *at};
            }
        require(found.has_value(), "find_hosts: word " + word_to_string(w) + " occurs in no column name or pair");
        out.push_back(*found);
    }
    return out;
}

struct PairWord {
    Word word;
    // for each ordered pair (a, b) in lexicographic order: start of words[a] and of words[b]
    std::vector<std::pair<std::int64_t, std::int64_t>> positions;
};

// For every ordered pair (a, b): host(a), filler, host(b) with words[b] starting exactly s
// after words[a]. Fillers are gap_fill_word outputs, so everything is made of column names.
inline PairWord build_pair_word(const std::vector<HostWord>& hosts, const std::vector<Word>& column_names,
                                const std::vector<std::int64_t>& heights, std::int64_t s) {
    PairWord out;
    for (std::size_t a = 0; a < hosts.size(); ++a)
        for (std::size_t b = 0; b < hosts.size(); ++b) {
            const auto& ha = hosts[a];
            const auto& hb = hosts[b];
            const auto gap = s - (static_cast<std::int64_t>(ha.host.size()) - static_cast<std::int64_t>(ha.offset)) -
                             static_cast<std::int64_t>(hb.offset);
            require(gap >= 0, "build_pair_word: distance " + std::to_string(s) + " is shorter than two host words");
            const auto start = static_cast<std::int64_t>(out.word.size());
            out.word.insert(out.word.end(), ha.host.begin(), ha.host.end());
            const Word fill = gap_fill_word(column_names, heights, gap);
            out.word.insert(out.word.end(), fill.begin(), fill.end());
            out.word.insert(out.word.end(), hb.host.begin(), hb.host.end());
            const auto pa = start + static_cast<std::int64_t>(ha.offset);
            out.positions.emplace_back(pa, pa + s);
        }
    return out;
}

// 1-based positions s*l + t, 0 <= t <= j, 1 <= s <= (h-j-2)/l.
inline std::vector<std::int64_t> stamp_positions(std::int64_t h, std::int64_t j, std::int64_t l) {
    require(l >= 1 && j >= 0, "stamp_positions: need l >= 1, j >= 0");
    std::vector<std::int64_t> out;
    if (h - j - 2 < l) return out;
    for (std::int64_t s = 1; s <= (h - j - 2) / l; ++s)
        for (std::int64_t t = 0; t <= j; ++t) out.push_back(s * l + t);
    return out;
}

inline bool stamps_hold(const Word& name, std::int64_t j, std::int64_t l) {
    for (auto pos : stamp_positions(static_cast<std::int64_t>(name.size()), j, l))
        if (name[static_cast<std::size_t>(pos - 1)] != 2) return false;
    return true;
}

// Column name after one inductive step: omega at 1-based position h, `fill` right after it
// up to position R-1, then 2 stamped at s*l + t for 0 <= t <= n+1.
inline Word prop51_column_name(Word name, const Word& omega, std::int64_t h, std::int64_t R, const Word& fill,
                               std::int64_t l, std::int64_t n) {
    const auto H = static_cast<std::int64_t>(name.size());
    const auto W = static_cast<std::int64_t>(omega.size());
    require(h >= 1 && h + W - 1 < R && R <= H, "prop51_column_name: need 1 <= h, h+|omega| <= R <= H");
    require(static_cast<std::int64_t>(fill.size()) == R - W - h, "prop51_column_name: filler must reach position R-1");
    std::copy(omega.begin(), omega.end(), name.begin() + (h - 1));
    std::copy(fill.begin(), fill.end(), name.begin() + (h - 1 + W));
    for (std::int64_t s = 1; s <= (H - n - 2) / l; ++s)
        for (std::int64_t t = 0; t <= n + 1; ++t) {
            const auto pos = s * l + t;
            if (pos <= H) name[static_cast<std::size_t>(pos - 1)] = 2;
        }
    return name;
}

// 0-based stamp levels as a window set truncated after the last run, and its certificate.
inline std::optional<ThickSyndeticCertificate> stamp_certificate(std::int64_t h, std::int64_t j, std::int64_t l) {
    const auto pos = stamp_positions(h, j, l);
    if (pos.empty()) return std::nullopt;
    std::vector<std::int64_t> zero;
    for (auto q : pos) zero.push_back(q - 1);
    return thickly_syndetic_witness(WindowSet::make(zero.back() + 1, zero), j + 1, l);
}

// mu(cyl(u) cap T^-s cyl(v)) for each requested ordered pair of words.
inline std::vector<Rational> pair_measures(const OdometerSystem& sys, const Partition& a,
                                           const std::vector<std::pair<Word, Word>>& pairs, std::int64_t s) {
    std::vector<Rational> out;
    for (const auto& [u, v] : pairs)
        out.push_back((cylinder_of_word(sys, a, u) & preimage(sys, cylinder_of_word(sys, a, v), s)).measure());
    return out;
}

// ---------------------------------------------------------------------------------------

struct Prop51Options {
    std::int64_t max_n0 = 4096;
    std::int64_t max_master_height = KrPrimeOptions{}.max_master_height;
};

struct Prop51Schedule {
    Rational eps, m0, eps0, e0;
    std::int64_t l0 = 0, n0 = 0;
};

struct StampRecord {
    std::size_t column = 0;
    std::int64_t j = 0;
    std::int64_t l = 0;
    std::vector<std::int64_t> positions;
    std::optional<ThickSyndeticCertificate> certificate;
};

struct Prop51Trace {
    Partition a_hat;
    Rational eps;
    std::int64_t depth = 0;
    Prop51Schedule schedule;
    Tower tower;
    std::vector<Word> pair_words; // positive 2-words of a_hat
    Word omega0;
    std::vector<Partition> alphas; // a_hat, alpha_0
    Rational drift;
    std::vector<Rational> witness_measures; // rho_{alpha_0}(u) per pair word
    std::vector<StampRecord> stamps;
};

namespace detail {

inline Prop51Schedule prop51_schedule(const OdometerSystem& sys, const Partition& a_hat, const Rational& eps,
                                      std::vector<Word>& words) {
    const auto k = static_cast<std::int64_t>(a_hat.size());
    const auto approx = symbolic_measure(sys, a_hat, 2);
    words = approx.support(2);
    Prop51Schedule s;
    s.eps = eps;
    s.m0 = approx.at(words.front());
    for (const auto& w : words) s.m0 = std::min(s.m0, approx.at(w));
    s.eps0 = Rational(9, 10) * std::min(eps / 3, s.m0 / 3);
    const auto floor_of = [](const Rational& x) { return static_cast<std::int64_t>(numerator_of(x) / denominator_of(x)); };
    s.l0 = floor_of(std::max(Rational(6) / s.eps0, Rational(2 * k * k))) + 1;
    s.n0 = floor_of(std::max(Rational(6 * s.l0) / s.eps0, Rational(6) / s.m0)) + 1;
    return s;
}

} // namespace detail

namespace detail {

// Level labels (0-based symbols, -1 untouched) for one step-0 column: omega_0 at the
// bottom, symbol 2 on the stamp levels.
inline std::vector<int> prop51_step0_labels(const Word& omega0, std::int64_t height, std::int64_t l0) {
    std::vector<int> label(static_cast<std::size_t>(height), -1);
    for (std::size_t j = 0; j < omega0.size() && j < label.size(); ++j) label[j] = omega0[j] - 1;
    for (std::int64_t i = 1; i * l0 <= height - 1; ++i) label[static_cast<std::size_t>(i * l0 - 1)] = 1;
    return label;
}

} // namespace detail

inline Prop51Trace prop51_adjust(const OdometerSystem& sys, const Partition& a_hat, const Rational& eps, std::int64_t depth,
                                 const Prop51Options& opt = {}) {
    require(a_hat.size() >= 2, "prop51_adjust: the partition needs at least 2 cells");
    require(eps > 0, "prop51_adjust: eps must be positive");
    require(depth >= 0, "prop51_adjust: negative depth");
    Prop51Trace tr;
    tr.a_hat = a_hat;
    tr.eps = eps;
    tr.depth = depth;
    tr.schedule = detail::prop51_schedule(sys, a_hat, eps, tr.pair_words);
    const auto& sc = tr.schedule;
    if (sc.n0 > opt.max_n0)
        throw infeasible_schedule("prop51 step 0: N_0 = " + std::to_string(sc.n0) + " > max(6 l_0/eps_0, 6/M_0) exceeds the size cap " +
                                  std::to_string(opt.max_n0));
    if (depth >= 1) {
        // s_1 > 10 N_0^2, l_1 > |w_1| + 10 N_0^2 > 20 N_0^2, eps_1 < e_0^2/3 <= 1/(3 N_0^2)
        const Integer n0 = sc.n0;
        const Integer n1 = 360 * n0 * n0 * n0 * n0;
        const Integer master = 20 * (n1 + 3 * (n0 + 1)) * (n1 + 3 * (n0 + 1));
        if (master > Integer(opt.max_master_height))
            throw infeasible_schedule("prop51 step 1: N_1 > 6 l_1/eps_1 > 360 N_0^4 = " + n1.str() +
                                      ", so the K-R tower needs a master height of at least 20(N_1+3N_0)^2 = " + master.str() +
                                      ", above the cap " + std::to_string(opt.max_master_height));
    }

    tr.tower = tower_n1n2(sys, sc.n0, sc.n0 + 1);
    tr.schedule.e0 = tr.tower.columns[0].base.measure() + tr.tower.columns[1].base.measure();
    for (const auto& w : tr.pair_words) tr.omega0.insert(tr.omega0.end(), w.begin(), w.end());
    require(static_cast<std::int64_t>(tr.omega0.size()) < sc.l0, "prop51 step 0: omega_0 reaches the first stamp");

    std::vector<LevelPaint> jobs;
    for (const auto& col : tr.tower.columns) {
        auto sets = orbit_buckets(sys, col.base, detail::prop51_step0_labels(tr.omega0, col.height, sc.l0), a_hat.size());
        for (std::size_t s = 0; s < sets.size(); ++s) jobs.push_back({std::move(sets[s]), static_cast<int>(s) + 1});
    }
    tr.alphas = {a_hat, repaint(a_hat, jobs)};
    tr.drift = partition_metric(a_hat, tr.alphas[1]);
    require(tr.drift < sc.eps0, "prop51 step 0: drift bound violated");

    std::vector<std::pair<Word, Word>> pairs;
    for (const auto& w : tr.pair_words) pairs.push_back({Word{w[0]}, Word{w[1]}});
    tr.witness_measures = pair_measures(sys, tr.alphas[1], pairs, 1);

    for (std::size_t c = 0; c < tr.tower.columns.size(); ++c) {
        const auto h = tr.tower.columns[c].height;
        tr.stamps.push_back({c, 0, sc.l0, stamp_positions(h, 0, sc.l0), stamp_certificate(h, 0, sc.l0)});
    }
    return tr;
}

struct Prop51Checks {
    std::vector<std::string> problems;
    Rational min_witness;       // smallest product of two pair measures
    Rational threshold;         // e_0^2
    bool strict = false;        // min_witness > e_0^2
};

inline Prop51Checks verify_prop51(const OdometerSystem& sys, const Prop51Trace& tr) {
    Prop51Checks out;
    auto check = [&](bool ok, const std::string& what) {
        if (!ok) out.problems.push_back(what);
    };
    std::vector<Word> words;
    const auto sc = detail::prop51_schedule(sys, tr.a_hat, tr.eps, words);
    check(words == tr.pair_words, "pair words differ");
    check(sc.m0 == tr.schedule.m0 && sc.eps0 == tr.schedule.eps0 && sc.l0 == tr.schedule.l0 && sc.n0 == tr.schedule.n0,
          "schedule constants differ from the recomputation");
    check(sc.eps0 < tr.eps / 3 && sc.eps0 < sc.m0 / 3, "eps_0 bound");
    check(Rational(sc.l0) > Rational(6) / sc.eps0 && sc.l0 > 2 * static_cast<std::int64_t>(tr.a_hat.size() * tr.a_hat.size()), "l_0 bound");
    check(Rational(sc.n0) > Rational(6 * sc.l0) / sc.eps0 && Rational(sc.n0) > Rational(6) / sc.m0, "N_0 bound");
    check(tr.alphas.size() == 2 && tr.alphas[0] == tr.a_hat, "partition list");
    if (!out.problems.empty()) return out;
    check(tr.tower == tower_n1n2(sys, sc.n0, sc.n0 + 1), "tower differs from the (N_0, N_0+1) tower");
    const Rational e0 = tr.tower.columns[0].base.measure() + tr.tower.columns[1].base.measure();
    check(e0 == tr.schedule.e0, "e_0 differs");
    Word omega;
    for (const auto& w : words) omega.insert(omega.end(), w.begin(), w.end());
    check(omega == tr.omega0, "omega_0 differs");
    if (!out.problems.empty()) return out;

    const Partition& a0 = tr.alphas[1];
    const Rational d = partition_metric(tr.a_hat, a0);
    check(d == tr.drift, "recorded drift differs");
    check(d < sc.eps0, "d(a_hat, alpha_0) is not below eps_0");
    // everything that moved lies on the painted levels
    std::vector<IntervalSet> painted;
    for (const auto& col : tr.tower.columns) {
        std::vector<int> label(static_cast<std::size_t>(col.height), -1);
        for (std::size_t j = 0; j < omega.size() && j < label.size(); ++j) label[j] = omega[j] - 1;
        const auto word_sets = orbit_buckets(sys, col.base, label, a0.size());
        for (std::size_t s = 0; s < a0.size(); ++s) {
            check(is_subset(word_sets[s], a0.cell(s)), "omega_0 is not painted on the tower");
            painted.push_back(word_sets[s]);
        }
        std::vector<int> stamp(static_cast<std::size_t>(col.height), -1);
        for (std::int64_t i = 1; i * sc.l0 <= col.height - 1; ++i) stamp[static_cast<std::size_t>(i * sc.l0 - 1)] = 0;
        painted.push_back(orbit_buckets(sys, col.base, stamp, 1)[0]);
    }
    const IntervalSet moved = unite_all(painted);
    for (std::size_t s = 0; s < a0.size(); ++s) check(is_subset(a0.cell(s) ^ tr.a_hat.cell(s), moved), "alpha_0 moved off the painted levels");

    // (1)_0: the 2-cylinders of every positive pair word have measure at least e_0
    const auto approx = symbolic_measure(sys, a0, 2);
    check(tr.witness_measures.size() == words.size(), "witness count");
    out.threshold = e0 * e0;
    out.min_witness = -1;
    for (std::size_t i = 0; i < words.size() && i < tr.witness_measures.size(); ++i) {
        const Rational r = approx.at(words[i]);
        check(r == tr.witness_measures[i], "witness measure for " + word_to_string(words[i]) + " differs");
        for (std::size_t q = 0; q < words.size(); ++q) {
            const Rational prod = r * approx.at(words[q]);
            if (out.min_witness < 0 || prod < out.min_witness) out.min_witness = prod;
        }
    }
    check(out.min_witness >= out.threshold, "(1)_0 witness below e_0^2");
    out.strict = out.min_witness > out.threshold;

    // (2)_0: whole stamp levels inside A_2, hence in every refined column name
    check(tr.stamps.size() == tr.tower.columns.size(), "stamp record count");
    for (const auto& st : tr.stamps) {
        if (st.column >= tr.tower.columns.size()) {
            check(false, "stamp record column");
            continue;
        }
        const Column& col = tr.tower.columns[st.column];
        check(st.j == 0 && st.l == sc.l0, "stamp parameters");
        check(st.positions == stamp_positions(col.height, 0, sc.l0), "stamp positions differ");
        for (auto pos : st.positions) check(is_subset(image(sys, col.base, pos - 1), a0.cell(1)), "stamp level not inside A_2");
        const auto cert = stamp_certificate(col.height, 0, sc.l0);
        check(cert.has_value() && cert == st.certificate, "thickly syndetic certificate differs");
    }
    return out;
}

} // namespace ktower
