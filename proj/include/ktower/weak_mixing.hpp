#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "detectors.hpp"
#include "errors.hpp"
#include "partition.hpp"
#include "symbolic.hpp"
#include "tower.hpp"

namespace ktower {

// A column that received a name during an adjustment step. `slot` runs 1..m+1 inside
// a family; slot m+1 carries the mixing word, the others the repeated odd words.
struct PaintedColumn {
    std::int64_t step = 0;
    std::int64_t family = 1;
    std::int64_t slot = 0;
    std::size_t alphabet = 0;
    Column column;
    Word name;
};

struct WitnessRecord {
    std::int64_t m = 0;
    Word e1, f1, e2, f2;
    std::int64_t e_level = 0;
    std::int64_t f_level = 0;
    Rational witness;
};

struct VisitRecord {
    std::int64_t m = 0;
    std::int64_t j = 0;
    std::int64_t r = 0; // 1-based rank of the (2m-1)-word in lexicographic order
    std::size_t column = 0;
    std::vector<std::int64_t> positions;
};

struct Prop42Options {
    std::int64_t max_iterations = 40;
    std::int64_t max_height = std::int64_t{1} << 22;
};

struct Prop42Trace {
    Partition a_hat;
    Rational eps;
    std::int64_t depth = 0;
    int base_exponent = 0;
    std::int64_t iterations = 0;
    Tower tower;
    std::vector<Partition> alphas;
    std::vector<PaintedColumn> painted;
    std::vector<Rational> drifts;
    std::vector<WitnessRecord> witnesses;
    std::vector<VisitRecord> visits;
};

inline Integer mixing_height_bound(std::int64_t m, std::size_t k) {
    return 2 * Integer(m) * Integer(m) * ipow(static_cast<std::int64_t>(k), 2 * m);
}

inline Word pad_with_ones(Word w, std::int64_t height) {
    require(static_cast<std::int64_t>(w.size()) <= height, "pad_with_ones: word longer than column");
    w.resize(static_cast<std::size_t>(height), 1);
    return w;
}

// (omega_{2i-1})^reps followed by 1s, or omega_{2m} followed by 1s for the mixing slot.
inline Word slot_name(std::size_t k, std::int64_t m, std::int64_t slot, std::int64_t reps, std::int64_t height) {
    const int kk = static_cast<int>(k);
    if (slot == m + 1) return pad_with_ones(universal_word(kk, static_cast<int>(2 * m)), height);
    return pad_with_ones(repeat(universal_word(kk, static_cast<int>(2 * slot - 1)), static_cast<std::size_t>(reps)), height);
}

namespace detail {

inline Rational column_mass(const Column& c) { return c.base.measure() * Rational(c.height); }

// The `count` unused columns of smallest carrier among those taller than `above`,
// returned by increasing height. Empty when the total carrier is not below `budget`.
inline std::optional<std::vector<std::size_t>> pick_columns(const Tower& t, const std::vector<bool>& used,
                                                            std::size_t count, const Integer& above,
                                                            const Rational& budget) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (!used[i] && Integer(t.columns[i].height) > above) pool.push_back(i);
    if (pool.size() < count) return std::nullopt;
    std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
        return column_mass(t.columns[a]) < column_mass(t.columns[b]);
    });
    pool.resize(count);
    Rational mass = 0;
    for (auto i : pool) mass += column_mass(t.columns[i]);
    if (mass >= budget) return std::nullopt;
    std::sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) { return t.columns[a].height < t.columns[b].height; });
    return pool;
}

inline int exponent_above(std::int64_t p, const Integer& bound) {
    int r = 0;
    while (ipow(p, r) <= bound) ++r;
    return r;
}

inline bool name_on_column(const OdometerSystem& sys, const Partition& a, const Column& c, const Word& name) {
    if (static_cast<std::int64_t>(name.size()) != c.height) return false;
    std::vector<int> label;
    for (int s : name) {
        if (s < 1 || static_cast<std::size_t>(s) > a.size()) return false;
        label.push_back(s - 1);
    }
    // the levels are disjoint, so each level sits in its cell iff every symbol's union does
    const auto sets = orbit_buckets(sys, c.base, label, a.size());
    for (std::size_t s = 0; s < a.size(); ++s)
        if (!is_subset(sets[s], a.cell(s))) return false;
    return true;
}

inline std::vector<std::int64_t> visit_positions(std::size_t k, std::int64_t m, std::int64_t j, std::int64_t r) {
    const auto block = (2 * m - 1) * static_cast<std::int64_t>(ipow(static_cast<std::int64_t>(k), 2 * m - 1));
    std::vector<std::int64_t> out;
    for (std::int64_t i = 0; i < j; ++i) out.push_back(i * block + (2 * m - 1) * (r - 1) + m - 1);
    return out;
}

} // namespace detail

inline Prop42Trace prop42_adjust(const OdometerSystem& sys, const Partition& a_hat, const Rational& eps, std::int64_t depth,
                                 const Prop42Options& opt = {}) {
    const std::size_t k = a_hat.size();
    require(k >= 2, "prop42_adjust: the partition needs at least 2 cells");
    require(eps > 0, "prop42_adjust: eps must be positive");
    require(depth >= 0, "prop42_adjust: negative depth");
    Prop42Trace tr;
    tr.a_hat = a_hat;
    tr.eps = eps;
    tr.depth = depth;
    tr.alphas.push_back(a_hat);
    if (depth == 0) return tr;

    const std::int64_t p = sys.base();
    tr.base_exponent = detail::exponent_above(p, mixing_height_bound(depth, k));
    const IntervalSet b0 = IntervalSet::interval(0, Rational(Integer(1), ipow(p, tr.base_exponent)));
    const std::int64_t needed = depth * (depth + 3) / 2;

    std::vector<std::vector<std::size_t>> choice;
    for (std::int64_t it = needed + 1;; ++it) {
        if (it > opt.max_iterations)
            throw budget_error("increase iterate budget: " + std::to_string(opt.max_iterations) +
                               " iterations do not leave enough small tall columns for depth " + std::to_string(depth));
        const auto res = infinite_heights_iterate(sys, b0, it, opt.max_height);
        std::vector<bool> used(res.tower.columns.size(), false);
        choice.clear();
        bool ok = true;
        for (std::int64_t m = 1; m <= depth && ok; ++m) {
            const auto pick = detail::pick_columns(res.tower, used, static_cast<std::size_t>(m + 1),
                                                   mixing_height_bound(m, k), eps / Rational(Integer(1) << m));
            if (!pick) {
                ok = false;
                break;
            }
            for (auto i : *pick) used[i] = true;
            choice.push_back(*pick);
        }
        if (ok) {
            tr.iterations = it;
            tr.tower = res.tower;
            break;
        }
    }

    for (std::int64_t m = 1; m <= depth; ++m) {
        std::vector<std::pair<Column, Word>> jobs;
        const auto& pick = choice[static_cast<std::size_t>(m - 1)];
        for (std::size_t s = 0; s < pick.size(); ++s) {
            const Column& c = tr.tower.columns[pick[s]];
            const auto slot = static_cast<std::int64_t>(s) + 1;
            PaintedColumn pc{m, 1, slot, k, c, slot_name(k, m, slot, m, c.height)};
            jobs.emplace_back(c, pc.name);
            tr.painted.push_back(std::move(pc));
        }
        tr.alphas.push_back(copy_names(sys, tr.alphas.back(), jobs));
        tr.drifts.push_back(partition_metric(tr.alphas[static_cast<std::size_t>(m - 1)], tr.alphas.back()));
        require(tr.drifts.back() < eps / Rational(Integer(1) << m), "prop42_adjust: step drift bound violated");
    }

    const Partition& last = tr.alphas.back();
    for (std::int64_t m = 1; m <= depth; ++m) {
        const PaintedColumn* mix = nullptr;
        for (const auto& pc : tr.painted)
            if (pc.step == m && pc.slot == m + 1) mix = &pc;
        const Rational slice = mix->column.base.measure();
        const auto approx = symbolic_measure(sys, last, m);
        const auto cyl = approx.support(static_cast<std::size_t>(m));
        for (const auto& e1 : cyl)
            for (const auto& f1 : cyl)
                for (const auto& e2 : cyl)
                    for (const auto& f2 : cyl) {
                        const auto s = static_cast<std::int64_t>(word_rank(concat(e1, e2), k));
                        const auto t = static_cast<std::int64_t>(word_rank(concat(f1, f2), k));
                        tr.witnesses.push_back({m, e1, f1, e2, f2, 2 * m * s, 2 * m * t, slice * slice});
                    }
    }

    const auto count = [&](std::int64_t m) { return static_cast<std::int64_t>(ipow(static_cast<std::int64_t>(k), 2 * m - 1)); };
    for (std::int64_t m = 1; m <= depth; ++m)
        for (std::int64_t j = m; j <= depth; ++j)
            for (std::size_t c = 0; c < tr.painted.size(); ++c) {
                if (tr.painted[c].step != j || tr.painted[c].slot != m) continue;
                for (std::int64_t r = 1; r <= count(m); ++r)
                    tr.visits.push_back({m, j, r, c, detail::visit_positions(k, m, j, r)});
            }
    return tr;
}

// Independent re-derivation of every claim in a Prop42Trace. Returns the list of problems.
inline std::vector<std::string> verify_prop42(const OdometerSystem& sys, const Prop42Trace& tr) {
    std::vector<std::string> bad;
    auto check = [&](bool ok, const std::string& what) {
        if (!ok) bad.push_back(what);
    };
    const std::size_t k = tr.a_hat.size();
    check(tr.eps > 0, "eps is not positive");
    check(static_cast<std::int64_t>(tr.alphas.size()) == tr.depth + 1, "expected depth+1 partitions");
    if (!bad.empty()) return bad;
    check(tr.alphas.front() == tr.a_hat, "alpha_0 differs from the input partition");
    if (tr.depth == 0) {
        check(tr.painted.empty() && tr.witnesses.empty(), "depth 0 trace carries steps");
        return bad;
    }
    check(tower_is_valid(sys, tr.tower), "tower levels overlap");
    check(tr.base_exponent == detail::exponent_above(sys.base(), mixing_height_bound(tr.depth, k)), "base exponent");
    check(static_cast<std::int64_t>(tr.drifts.size()) == tr.depth, "drift count");

    for (std::int64_t m = 1; m <= tr.depth; ++m) {
        const auto mi = static_cast<std::size_t>(m);
        const Rational budget = tr.eps / Rational(Integer(1) << m);
        std::vector<std::pair<Column, Word>> jobs;
        Rational mass = 0;
        std::int64_t last_height = 0;
        for (const auto& pc : tr.painted) {
            if (pc.step != m) continue;
            check(std::find(tr.tower.columns.begin(), tr.tower.columns.end(), pc.column) != tr.tower.columns.end(),
                  "painted column is not a tower column");
            check(Integer(pc.column.height) > mixing_height_bound(m, k), "painted column too short");
            check(pc.column.height > last_height, "heights within a step must increase");
            last_height = pc.column.height;
            check(pc.name == slot_name(k, m, pc.slot, m, pc.column.height), "painted name differs from the recipe");
            mass += detail::column_mass(pc.column);
            jobs.emplace_back(pc.column, pc.name);
        }
        check(static_cast<std::int64_t>(jobs.size()) == m + 1, "step " + std::to_string(m) + " must paint m+1 columns");
        check(mass < budget, "step " + std::to_string(m) + " carrier is not below eps/2^m");
        if (!bad.empty()) return bad;
        check(copy_names(sys, tr.alphas[mi - 1], jobs) == tr.alphas[mi], "alpha_" + std::to_string(m) + " is not the painted partition");
        const Rational d = partition_metric(tr.alphas[mi - 1], tr.alphas[mi]);
        check(d == tr.drifts[mi - 1], "recorded drift at step " + std::to_string(m) + " is wrong");
        check(d < budget, "drift at step " + std::to_string(m) + " is not below eps/2^m");
    }
    const Partition& last = tr.alphas.back();
    check(partition_metric(tr.a_hat, last) < tr.eps, "d(a_hat, alpha_M) is not below eps");
    for (const auto& pc : tr.painted) check(detail::name_on_column(sys, last, pc.column, pc.name), "final partition loses a painted name");

    std::size_t w = 0;
    for (std::int64_t m = 1; m <= tr.depth; ++m) {
        const PaintedColumn* mix = nullptr;
        for (const auto& pc : tr.painted)
            if (pc.step == m && pc.slot == m + 1) mix = &pc;
        if (!mix) {
            bad.push_back("no mixing column at step " + std::to_string(m));
            return bad;
        }
        const auto approx = symbolic_measure(sys, last, 2 * m);
        const auto cyl = approx.support(static_cast<std::size_t>(m));
        const auto tuples = cyl.size() * cyl.size() * cyl.size() * cyl.size();
        for (std::size_t q = 0; q < tuples; ++q, ++w) {
            if (w >= tr.witnesses.size()) {
                bad.push_back("missing witnesses at m=" + std::to_string(m));
                return bad;
            }
            const auto& wr = tr.witnesses[w];
            check(wr.m == m, "witness order");
            const Word ee = concat(wr.e1, wr.e2), ff = concat(wr.f1, wr.f2);
            const Rational direct = approx.at(ee) * approx.at(ff);
            const Rational slice = mix->column.base.measure();
            check(wr.witness == slice * slice, "witness value is not the squared slice measure");
            check(wr.e_level + 2 * m <= mix->column.height && wr.f_level + 2 * m <= mix->column.height, "witness level outside column");
            check(std::equal(ee.begin(), ee.end(), mix->name.begin() + wr.e_level) &&
                      std::equal(ff.begin(), ff.end(), mix->name.begin() + wr.f_level),
                  "witness levels do not carry the cylinder names");
            check(wr.witness > 0 && direct >= wr.witness, "witness measure not confirmed by direct computation");
        }
    }
    check(w == tr.witnesses.size(), "extra witnesses");

    for (const auto& v : tr.visits) {
        if (v.column >= tr.painted.size()) {
            bad.push_back("visit refers to a missing column");
            continue;
        }
        const auto& pc = tr.painted[v.column];
        check(pc.step == v.j && pc.slot == v.m, "visit column mismatch");
        check(v.positions == detail::visit_positions(k, v.m, v.j, v.r), "visit positions differ from the formula");
        const Word target = word_of_rank(static_cast<std::size_t>(v.r - 1), k, static_cast<std::size_t>(2 * v.m - 1));
        for (auto pos : v.positions) {
            const auto start = pos - (v.m - 1);
            IntervalSet level = image(sys, pc.column.base, start);
            for (std::size_t d = 0; d < target.size(); ++d) {
                check(is_subset(level, last.cell(static_cast<std::size_t>(target[d] - 1))), "visit level outside its cylinder");
                level = image(sys, level, 1);
            }
        }
        const auto g = (2 * v.m - 1) * static_cast<std::int64_t>(ipow(static_cast<std::int64_t>(k), 2 * v.m - 1));
        const auto ws = WindowSet::make(pc.column.height, v.positions);
        check(piecewise_syndetic_witness(ws, g, (v.j - 1) * g + 1).has_value(), "visit positions are not a piecewise syndetic block");
    }
    return bad;
}

// ---------------------------------------------------------------------------------------
// Triangular array gamma_k^n.

enum class ModelVariant { prop44, prop52 };

struct ModelSequence {
    ModelVariant variant = ModelVariant::prop44;
    std::int64_t depth = 0;
    std::vector<Partition> betas_in;
    std::vector<Rational> eps_seq;
    std::vector<Partition> betas;              // after the joins, betas[n-1] is beta_n
    std::vector<std::vector<Partition>> gamma; // gamma[n-1][k-1] is gamma_k^n
    int base_exponent = 0;
    std::int64_t iterations = 0;
    Tower tower;
    std::vector<PaintedColumn> painted;
};

// beta v gamma without empty cells; cell i (i < |gamma|) is a piece of gamma's cell i, so
// symbols keep their meaning when read through gamma.
inline Partition aligned_join(const Partition& beta, const Partition& gamma) {
    std::vector<IntervalSet> head(gamma.size()), tail;
    std::vector<bool> placed(gamma.size(), false);
    for (std::size_t b = 0; b < beta.size(); ++b)
        for (std::size_t g = 0; g < gamma.size(); ++g) {
            IntervalSet c = beta.cell(b) & gamma.cell(g);
            if (c.empty()) continue;
            if (!placed[g]) {
                head[g] = std::move(c);
                placed[g] = true;
            } else {
                tail.push_back(std::move(c));
            }
        }
    for (std::size_t g = 0; g < gamma.size(); ++g) require(placed[g], "aligned_join: empty cell in the coarser partition");
    head.insert(head.end(), std::make_move_iterator(tail.begin()), std::make_move_iterator(tail.end()));
    return Partition(std::move(head));
}

struct ModelOptions {
    std::int64_t max_iterations = 40;
    std::int64_t max_height = std::int64_t{1} << 22;
};

namespace detail {

struct StepPick {
    std::vector<std::vector<std::size_t>> families;
};

} // namespace detail

inline ModelSequence build_model_sequence_prop44(const OdometerSystem& sys, const std::vector<Partition>& betas,
                                                 const std::vector<Rational>& eps_seq, std::int64_t depth,
                                                 const ModelOptions& opt = {}) {
    require(depth >= 1, "build_model_sequence: depth must be >= 1");
    require(static_cast<std::int64_t>(betas.size()) >= depth, "build_model_sequence: need one beta per level");
    require(static_cast<std::int64_t>(eps_seq.size()) >= depth, "build_model_sequence: need one eps per level");
    for (std::int64_t n = 0; n < depth; ++n) {
        require(eps_seq[static_cast<std::size_t>(n)] > 0, "build_model_sequence: eps must be positive");
        require(betas[static_cast<std::size_t>(n)].size() >= 2, "build_model_sequence: every beta needs at least 2 cells");
    }
    // cell counts after the joins are at most these products
    std::vector<std::size_t> kbound;
    std::size_t acc = 1;
    for (std::int64_t n = 0; n < depth; ++n) kbound.push_back(acc *= betas[static_cast<std::size_t>(n)].size());
    Integer tallest = 0;
    for (std::int64_t m = 1; m <= depth; ++m)
        tallest = std::max(tallest, mixing_height_bound(m, kbound[static_cast<std::size_t>(m - 1)]));

    const std::int64_t p = sys.base();
    const int r = detail::exponent_above(p, tallest);
    const IntervalSet b0 = IntervalSet::interval(0, Rational(Integer(1), ipow(p, r)));
    std::int64_t needed = 0;
    for (std::int64_t m = 1; m <= depth; ++m) needed += m * (m + 1);

    for (std::int64_t it = needed + 1; it <= opt.max_iterations; ++it) {
        const auto res = infinite_heights_iterate(sys, b0, it, opt.max_height);
        ModelSequence out;
        out.variant = ModelVariant::prop44;
        out.depth = depth;
        out.betas_in.assign(betas.begin(), betas.begin() + depth);
        out.eps_seq.assign(eps_seq.begin(), eps_seq.begin() + depth);
        out.base_exponent = r;
        out.iterations = it;
        out.tower = res.tower;
        std::vector<bool> used(res.tower.columns.size(), false);
        bool ok = true;
        for (std::int64_t m = 1; m <= depth && ok; ++m) {
            const auto mi = static_cast<std::size_t>(m - 1);
            out.betas.push_back(m == 1 ? betas[0] : aligned_join(betas[mi], out.gamma.back().back()));
            std::vector<std::size_t> sizes;
            for (std::int64_t j = 1; j <= m; ++j) sizes.push_back(out.betas[static_cast<std::size_t>(j - 1)].size());
            // families share one carrier budget eps_m
            std::vector<std::vector<std::size_t>> fam;
            Rational mass = 0;
            for (std::int64_t j = 1; j <= m && ok; ++j) {
                const auto pick = detail::pick_columns(res.tower, used, static_cast<std::size_t>(m + 1),
                                                       mixing_height_bound(m, sizes[static_cast<std::size_t>(j - 1)]),
                                                       eps_seq[mi]);
                if (!pick) ok = false;
                else {
                    for (auto i : *pick) {
                        used[i] = true;
                        mass += detail::column_mass(res.tower.columns[i]);
                    }
                    fam.push_back(*pick);
                }
            }
            if (!ok || mass >= eps_seq[mi]) {
                ok = false;
                break;
            }
            std::vector<std::pair<Column, Word>> jobs;
            for (std::int64_t j = 1; j <= m; ++j)
                for (std::size_t s = 0; s < fam[static_cast<std::size_t>(j - 1)].size(); ++s) {
                    const Column& c = res.tower.columns[fam[static_cast<std::size_t>(j - 1)][s]];
                    const auto slot = static_cast<std::int64_t>(s) + 1;
                    const std::size_t kj = sizes[static_cast<std::size_t>(j - 1)];
                    PaintedColumn pc{m, j, slot, kj, c, slot_name(kj, m, slot, m - j, c.height)};
                    jobs.emplace_back(c, pc.name);
                    out.painted.push_back(std::move(pc));
                }
            const Partition top = copy_names(sys, out.betas.back(), jobs);
            require(partition_metric(out.betas.back(), top) < eps_seq[mi], "build_model_sequence: step drift bound violated");
            std::vector<Partition> row;
            for (std::int64_t kk = 1; kk < m; ++kk)
                row.push_back(transfer_refinement(out.betas.back(), top, out.gamma.back()[static_cast<std::size_t>(kk - 1)]));
            row.push_back(top);
            out.gamma.push_back(std::move(row));
        }
        if (ok) return out;
    }
    throw budget_error("increase iterate budget: " + std::to_string(opt.max_iterations) +
                       " iterations do not leave enough small tall columns for depth " + std::to_string(depth));
}

struct ModelChecks {
    std::vector<std::string> problems;
    std::vector<std::pair<std::pair<std::int64_t, std::int64_t>, Rational>> cauchy;   // ((n,k), d(gamma_k^n, gamma_k^{n-1}))
    std::vector<std::pair<std::int64_t, Rational>> to_beta;                            // (k, d(gamma_k^M, beta_k))
};

// Recomputes the array from its inputs and checks every exact property of the rows.
inline ModelChecks verify_model_sequence_prop44(const OdometerSystem& sys, const ModelSequence& s) {
    ModelChecks out;
    auto check = [&](bool ok, const std::string& what) {
        if (!ok) out.problems.push_back(what);
    };
    const auto M = s.depth;
    check(static_cast<std::int64_t>(s.gamma.size()) == M && static_cast<std::int64_t>(s.betas.size()) == M, "array shape");
    check(static_cast<std::int64_t>(s.eps_seq.size()) == M && static_cast<std::int64_t>(s.betas_in.size()) == M, "input shape");
    if (!out.problems.empty()) return out;
    check(tower_is_valid(sys, s.tower), "tower levels overlap");
    for (std::int64_t n = 1; n <= M; ++n) {
        const auto ni = static_cast<std::size_t>(n - 1);
        check(static_cast<std::int64_t>(s.gamma[ni].size()) == n, "row length");
        if (!out.problems.empty()) return out;
        const Partition expect_beta = n == 1 ? s.betas_in[0] : aligned_join(s.betas_in[ni], s.gamma[ni - 1].back());
        check(expect_beta == s.betas[ni], "beta_" + std::to_string(n) + " is not the aligned join");
        std::vector<std::pair<Column, Word>> jobs;
        Rational mass = 0;
        for (const auto& pc : s.painted) {
            if (pc.step != n) continue;
            check(std::find(s.tower.columns.begin(), s.tower.columns.end(), pc.column) != s.tower.columns.end(),
                  "painted column is not a tower column");
            check(pc.alphabet == s.betas[static_cast<std::size_t>(pc.family - 1)].size(), "family alphabet");
            check(Integer(pc.column.height) > mixing_height_bound(n, pc.alphabet), "painted column too short");
            check(pc.name == slot_name(pc.alphabet, n, pc.slot, n - pc.family, pc.column.height), "painted name differs from the recipe");
            mass += detail::column_mass(pc.column);
            jobs.emplace_back(pc.column, pc.name);
        }
        check(static_cast<std::int64_t>(jobs.size()) == n * (n + 1), "step " + std::to_string(n) + " must paint n(n+1) columns");
        check(mass < s.eps_seq[ni], "carrier of step " + std::to_string(n) + " is not below eps_n");
        if (!out.problems.empty()) return out;
        check(copy_names(sys, s.betas[ni], jobs) == s.gamma[ni].back(), "gamma_n^n is not the painted beta_n");
        check(partition_metric(s.betas[ni], s.gamma[ni].back()) < s.eps_seq[ni], "d(beta_n, gamma_n^n) is not below eps_n");
        for (std::int64_t k = 1; k < n; ++k) {
            const auto ki = static_cast<std::size_t>(k - 1);
            check(transfer_refinement(s.betas[ni], s.gamma[ni].back(), s.gamma[ni - 1][ki]) == s.gamma[ni][ki],
                  "gamma_k^n is not the transferred gamma_k^{n-1}");
            const Rational d = partition_metric(s.gamma[ni][ki], s.gamma[ni - 1][ki]);
            out.cauchy.push_back({{n, k}, d});
            check(d < s.eps_seq[ni], "d(gamma_k^n, gamma_k^{n-1}) is not below eps_n");
        }
        for (std::int64_t k = 1; k < n; ++k)
            check(refines(s.gamma[ni][static_cast<std::size_t>(k)], s.gamma[ni][static_cast<std::size_t>(k - 1)]),
                  "gamma_" + std::to_string(k + 1) + "^" + std::to_string(n) + " does not refine gamma_" + std::to_string(k));
    }
    Rational total = 0;
    for (const auto& e : s.eps_seq) total += e;
    for (std::int64_t k = 1; k <= M; ++k) {
        const Rational d = partition_metric(s.gamma.back()[static_cast<std::size_t>(k - 1)], s.betas[static_cast<std::size_t>(k - 1)]);
        out.to_beta.push_back({k, d});
        check(d < total, "d(gamma_k^M, beta_k) is not below the eps sum");
    }
    // each family keeps its painted name when read through its own row
    for (const auto& pc : s.painted)
        check(detail::name_on_column(sys, s.gamma.back()[static_cast<std::size_t>(pc.family - 1)], pc.column, pc.name),
              "family " + std::to_string(pc.family) + " lost its name from step " + std::to_string(pc.step));
    return out;
}

} // namespace ktower
