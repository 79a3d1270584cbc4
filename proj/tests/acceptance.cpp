// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any line fails.
// Usage: acceptance <path to ktower-cli>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <ktower/constructions.hpp>
#include <ktower/json_io.hpp>
#include <ktower/kr_prime.hpp>

#include "detector_oracles.hpp"
#include "oracles.hpp"

using namespace ktower;
namespace fs = std::filesystem;

namespace {

Rational R(long long a, long long b = 1) { return Rational(Integer(a), Integer(b)); }
IntervalSet I(Rational lo, Rational hi) { return IntervalSet::interval(lo, hi); }

// A criterion body returns "" on success or the first thing that went wrong.
using Body = std::function<std::string(std::string& detail)>;

int failures = 0;

void run(int number, const std::string& title, const Body& body) {
    const auto started = std::chrono::steady_clock::now();
    std::string detail, why;
    try {
        why = body(detail);
    } catch (const std::exception& e) {
        why = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::ostringstream line;
    line << (why.empty() ? "[PASS]" : "[FAIL]") << " criterion " << number << ": " << title;
    if (!detail.empty()) line << " | " << detail;
    if (!why.empty()) line << " | " << why;
    line.setf(std::ios::fixed);
    line.precision(1);
    line << " (" << secs << " s)";
    std::cout << line.str() << std::endl;
    if (!why.empty()) ++failures;
}

std::string str(const Rational& r) { return to_string(r); }

// ---- 1 ----------------------------------------------------------------------------------

std::string exact_dynamics(std::string& detail) {
    std::mt19937_64 rng(20261016);
    int grid_checked = 0;
    for (std::int64_t p : {2, 3}) {
        const OdometerSystem sys(p);
        std::uniform_int_distribution<std::int64_t> steps(-64, 64);
        for (int i = 0; i < 200; ++i) {
            const bool on_grid = i % 2 == 0;
            const IntervalSet a = on_grid ? oracle::random_grid_set(rng, p, 4) : oracle::random_rational_set(rng, 1 + i % 7, 200);
            const auto s = steps(rng);
            const IntervalSet b = image(sys, a, s);
            if (b.measure() != a.measure()) return "measure changed for " + a.str() + " at s=" + std::to_string(s);
            if (image(sys, b, -s) != a) return "round trip failed for " + a.str() + " at s=" + std::to_string(s);
            if (on_grid) {
                if (b != oracle::image_by_cells(a, p, 4, s)) return "cell oracle disagrees for " + a.str();
                ++grid_checked;
            }
        }
    }
    detail = "400 sets, |s| <= 64, " + std::to_string(grid_checked) + " also matched the digit oracle";
    return "";
}

// ---- 2 ----------------------------------------------------------------------------------

std::string cylinder_periodicity(std::string& detail) {
    int count = 0;
    for (auto [p, max_len] : {std::pair<std::int64_t, int>{2, 8}, {3, 5}}) {
        const OdometerSystem sys(p);
        for (int len = 1; len <= max_len; ++len) {
            const auto total = static_cast<std::int64_t>(ipow(p, len));
            for (std::int64_t q = 0; q < total; ++q) {
                const auto d = oracle::cell_digits(q, len, p);
                const Word digits(d.begin(), d.end());
                const IntervalSet c = cylinder_set(sys, digits);
                if (image(sys, c, total) != c) return "T^(p^|C|) moves cylinder " + word_to_string(digits) + " (p=" + std::to_string(p) + ")";
                ++count;
            }
        }
    }
    detail = std::to_string(count) + " cylinders";
    return "";
}

// ---- 3 ----------------------------------------------------------------------------------

std::string kac_identity(std::string& detail) {
    std::mt19937_64 rng(7);
    const OdometerSystem two(2);
    std::int64_t tallest = 0;
    for (int i = 0; i < 50; ++i) {
        IntervalSet b;
        while (b.empty()) b = oracle::random_grid_set(rng, 2, 5, 0.15 + 0.015 * i);
        const Tower t = kakutani_tower(two, b, 64);
        if (kac_sum(t) != 1) return "sum k mu(B_k) = " + str(kac_sum(t)) + " for " + b.str();
        const auto rt = oracle::return_times_by_cells(b, 2, 5, 64);
        std::map<std::int64_t, IntervalSet> mine;
        for (const auto& c : group_by_height(t).columns) mine[c.height] = c.base;
        if (mine != rt) return "return-time classes differ from the cell oracle for " + b.str();
        tallest = std::max(tallest, rt.rbegin()->first);
    }
    detail = "50 bases on the 2^-5 grid, tallest column " + std::to_string(tallest);
    return "";
}

// ---- 4 ----------------------------------------------------------------------------------

std::string two_heights(std::string& detail) {
    for (auto [p, n1, n2] : {std::tuple<std::int64_t, std::int64_t, std::int64_t>{2, 2, 3}, {3, 3, 5}}) {
        const OdometerSystem sys(p);
        const Tower t = tower_n1n2(sys, n1, n2);
        const IntervalSet b = tower_base(t);
        const auto rt = oracle::return_times_by_cells(b, p, oracle::grid_exponent(b, p), 100);
        std::set<std::int64_t> seen;
        for (const auto& [r, s] : rt) seen.insert(r);
        if (seen != std::set<std::int64_t>{n1, n2})
            return "return times for (" + std::to_string(n1) + "," + std::to_string(n2) + ") are not exactly {N1,N2}";
        detail += (detail.empty() ? "" : ", ") + std::string("p=") + std::to_string(p) + ": {" + std::to_string(n1) + "," +
                  std::to_string(n2) + "} both attained";
    }
    return "";
}

// ---- 5 ----------------------------------------------------------------------------------

std::string kr_prime_bounds(std::string& detail) {
    const OdometerSystem two(2);
    const Tower input = tower_n1n2(two, 2, 3);
    const IntervalSet c = tower_base(input);
    for (std::int64_t n : {20, 50}) {
        const auto started = std::chrono::steady_clock::now();
        const auto [out, tr] = kr_prime(two, input, n);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        const std::string tag = "n=" + std::to_string(n) + ": ";
        if (!is_subset(tr.output_base, c)) return tag + "D is not inside C";
        const auto rt = oracle::return_times_by_cells(tr.output_base, 2, oracle::grid_exponent(tr.output_base, 2), n + 100);
        std::vector<std::int64_t> hs;
        for (const auto& [r, s] : rt) hs.push_back(r);
        if (hs.front() < n || hs.back() > n + 6 * 3) return tag + "return times leave [n, n+18]";
        if (gcd_heights(hs) != 1) return tag + "gcd of heights is " + std::to_string(gcd_heights(hs));
        if (hs != heights(out)) return tag + "output heights differ from the recomputed return times";
        for (std::size_t i = 0; i + 1 < tr.f_sets.size(); ++i)
            if (2 * tr.f_sets[i].measure() > tr.f_sets[i + 1].measure()) return tag + "2 mu(F_i) > mu(F_{i+1})";
        if (secs >= 30.0) return tag + "took " + std::to_string(secs) + " s";
        std::ostringstream os;
        os.setf(std::ios::fixed);
        os.precision(1);
        os << tag << "heights " << hs.front() << ".." << hs.back() << " in " << secs << " s";
        detail += (detail.empty() ? "" : "; ") + os.str();
    }
    return "";
}

// ---- 6 ----------------------------------------------------------------------------------

std::string infinite_heights(std::string& detail) {
    const OdometerSystem two(2);
    const auto r = infinite_heights_iterate(two, I(0, R(1, 2)), 4);
    const auto hs = distinct_heights(r.tower);
    if (hs.size() < 5) return "only " + std::to_string(hs.size()) + " distinct heights";
    for (std::size_t k = 1; k < r.bases.size(); ++k) {
        const Rational keep = 1 - Rational(1) / Rational(Integer(1) << k);
        if (!(r.bases[k].measure() > keep * r.bases[k - 1].measure())) return "shrink bound fails at step " + std::to_string(k);
    }
    const int m = oracle::grid_exponent(r.base, 2);
    if (m <= 20) {
        std::vector<std::int64_t> rt;
        for (const auto& [h, s] : oracle::return_times_by_cells(r.base, 2, m, hs.back() + 1)) rt.push_back(h);
        if (rt != hs) return "heights differ from the cell oracle";
    }
    detail = std::to_string(hs.size()) + " distinct heights, tallest " + std::to_string(hs.back());
    return "";
}

// ---- 7 ----------------------------------------------------------------------------------

std::string universality(std::string& detail) {
    int cases = 0;
    for (auto [k, top] : {std::pair<int, int>{2, 5}, {3, 3}}) {
        for (int m = 1; m <= top; ++m) {
            const Word w = universal_word(k, m);
            const auto count = static_cast<std::size_t>(ipow(k, m));
            if (w.size() != static_cast<std::size_t>(m) * count) return "length of omega for k=" + std::to_string(k) + " m=" + std::to_string(m);
            for (std::size_t r = 0; r < count; ++r) {
                const Word u = word_of_rank(r, static_cast<std::size_t>(k), static_cast<std::size_t>(m));
                bool found = false;
                for (std::size_t i = 0; !found && i + u.size() <= w.size(); ++i)
                    found = std::equal(u.begin(), u.end(), w.begin() + static_cast<std::ptrdiff_t>(i));
                if (!found) return "missing " + word_to_string(u) + " for k=" + std::to_string(k);
            }
            ++cases;
        }
    }
    detail = std::to_string(cases) + " (k,m) pairs, every m-word found";
    return "";
}

// ---- 8 ----------------------------------------------------------------------------------

std::string weak_mixing_depth2(std::string& detail) {
    const OdometerSystem two(2);
    const Partition halves = split_at(R(1, 2));
    const auto tr = prop42_adjust(two, halves, R(1, 8), 2);
    const Partition& a = tr.alphas.back();
    const Rational d = partition_metric(halves, a);
    if (!(d < R(1, 8))) return "d = " + str(d);
    std::size_t tuples = 0;
    for (std::int64_t m : {1, 2}) {
        const auto cyl = symbolic_measure(two, a, m).support(static_cast<std::size_t>(m));
        std::vector<IntervalSet> sets;
        for (const auto& w : cyl) sets.push_back(cylinder_of_word(two, a, w));
        // lagged[i][j] = mu(E_i cap T^-m E_j)
        std::vector<std::vector<Rational>> lagged(sets.size(), std::vector<Rational>(sets.size()));
        for (std::size_t i = 0; i < sets.size(); ++i)
            for (std::size_t j = 0; j < sets.size(); ++j) lagged[i][j] = (sets[i] & preimage(two, sets[j], m)).measure();
        for (std::size_t e1 = 0; e1 < sets.size(); ++e1)
            for (std::size_t f1 = 0; f1 < sets.size(); ++f1)
                for (std::size_t e2 = 0; e2 < sets.size(); ++e2)
                    for (std::size_t f2 = 0; f2 < sets.size(); ++f2) {
                        if (!(lagged[e1][e2] * lagged[f1][f2] > 0))
                            return "zero witness at m=" + std::to_string(m) + " for " + word_to_string(cyl[e1]) + "," +
                                   word_to_string(cyl[f1]) + " -> " + word_to_string(cyl[e2]) + "," + word_to_string(cyl[f2]);
                        ++tuples;
                    }
    }
    const auto problems = verify_prop42(two, tr);
    if (!problems.empty()) return "verify: " + problems.front();
    detail = "d = " + str(d) + " < 1/8, " + std::to_string(tuples) + " positive 4-tuples";
    return "";
}

// ---- 9 ----------------------------------------------------------------------------------

// Levels of the column lying entirely in the cell of the given symbol.
std::vector<std::int64_t> symbol_levels(const OdometerSystem& sys, const Column& col, const Partition& a, int symbol) {
    std::vector<std::int64_t> out;
    IntervalSet level = col.base;
    for (std::int64_t j = 0; j < col.height; ++j) {
        if (is_subset(level, a.cell(static_cast<std::size_t>(symbol - 1)))) out.push_back(j);
        level = image(sys, level, 1);
    }
    return out;
}

std::string proximal_depth1(std::string& detail) {
    const OdometerSystem two(2);
    const Partition halves = split_at(R(1, 2));
    const auto tr = prop51_adjust(two, halves, R(1), 0);
    const auto l0 = tr.schedule.l0;
    const Partition& a0 = tr.alphas[1];
    for (std::size_t c = 0; c < tr.tower.columns.size(); ++c) {
        const Column& col = tr.tower.columns[c];
        const auto twos = symbol_levels(two, col, a0, 2);
        const std::set<std::int64_t> two_set(twos.begin(), twos.end());
        // stamp equation at j = 0: 1-based positions s*l0 read 2 on every point of the column
        for (std::int64_t s = 1; s * l0 <= col.height - 1; ++s)
            if (!two_set.count(s * l0 - 1)) return "step 0 stamp missing at position " + std::to_string(s * l0);
        if (!thickly_syndetic_witness(WindowSet::make(col.height, twos), 1, l0))
            return "step 0 2-positions are not (1, l0)-thickly syndetic";
    }
    Rational least = tr.witness_measures.front() * tr.witness_measures.front();
    for (const auto& x : tr.witness_measures)
        for (const auto& y : tr.witness_measures) least = std::min(least, Rational(x * y));
    const Rational e0sq = tr.schedule.e0 * tr.schedule.e0;
    if (!(least > e0sq)) return "step 0 witness " + str(least) + " <= e0^2";
    if (!verify_prop51(two, tr).problems.empty()) return "step 0 verify: " + verify_prop51(two, tr).problems.front();
    detail = "step 0 holds (N0=" + std::to_string(tr.schedule.n0) + ", l0=" + std::to_string(l0) + ", stamps, witness > e0^2, thick (1,l0))";
    try {
        prop51_adjust(two, halves, R(1), 1);
    } catch (const infeasible_schedule& e) {
        return std::string("step 1 is out of reach: ") + e.what();
    }
    return "step 1 unexpectedly ran; checks for j = 1 are not implemented here";
}

// ---- 10 ---------------------------------------------------------------------------------

std::string model_array(std::string& detail) {
    const OdometerSystem two(2);
    const std::vector<Partition> betas{split_at(R(1, 2)), split_at(R(1, 4))};
    const std::vector<Rational> eps{R(1, 16), R(1, 32)};
    const auto ms = build_model_sequence(two, betas, eps, 2, ModelVariant::prop44);
    if (ms.gamma.size() != 2 || ms.gamma[1].size() != 2) return "array has the wrong shape";
    if (!refines(ms.gamma[1][1], ms.gamma[1][0])) return "gamma_2^2 does not refine gamma_1^2";
    const Rational cauchy = partition_metric(ms.gamma[1][0], ms.gamma[0][0]);
    if (!(cauchy < eps[1])) return "d(gamma_1^2, gamma_1^1) = " + str(cauchy);
    std::string to_beta;
    for (std::size_t k = 0; k < 2; ++k) {
        const Rational d = partition_metric(ms.gamma[1][k], ms.betas[k]);
        if (!(d < eps[0] + eps[1])) return "d(gamma_" + std::to_string(k + 1) + "^2, beta) = " + str(d);
        to_beta += (k ? ", " : "") + str(d);
    }
    const auto checks = verify_model_sequence_prop44(two, ms);
    if (!checks.problems.empty()) return "verify: " + checks.problems.front();
    detail = "weak-mixing array, d(gamma_1^2,gamma_1^1) = " + str(cauchy) + ", d(gamma_k^2,beta_k) = " + to_beta;
    return "";
}

// ---- 11 ---------------------------------------------------------------------------------

std::string detectors(std::string& detail) {
    constexpr int L = 12;
    std::size_t compared = 0;
    for (unsigned mask = 0; mask < (1u << L); ++mask) {
        const auto s = WindowSet::make(L, brute::members_of(mask, L));
        const std::string at = " on mask " + std::to_string(mask);
        if (mask && max_gap(s) != brute::max_gap(mask, L)) return "max_gap" + at;
        if (longest_run(s) != brute::longest_run(mask, L)) return "longest_run" + at;
        for (int g = 1; g <= 4; ++g)
            for (int r = 1; r <= 6; ++r) {
                if (piecewise_syndetic_witness(s, g, r) != brute::piecewise(mask, L, g, r)) return "piecewise" + at;
                if (thickly_syndetic_witness(s, r, g) != brute::thick(mask, L, r, g)) return "thick" + at;
                compared += 2;
            }
        compared += 2;
    }
    detail = "4096 subsets, " + std::to_string(compared) + " comparisons";
    return "";
}

// ---- 12 ---------------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int shell(const std::string& cmd) {
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string shell_quote(const fs::path& p) { return "'" + p.string() + "'"; }

// First "p/q" string in the document outside its inputs, nudged by 1/2^40.
bool tamper_one_rational(io::Json& j) {
    static const std::regex rational(R"(-?\d+/\d+)");
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (!std::regex_match(s, rational)) return false;
        j = to_string(parse_rational(s) + Rational(Integer(1), Integer(1) << 40));
        return true;
    }
    if (j.is_object()) {
        for (auto& [k, v] : j.items())
            if (k != "inputs" && k != "params" && k != "system" && tamper_one_rational(v)) return true;
    }
    if (j.is_array())
        for (auto& v : j)
            if (tamper_one_rational(v)) return true;
    return false;
}

std::string cli_determinism(std::string& detail, const std::string& cli) {
    const fs::path dir = fs::temp_directory_path() / ("ktower-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    struct Cleanup {
        fs::path d;
        ~Cleanup() { std::error_code ec; fs::remove_all(d, ec); }
    } cleanup{dir};

    {
        std::ofstream ws(dir / "window.json");
        ws << io::to_json(WindowSet::make(30, {0, 1, 2, 7, 8, 9, 14, 15, 16, 21, 22, 23, 28})).dump();
    }
    struct Cmd {
        std::string name, args;
        bool document; // writes a document that verify can re-check
    };
    const std::vector<Cmd> cmds{
        {"system", "system --p 2 --cylinder 0110", false},
        {"system3", "system --p 3", false},
        {"kakutani", "tower kakutani --p 2 --base '[0,3/4)'", true},
        {"n1n2", "tower n1n2 --p 3 --n1 3 --n2 5", true},
        {"krprime", "tower kr-prime --p 2 --n1 2 --n2 3 --n 20", true},
        {"infinite", "tower infinite --p 2 --base '[0,1/2)' --iterations 4", true},
        {"wm", "construct wm-dense-min --eps 1/4 --depth 1", true},
        {"prox", "construct wm-proximal-prep", true},
        {"model", "construct model-sequence --betas '1/2;1/4' --eps 1/16 --depth 1", true},
        {"emit", "symbolic emit --p 2 --partition 1/3 --L 4", true},
        {"detect", "detect --L 12 --members 0,1,2,5,6,7,9 --g 3 --r 2", false},
        {"detectfile", "detect --set " + shell_quote(dir / "window.json") + " --g 7 --r 3", false},
        {"quotient", "quotient --input " + shell_quote(dir / "emit.1.json") + " --r 4", false},
    };
    int runs = 0, verified = 0, tampered = 0;
    for (const auto& c : cmds) {
        for (int k : {1, 2}) {
            const auto out = dir / (c.name + "." + std::to_string(k) + ".json");
            const auto log = dir / (c.name + "." + std::to_string(k) + ".stdout");
            const int code = shell(shell_quote(cli) + " " + c.args + " --out " + shell_quote(out) + " > " + shell_quote(log) + " 2>&1");
            if (code != 0) return c.name + " exited with " + std::to_string(code);
            ++runs;
        }
        for (const char* ext : {".json", ".stdout"})
            if (slurp(dir / (c.name + ".1" + ext)) != slurp(dir / (c.name + ".2" + ext))) return c.name + ext + " differs between runs";
        if (!c.document) continue;

        const auto doc = dir / (c.name + ".1.json");
        for (int k : {1, 2}) {
            const auto log = dir / (c.name + ".verify." + std::to_string(k));
            const int code = shell(shell_quote(cli) + " verify --trace " + shell_quote(doc) + " > " + shell_quote(log) + " 2>&1");
            if (code != 0) return "verify on fresh " + c.name + " returned " + std::to_string(code);
        }
        if (slurp(dir / (c.name + ".verify.1")) != slurp(dir / (c.name + ".verify.2"))) return "verify output differs for " + c.name;
        ++verified;

        auto j = io::Json::parse(slurp(doc));
        if (!tamper_one_rational(j)) return "no rational to tamper in " + c.name;
        const auto bad = dir / (c.name + ".bad.json");
        std::ofstream(bad) << j.dump(2);
        const int code = shell(shell_quote(cli) + " verify --trace " + shell_quote(bad) + " > /dev/null 2>&1");
        if (code != 2) return "verify on tampered " + c.name + " returned " + std::to_string(code);
        ++tampered;
    }
    detail = std::to_string(runs) + " runs byte-identical, " + std::to_string(verified) + " fresh documents verify with 0, " +
             std::to_string(tampered) + " tampered ones with 2";
    return "";
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <ktower-cli>\n";
        return 1;
    }
    const std::string cli = fs::absolute(argv[1]).string();
    run(1, "exact dynamics on base-2 and base-3 odometers", exact_dynamics);
    run(2, "T^(p^|C|) C = C for every short cylinder", cylinder_periodicity);
    run(3, "Kac identity on random dyadic bases", kac_identity);
    run(4, "two-height towers return exactly at N1 and N2", two_heights);
    run(5, "kr_prime heights, gcd, D in C and F growth", kr_prime_bounds);
    run(6, "infinite heights and the shrink bound", infinite_heights);
    run(7, "universal words contain every m-word", universality);
    run(8, "weak-mixing adjustment at depth 2", weak_mixing_depth2);
    run(9, "proximal preparation at depth 1", proximal_depth1);
    run(10, "model array at depth 2", model_array);
    run(11, "detectors match brute force", detectors);
    run(12, "CLI determinism and verify exit codes", [&](std::string& d) { return cli_determinism(d, cli); });
    return failures == 0 ? 0 : 1;
}
