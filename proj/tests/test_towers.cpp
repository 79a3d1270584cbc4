#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <random>
#include <set>

#include <ktower/kr_prime.hpp>
#include <ktower/tower.hpp>

#include "oracles.hpp"

using namespace ktower;

namespace {

Rational R(long long a, long long b = 1) { return Rational(Integer(a), Integer(b)); }
IntervalSet I(Rational lo, Rational hi) { return IntervalSet::interval(lo, hi); }

} // namespace

TEST_CASE("carrier, heights and gcd") {
    const OdometerSystem two(2);
    const Tower t{{{I(0, R(1, 4)), 4}}};
    CHECK(carrier(two, t) == IntervalSet::full());
    CHECK(gcd_heights(std::vector<std::int64_t>{4, 6, 9}) == 1);
    CHECK(gcd_heights(std::vector<std::int64_t>{4, 6}) == 2);
    CHECK(heights(t) == std::vector<std::int64_t>{4});
    CHECK(tower_is_valid(two, t));
    CHECK_FALSE(column_is_disjoint(two, {I(0, R(1, 2)), 3}));
}

TEST_CASE("rokhlin towers over cylinders") {
    const OdometerSystem two(2);
    auto c4 = rokhlin_tower(two, 4);
    CHECK(c4.base == I(0, R(1, 4)));
    CHECK(column_carrier(two, c4).measure() == 1);
    auto c3 = rokhlin_tower(two, 3);
    CHECK(c3.base == I(0, R(1, 4)));
    CHECK(column_carrier(two, c3).measure() == R(3, 4));
    CHECK(column_is_disjoint(two, c3));
    auto c1 = rokhlin_tower(two, 1);
    CHECK(c1.base == IntervalSet::full());
    CHECK_THROWS_AS(rokhlin_tower(two, 0), precondition_error);
    for (std::int64_t N = 1; N < 40; ++N) {
        const auto c = rokhlin_tower(OdometerSystem(3), N);
        REQUIRE(column_is_disjoint(OdometerSystem(3), c));
        REQUIRE(column_carrier(OdometerSystem(3), c).measure() >= 1 - R(1, N));
    }
}

TEST_CASE("kakutani towers on small bases") {
    const OdometerSystem two(2);
    auto t = kakutani_tower(two, I(0, R(1, 2)), 4);
    REQUIRE(t.columns.size() == 1);
    CHECK(t.columns[0] == Column{I(0, R(1, 2)), 2});
    auto u = kakutani_tower(two, I(0, R(3, 4)), 4);
    REQUIRE(u.columns.size() == 2);
    CHECK(u.columns[0] == Column{IntervalSet::from_intervals({{0, R(1, 4)}, {R(1, 2), R(3, 4)}}), 1});
    CHECK(u.columns[1] == Column{I(R(1, 4), R(1, 2)), 2});
    auto w = kakutani_tower(two, IntervalSet::full(), 1);
    CHECK(w.columns == std::vector<Column>{{IntervalSet::full(), 1}});
    CHECK_THROWS_AS(kakutani_tower(two, I(0, R(1, 8)), 7), budget_error);
    CHECK_THROWS_AS(kakutani_tower(two, IntervalSet(), 7), precondition_error);
}

TEST_CASE("kakutani tower matches cell-by-cell return times and satisfies Kac") {
    std::mt19937_64 rng(41);
    for (std::int64_t p : {2, 3}) {
        const OdometerSystem sys(p);
        const int m = p == 2 ? 6 : 4;
        for (int trial = 0; trial < 30; ++trial) {
            auto b = oracle::random_grid_set(rng, p, m, 0.2);
            if (b.empty()) continue;
            const auto t = kakutani_tower(sys, b, 1000);
            const auto expected = oracle::return_times_by_cells(b, p, m, 1000);
            REQUIRE(t.columns.size() == expected.size());
            for (const auto& col : t.columns) REQUIRE(expected.at(col.height) == col.base);
            REQUIRE(kac_sum(t) == 1);
            REQUIRE(tower_is_valid(sys, t));
            REQUIRE(carrier(sys, t) == IntervalSet::full());
        }
    }
}

TEST_CASE("kac identity for non-dyadic bases") {
    const OdometerSystem two(2);
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        auto b = oracle::random_rational_set(rng, 2, 9) | I(R(1, 4), R(1, 2));
        const auto t = kakutani_tower(two, b, 4096);
        REQUIRE(kac_sum(t) == 1);
        REQUIRE(tower_base(t) == b);
    }
}

TEST_CASE("refine_tower splits by names") {
    const OdometerSystem two(2);
    const Tower t{{{I(0, R(1, 2)), 2}}};
    CHECK(refine_tower(two, t, Partition::trivial()) == t);
    auto nt = refine_tower_named(two, t, split_at(R(1, 2)));
    REQUIRE(nt.tower.columns.size() == 1);
    CHECK(nt.names[0] == Word{1, 2});
    // a tower over [0,1/4) of height 4 refined by a partition cutting through its levels
    const Tower q{{{I(0, R(1, 4)), 4}}};
    const Partition a({I(0, R(1, 8)) | I(R(1, 2), 1), I(R(1, 8), R(1, 2))});
    auto r = refine_tower_named(two, q, a);
    Rational total = 0;
    for (std::size_t i = 0; i < r.tower.columns.size(); ++i) {
        const auto& col = r.tower.columns[i];
        total += col.base.measure();
        for (std::int64_t j = 0; j < col.height; ++j)
            REQUIRE(is_subset(image(two, col.base, j), a.cell(static_cast<std::size_t>(r.names[i][j] - 1))));
    }
    CHECK(total == R(1, 4));
    CHECK(r.tower.columns.size() == 2);
}

TEST_CASE("tower_n1n2 produces the two prescribed heights") {
    const OdometerSystem two(2);
    for (auto [n1, n2] : std::vector<std::pair<std::int64_t, std::int64_t>>{{2, 3}, {3, 5}, {1, 2}, {4, 7}}) {
        const auto t = tower_n1n2(two, n1, n2);
        const auto b = tower_base(t);
        const auto rt = oracle::return_times_by_cells(b, 2, oracle::grid_exponent(b, 2), 100);
        std::set<std::int64_t> seen;
        for (const auto& [r, s] : rt) seen.insert(r);
        REQUIRE(seen == std::set<std::int64_t>{n1, n2});
        REQUIRE(group_by_height(kakutani_tower(two, b, 100)) == t);
    }
    const auto t3 = tower_n1n2(OdometerSystem(3), 2, 5);
    CHECK(distinct_heights(t3) == std::vector<std::int64_t>{2, 5});
    CHECK_THROWS_AS(tower_n1n2(two, 2, 4), precondition_error);
    CHECK_THROWS_AS(tower_n1n2(two, 3, 2), precondition_error);
}

TEST_CASE("infinite_heights_iterate grows the height set") {
    const OdometerSystem two(2);
    for (std::int64_t iters : {1, 3, 4}) {
        const auto r = infinite_heights_iterate(two, I(0, R(1, 2)), iters);
        REQUIRE(r.tower.columns.size() >= static_cast<std::size_t>(iters + 1));
        const auto again = group_by_height(kakutani_tower(two, r.base, 1 << 16));
        REQUIRE(again == r.tower);
        for (std::size_t k = 1; k < r.bases.size(); ++k) {
            REQUIRE(r.height_counts[k] > r.height_counts[k - 1]);
            const Rational shrink = 1 - Rational(1, Integer(1) << k);
            REQUIRE(r.bases[k].measure() > shrink * r.bases[k - 1].measure());
            REQUIRE(is_subset(r.bases[k], r.bases[k - 1]));
        }
    }
}

namespace {

void check_kr_prime(std::int64_t n) {
    const OdometerSystem two(2);
    const Tower input = tower_n1n2(two, 2, 3);
    const auto started = std::chrono::steady_clock::now();
    const auto [out, tr] = kr_prime(two, input, n);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    INFO("kr_prime n=" << n << " took " << secs << " s, master 2^" << tr.master_exponent);
    const IntervalSet c = tower_base(input);
    REQUIRE(is_subset(tr.output_base, c));
    // independent return-time sweep on the output base
    const auto rt = oracle::return_times_by_cells(tr.output_base, 2, oracle::grid_exponent(tr.output_base, 2), n + 100);
    std::vector<std::int64_t> hs;
    for (const auto& [r, s] : rt) hs.push_back(r);
    REQUIRE(hs.front() >= n);
    REQUIRE(hs.back() <= n + 6 * 3);
    REQUIRE(gcd_heights(hs) == 1);
    REQUIRE(hs == heights(out));
    for (std::size_t i = 0; i + 1 < tr.f_sets.size(); ++i)
        REQUIRE(2 * tr.f_sets[i].measure() <= tr.f_sets[i + 1].measure());
    for (std::size_t i = 0; i < tr.f_sets.size(); ++i) {
        REQUIRE(tr.f_sets[i].measure() > 0);
        REQUIRE(is_subset(tr.f_sets[i], tr.e_sets[i]));
        REQUIRE(is_subset(tr.e_sets[i], tr.d_hat & input.columns[i].base));
        REQUIRE(std::count(hs.begin(), hs.end(), tr.h_hats[i]) == 1);
        REQUIRE(std::count(hs.begin(), hs.end(), tr.h_hats[i] - input.columns[i].height) == 1);
    }
    REQUIRE(is_subset(tr.d_hat, c));
    REQUIRE(tr.b_hat_min_return >= 10 * (n + 9) * (n + 9));
    for (auto h : tr.d_hat_heights) {
        REQUIRE(h >= n + 3);
        REQUIRE(h <= n + 15);
    }
    REQUIRE(secs < 30.0);
}

} // namespace

TEST_CASE("kr_prime n=20 on heights {2,3}") { check_kr_prime(20); }
TEST_CASE("kr_prime n=50 on heights {2,3}") { check_kr_prime(50); }

TEST_CASE("kr_prime rejects bad input") {
    const OdometerSystem two(2);
    CHECK_THROWS_AS(kr_prime(two, Tower{{{I(0, R(1, 2)), 2}}}, 20), precondition_error);
    CHECK_THROWS_AS(kr_prime(two, Tower{{{I(0, R(1, 4)), 2}, {I(R(1, 4), R(1, 2)), 3}}}, 20), precondition_error);
}
