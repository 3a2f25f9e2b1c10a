#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "soup/combinatorics.hpp"

using namespace soup;

TEST_CASE("circular permutation counts") {
    CHECK(circular_permutations(1).size() == 1);
    CHECK(circular_permutations(3).size() == 2);
    CHECK(circular_permutations(5).size() == 24);
    // no duplicates, all start at 0
    auto perms = circular_permutations(6);
    std::set<std::vector<int>> uniq(perms.begin(), perms.end());
    CHECK(uniq.size() == perms.size());
    for (const auto& p : perms) CHECK(p[0] == 0);
}

TEST_CASE("alternating maps") {
    CHECK(alternating_maps(BlockLayout({1, 1})).size() == 2);
    CHECK(alternating_maps(BlockLayout({2, 1})).empty());
    CHECK_FALSE(alternation_feasible(BlockLayout({2, 1})));
    // only the two strict alternations survive the cyclic constraint
    auto maps22 = alternating_maps(BlockLayout({2, 2}));
    CHECK(maps22.size() == 2);
    CHECK(maps22[0] == std::vector<int>{0, 1, 0, 1});
    CHECK(maps22[1] == std::vector<int>{1, 0, 1, 0});
    // against a brute-force filter
    auto brute = [](const BlockLayout& layout) {
        int n = layout.total();
        std::vector<int> seq;
        for (int j = 0; j < n; ++j) seq.push_back(layout.block_of(j));
        std::sort(seq.begin(), seq.end());
        std::size_t count = 0;
        do {
            bool ok = true;
            for (int j = 0; j < n; ++j)
                if (seq[j] == seq[(j + 1) % n]) ok = false;
            count += ok;
        } while (std::next_permutation(seq.begin(), seq.end()));
        return count;
    };
    for (const auto& sizes :
         {std::vector<int>{2, 2}, {3, 2}, {3, 3}, {2, 2, 1}, {2, 1, 1}, {3, 2, 1}}) {
        BlockLayout layout(sizes);
        // next_permutation over the multiset counts arrangements, i.e. maps
        CHECK(alternating_maps(layout).size() == brute(layout));
    }
}

TEST_CASE("alternating cycle permutations") {
    // layout (1,1): only the transposition, under both flags
    for (bool same_cycle : {false, true}) {
        auto fam = alternating_cycle_perms(BlockLayout({1, 1}), same_cycle);
        REQUIRE(fam.size() == 1);
        CHECK(fam[0] == std::vector<int>{1, 0});
    }
    // layout (2,2), unconstrained cycles: sum alpha^{c} = 2a^2 + 2a
    auto hist = alternating_cycle_histogram(BlockLayout({2, 2}), false);
    CHECK(hist[1] == 2);
    CHECK(hist[2] == 2);
    // same-cycle subfamily: strictly smaller, all single cycles
    auto same = alternating_cycle_perms(BlockLayout({2, 2}), true);
    auto all = alternating_cycle_perms(BlockLayout({2, 2}), false);
    CHECK(same.size() == 2);
    CHECK(same.size() < all.size());
    for (const auto& p : same) CHECK(cycle_count(p) == 1);
    // subset property
    std::set<std::vector<int>> all_set(all.begin(), all.end());
    for (const auto& p : same) CHECK(all_set.count(p) == 1);
}

TEST_CASE("alternating cycle permutations against a naive filter") {
    for (const auto& sizes : {std::vector<int>{2, 2}, {1, 1, 1}, {2, 1, 1}, {3, 2}, {2, 2, 2}}) {
        BlockLayout layout(sizes);
        int n = layout.total();
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::set<std::vector<int>> expect_any, expect_same;
        do {
            bool alt = true;
            for (int j = 0; j < n; ++j)
                if (layout.block_of(perm[j]) == layout.block_of(j)) alt = false;
            if (!alt) continue;
            expect_any.insert(perm);
            bool same = true;
            for (const auto& cyc : cycles_of(perm)) {
                std::vector<int> per_block(layout.num_blocks(), 0);
                for (int e : cyc) ++per_block[layout.block_of(e)];
                for (int b = 0; b < layout.num_blocks(); ++b)
                    if (per_block[b] != 0 && per_block[b] != layout.sizes[b]) same = false;
            }
            if (same) expect_same.insert(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));

        auto got_any = alternating_cycle_perms(layout, false);
        auto got_same = alternating_cycle_perms(layout, true);
        CHECK(got_any.size() == expect_any.size());
        CHECK(got_same.size() == expect_same.size());
        for (const auto& p : got_any) CHECK(expect_any.count(p) == 1);
        for (const auto& p : got_same) CHECK(expect_same.count(p) == 1);
        // lexicographic yield order
        CHECK(std::is_sorted(got_any.begin(), got_any.end()));
    }
}

TEST_CASE("separated partitions") {
    CHECK(separated_partitions(2, {{0, 0}, {1, 1}}, 2).size() == 1);
    CHECK(separated_partitions(4, {{0, 1}, {2, 3}}, 2).size() == 2);
    // window covering everything forces all singletons
    auto parts = separated_partitions(3, {{0, 2}}, 1);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].size() == 3);
    // unconstrained partitions reproduce the Bell numbers
    CHECK(separated_partitions(4, {}, 1).size() == 15);
    CHECK(separated_partitions(5, {}, 1).size() == 52);
    // empty ground set: one empty partition
    CHECK(separated_partitions(0, {}, 1).size() == 1);
}

TEST_CASE("separated partitions against a naive filter") {
    // p = 6, windows [0,2] and [3,4], min block 2
    std::vector<std::pair<int, int>> windows{{0, 2}, {3, 4}};
    auto naive = separated_partitions(6, {}, 1);
    std::size_t expect = 0;
    for (const auto& blocks : naive) {
        bool ok = true;
        for (const auto& b : blocks) {
            if (b.size() < 2) ok = false;
            int w0 = 0, w1 = 0;
            for (int e : b) {
                w0 += e <= 2;
                w1 += e == 3 || e == 4;
            }
            if (w0 > 1 || w1 > 1) ok = false;
        }
        expect += ok;
    }
    CHECK(separated_partitions(6, windows, 2).size() == expect);
}

TEST_CASE("remove and relabel counting formula") {
    SigmaIndex worked_chain;
    worked_chain.chains = {2, 1};  // two order-1 chains, one order-2
    CHECK(worked_chain.weight() == 4);
    CHECK(worked_chain.weight_plus() == 7);
    CHECK(remove_relabel_count(worked_chain, 8) == doctest::Approx(483840.0));

    SigmaIndex worked_circuit;
    worked_circuit.chains = {2, 1};
    worked_circuit.circuits = {0, 2};  // two circuits of order 3
    CHECK(worked_circuit.weight() == 10);
    CHECK(worked_circuit.weight_plus() == 13);
    CHECK(remove_relabel_count(worked_circuit, 14) == doctest::Approx(58118860800.0));

    SigmaIndex zero;
    CHECK(remove_relabel_count(zero, 0) == doctest::Approx(1.0));
}

TEST_CASE("rising factorial sum") {
    CHECK(rising_factorial_sum(1, 0.37) == doctest::Approx(0.37));
    CHECK(rising_factorial_sum(2, 1.0) == doctest::Approx(4.0));
    CHECK(rising_factorial_sum(3, 1.0) == doctest::Approx(36.0));
}

TEST_CASE("cycle-weighted sums over the two-block family match the rising factorial") {
    for (int n = 1; n <= 4; ++n) {
        auto hist = alternating_cycle_histogram(BlockLayout({n, n}), false);
        for (double a : {0.5, 1.0, 2.5}) {
            double lhs = 0.0;
            for (const auto& [c, count] : hist) lhs += static_cast<double>(count) * std::pow(a, c);
            CHECK(lhs == doctest::Approx(rising_factorial_sum(n, a)).epsilon(1e-12));
        }
    }
}

TEST_CASE("remove-and-relabel fibers are uniform with the formula size") {
    // chain-only sigma on the circle family
    struct Case {
        SigmaIndex sigma;
        int m, n;
    };
    std::vector<Case> cases;
    {
        SigmaIndex s;  // k_1 = 1
        s.chains = {1};
        cases.push_back({s, 2, 2});
        cases.push_back({s, 3, 3});
    }
    {
        SigmaIndex s;  // k_1 = 2
        s.chains = {2};
        cases.push_back({s, 2, 4});
    }
    {
        SigmaIndex s;  // k_2 = 1
        s.chains = {0, 1};
        cases.push_back({s, 2, 3});
        cases.push_back({s, 3, 4});
    }
    {
        SigmaIndex s;  // k_1 = 1, k_2 = 1
        s.chains = {1, 1};
        cases.push_back({s, 2, 5});
    }
    {
        SigmaIndex s;  // k_4 = 1
        s.chains = {0, 0, 0, 1};
        cases.push_back({s, 1, 5});
    }
    for (const auto& c : cases) {
        auto fibers = remove_relabel_fibers(c.sigma, c.m, c.n, false);
        REQUIRE(!fibers.empty());
        double expected = remove_relabel_count(c.sigma, c.n);
        for (const auto& [img, count] : fibers) CHECK(static_cast<double>(count) == expected);
    }
}

TEST_CASE("fibers with circuits over fixed-point-free permutations") {
    struct Case {
        SigmaIndex sigma;
        int m, n;
    };
    std::vector<Case> cases;
    {
        SigmaIndex s;  // m_2 = 1
        s.circuits = {1};
        cases.push_back({s, 2, 2});
        cases.push_back({s, 3, 3});
    }
    {
        SigmaIndex s;  // m_3 = 1
        s.circuits = {0, 1};
        cases.push_back({s, 2, 3});
    }
    {
        SigmaIndex s;  // m_2 = 2
        s.circuits = {2};
        cases.push_back({s, 2, 4});
    }
    {
        SigmaIndex s;  // k_1 = 1 and m_2 = 1
        s.chains = {1};
        s.circuits = {1};
        cases.push_back({s, 2, 4});
    }
    {
        SigmaIndex s;  // chains only, multi-cycle family
        s.chains = {1};
        cases.push_back({s, 3, 2});
    }
    for (const auto& c : cases) {
        auto fibers = remove_relabel_fibers(c.sigma, c.m, c.n, true);
        REQUIRE(!fibers.empty());
        double expected = remove_relabel_count(c.sigma, c.n);
        for (const auto& [img, count] : fibers) CHECK(static_cast<double>(count) == expected);
    }
}
