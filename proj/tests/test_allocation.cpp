// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "alloc_oracles.hpp"
#include "cesshare/allocation/allocate.hpp"
#include "cesshare/errors.hpp"
#include "cesshare/model/synth.hpp"

using namespace cesshare;
using allocation::CoalitionKey;

namespace {

// nu({i}) = 10, nu(pair) = 14, nu(grand) = 18
std::vector<double> symmetric3() {
    return {0, 10, 10, 14, 10, 14, 14, 18};
}

// nu({1})=4, nu({2})=6, nu({3})=10, nu({12})=9, nu({13})=13, nu({23})=15
std::vector<double> asymmetric3() {
    return {0, 4, 6, 9, 10, 13, 15, 18};
}

double sum(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0);
}

} // namespace

TEST_CASE("master program reproduces hand-solved levels") {
    allocation::TableGame game(symmetric3());
    std::vector<CoalitionKey> all;
    for (std::uint64_t m = 1; m < 7; ++m) all.push_back(CoalitionKey{m});

    SUBCASE("full family") {
        const auto out = allocation::master_solve(game, all, {});
        REQUIRE(out.feasible);
        REQUIRE(out.bounded);
        CHECK(out.solution.z == doctest::Approx(-2.0).epsilon(1e-9));
        for (double xi : out.solution.x) CHECK(xi == doctest::Approx(6.0).epsilon(1e-7));
    }
    SUBCASE("singletons only") {
        std::vector<CoalitionKey> singles = {CoalitionKey{1}, CoalitionKey{2},
                                             CoalitionKey{4}};
        const auto out = allocation::master_solve(game, singles, {});
        REQUIRE(out.feasible);
        CHECK(out.solution.z == doctest::Approx(-4.0).epsilon(1e-9));
        for (double xi : out.solution.x) CHECK(xi == doctest::Approx(6.0).epsilon(1e-7));
        // efficiency forces every singleton constraint tight at z = -4, so
        // the point is already unique -- which is exactly why the search for
        // violated coalitions must run before the uniqueness stop
        CHECK(allocation::solution_unique(game, singles, {}, out.solution, 1e-7));
    }
    SUBCASE("pair excesses pinned at -2 determine the point") {
        std::vector<CoalitionKey> pairs = {CoalitionKey{3}, CoalitionKey{5},
                                           CoalitionKey{6}};
        allocation::BindingBlock block{pairs, -2.0};
        const auto out = allocation::master_solve(game, all, {block});
        REQUIRE(out.feasible);
        CHECK(allocation::solution_unique(game, all, {block}, out.solution, 1e-7));
        for (double xi : out.solution.x) CHECK(xi == doctest::Approx(6.0).epsilon(1e-7));
    }
}

TEST_CASE("table-game violation oracle enumerates correctly") {
    allocation::TableGame game(symmetric3());
    const std::vector<double> x = {6, 6, 6};
    std::vector<CoalitionKey> singles = {CoalitionKey{1}, CoalitionKey{2},
                                         CoalitionKey{4}};
    const auto mv = game.most_violated(x, singles);
    REQUIRE(mv.has_value());
    CHECK(mv->coalition.size() == 2);
    // relative to the singleton-level z = -4 the pair is violated by 2
    CHECK(mv->excess - (-4.0) == doctest::Approx(2.0).epsilon(1e-9));

    // excluding everything exhausts the search space
    std::vector<CoalitionKey> all;
    for (std::uint64_t m = 1; m < 7; ++m) all.push_back(CoalitionKey{m});
    CHECK(!game.most_violated(x, all).has_value());
}

TEST_CASE("nucleolus of the fixture games matches hand values and the oracle") {
    SUBCASE("symmetric: equal split") {
        allocation::TableGame game(symmetric3());
        const auto res = allocation::nucleolus(game);
        for (double xi : res.allocation) CHECK(xi == doctest::Approx(6.0).epsilon(1e-7));
        CHECK(res.max_excess == doctest::Approx(-2.0).epsilon(1e-7));
        CHECK(res.in_core);
        CHECK(sum(res.allocation) == doctest::Approx(18.0).epsilon(1e-7));
    }
    SUBCASE("asymmetric: matches the full-enumeration oracle") {
        const auto values = asymmetric3();
        allocation::TableGame game(values);
        const auto res = allocation::nucleolus(game);
        const auto oracle = test_oracles::nucleolus_by_full_lp(values);
        for (int i = 0; i < 3; ++i)
            CHECK(res.allocation[i] == doctest::Approx(oracle[i]).epsilon(1e-6));
        CHECK(sum(res.allocation) == doctest::Approx(18.0).epsilon(1e-7));
    }
}

TEST_CASE("nucleolus equals the full-enumeration oracle on random games") {
    std::mt19937_64 rng(20260826);
    int trials = 0;
    for (int n = 3; n <= 6; ++n) {
        for (int rep = 0; rep < 12; ++rep, ++trials) {
            const auto values = (rep % 2 == 0)
                                    ? test_oracles::random_game(rng, n)
                                    : test_oracles::random_subadditive_game(rng, n);
            allocation::TableGame game(values);
            const auto res = allocation::nucleolus(game);
            const auto oracle = test_oracles::nucleolus_by_full_lp(values);
            for (int i = 0; i < n; ++i) {
                INFO("n=", n, " rep=", rep, " i=", i);
                CHECK(res.allocation[i] == doctest::Approx(oracle[i]).epsilon(1e-6));
            }
            CHECK(sum(res.allocation) ==
                  doctest::Approx(values.back()).epsilon(1e-6));
            // least-core membership: worst excess equals the first level
            double z1 = 0.0;
            bool found = false;
            for (const auto& entry : res.trace)
                if (entry.episode == 1 && entry.action == "master") {
                    z1 = entry.z;
                    found = true;
                }
            REQUIRE(found);
            CHECK(res.max_excess == doctest::Approx(z1).epsilon(1e-6));
        }
    }
    CHECK(trials == 48);
}

TEST_CASE("relabeling players permutes the nucleolus identically") {
    std::mt19937_64 rng(7);
    const auto values = test_oracles::random_game(rng, 4);
    const int perm[4] = {2, 0, 3, 1}; // new index of old player i
    std::vector<double> permuted(16, 0.0);
    for (std::uint64_t mask = 0; mask < 16; ++mask) {
        std::uint64_t pmask = 0;
        for (int i = 0; i < 4; ++i)
            if ((mask >> i) & 1) pmask |= 1ull << perm[i];
        permuted[pmask] = values[mask];
    }
    allocation::TableGame a(values), b(permuted);
    const auto ra = allocation::nucleolus(a);
    const auto rb = allocation::nucleolus(b);
    for (int i = 0; i < 4; ++i)
        CHECK(ra.allocation[i] == doctest::Approx(rb.allocation[perm[i]]).epsilon(1e-6));
}

TEST_CASE("shapley value satisfies the textbook identities") {
    SUBCASE("two symmetric players split the surplus") {
        allocation::TableGame game({0, 10, 10, 16});
        const auto res = allocation::shapley(game);
        CHECK(res.allocation[0] == doctest::Approx(8.0).epsilon(1e-12));
        CHECK(res.allocation[1] == doctest::Approx(8.0).epsilon(1e-12));
        CHECK(res.coalitions_queried == 3);
    }
    SUBCASE("matches the permutation-average oracle") {
        const std::vector<double> values = {0, 1, 2, 2.5, 2, 2.5, 3.5, 4};
        allocation::TableGame game(values);
        const auto res = allocation::shapley(game);
        // average marginal cost over all 3! orderings
        std::vector<double> avg(3, 0.0);
        int order[3] = {0, 1, 2};
        std::sort(order, order + 3);
        do {
            std::uint64_t mask = 0;
            for (int pos = 0; pos < 3; ++pos) {
                const std::uint64_t next = mask | (1ull << order[pos]);
                avg[order[pos]] += (values[next] - values[mask]) / 6.0;
                mask = next;
            }
        } while (std::next_permutation(order, order + 3));
        for (int i = 0; i < 3; ++i)
            CHECK(res.allocation[i] == doctest::Approx(avg[i]).epsilon(1e-9));
    }
    SUBCASE("a dummy player pays exactly its standalone cost") {
        // player 2 always adds exactly 5
        std::vector<double> values(8, 0.0);
        const std::vector<double> base = {0, 7, 9, 12};
        for (std::uint64_t mask = 0; mask < 8; ++mask)
            values[mask] = base[mask & 3] + ((mask >> 2) & 1 ? 5.0 : 0.0);
        allocation::TableGame game(values);
        const auto res = allocation::shapley(game);
        CHECK(res.allocation[2] == doctest::Approx(5.0).epsilon(1e-9));
    }
    SUBCASE("player-count guard") {
        CHECK_THROWS_AS(
            (void)allocation::shapley(allocation::TableGame(
                                          std::vector<double>(1ull << 21, 0.0)),
                                      1, false),
            InputError);
    }
}

TEST_CASE("proportional split follows the bill-reduction formula") {
    const auto x = allocation::proportional_split({10, 20}, {8, 14}, 4.0);
    CHECK(x[0] == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(17.0).epsilon(1e-12));

    // equal reductions -> equal capex shares
    const auto eq = allocation::proportional_split({10, 12}, {7, 9}, 6.0);
    CHECK(eq[0] - 7.0 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(eq[1] - 9.0 == doctest::Approx(3.0).epsilon(1e-12));

    // zero reduction -> zero capex share
    const auto zr = allocation::proportional_split({10, 20}, {10, 16}, 4.0);
    CHECK(zr[0] == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(zr[1] == doctest::Approx(20.0).epsilon(1e-12));

    // degenerate: nothing saved
    CHECK_THROWS_AS((void)allocation::proportional_split({10, 20}, {10, 20}, 4.0),
                    InputError);
    const auto fb = allocation::proportional_split({10, 20}, {10, 20}, 4.0, true);
    CHECK(fb[0] == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(fb[1] == doctest::Approx(22.0).epsilon(1e-12));
}

TEST_CASE("excess and core utilities") {
    allocation::TableGame game(symmetric3());
    const std::vector<double> x = {6, 6, 6};
    CHECK(game.excess(x, CoalitionKey{0b011}) == doctest::Approx(-2.0));
    CHECK(game.excess(x, CoalitionKey::grand(3)) == doctest::Approx(0.0));
    CHECK(allocation::max_excess(game, x) == doctest::Approx(-2.0));
    CHECK(allocation::in_core(game, x));
    // overcharging player 0 beyond its standalone cost breaks the core
    const std::vector<double> bad = {10.5, 4.0, 3.5};
    CHECK(allocation::max_excess(game, bad) >= 0.5 - 1e-9);
    CHECK(!allocation::in_core(game, bad));
}

TEST_CASE("all methods agree on efficiency for a community instance") {
    const auto m = model::generate_synthetic(3, 2, 6, 77);
    coalition::CharacteristicCache cache(m);
    allocation::StorageGame game(m, cache, 2);
    const double grand = game.value(CoalitionKey::grand(3));

    const auto nuc = allocation::nucleolus(game);
    const std::size_t nuc_queries = nuc.coalitions_queried;
    const auto shap = allocation::shapley(game, 2);
    const auto prop = allocation::proportional(game);

    for (const auto& res : {nuc, shap, prop})
        CHECK(sum(res.allocation) == doctest::Approx(grand).epsilon(1e-6));

    // the generated family stays sparse compared to full enumeration
    CHECK(nuc_queries <= cache.query_count());
    CHECK(cache.query_count() == 7); // shapley touched everything

    // constraint generation agrees with the oracle on the induced table
    std::vector<double> values(8, 0.0);
    for (std::uint64_t mask = 1; mask < 8; ++mask)
        values[mask] = game.value(CoalitionKey{mask});
    const auto oracle = test_oracles::nucleolus_by_full_lp(values);
    for (int i = 0; i < 3; ++i)
        CHECK(nuc.allocation[i] == doctest::Approx(oracle[i]).epsilon(1e-5));
}

TEST_CASE("nucleolus needs at least two players") {
    allocation::TableGame game({0, 5});
    CHECK_THROWS_AS((void)allocation::nucleolus(game), InputError);
}
