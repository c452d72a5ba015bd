// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cesshare/errors.hpp"
#include "cesshare/solver/lp.hpp"
#include "oracles.hpp"

using namespace cesshare;
using namespace cesshare::solver;

namespace {

// Deterministic uniform double in [a, b) independent of libstdc++ internals.
double uniform(std::mt19937& rng, double a, double b) {
    const double u = (rng() >> 5) * (1.0 / 134217728.0) / 64.0; // 27 bits
    return a + u * (b - a);
}

// Random LP that is feasible (b derived from a known interior point) and
// bounded (finite upper bounds on every variable).
LinearProgram random_lp(std::mt19937& rng, int nvars, int nrows) {
    LinearProgram lp;
    for (int j = 0; j < nvars; ++j)
        lp.add_variable(uniform(rng, -2.0, 2.0), 0.0, uniform(rng, 1.0, 6.0));
    std::vector<double> x0(nvars);
    for (int j = 0; j < nvars; ++j) x0[j] = uniform(rng, 0.0, lp.upper[j]);
    for (int r = 0; r < nrows; ++r) {
        std::vector<std::pair<int, double>> coeffs;
        double act = 0.0;
        for (int j = 0; j < nvars; ++j) {
            if (uniform(rng, 0.0, 1.0) < 0.3) continue;
            const double v = uniform(rng, -3.0, 3.0);
            coeffs.emplace_back(j, v);
            act += v * x0[j];
        }
        if (coeffs.empty()) continue;
        const int kind = static_cast<int>(uniform(rng, 0.0, 3.0));
        if (kind == 0)
            lp.add_row(coeffs, Relation::LessEqual, act + uniform(rng, 0.0, 2.0));
        else if (kind == 1)
            lp.add_row(coeffs, Relation::GreaterEqual, act - uniform(rng, 0.0, 2.0));
        else
            lp.add_row(coeffs, Relation::Equal, act);
    }
    return lp;
}

} // namespace

TEST_CASE("single binding bound") {
    LinearProgram lp;
    lp.add_variable(1.0); // min x, x >= 0
    lp.add_row({{0, 1.0}}, Relation::GreaterEqual, 3.0);
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(sol.primal[0] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("symmetric vertex optimum on the simplex") {
    LinearProgram lp;
    lp.add_variable(-1.0);
    lp.add_variable(-1.0);
    lp.add_row({{0, 1.0}, {1, 1.0}}, Relation::LessEqual, 1.0);
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(-1.0).epsilon(1e-9));
    // Optimum is a vertex: one variable at 1, the other at 0.
    CHECK(sol.primal[0] + sol.primal[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.primal[0] * sol.primal[1] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("infeasible and unbounded detection") {
    LinearProgram infeas;
    infeas.add_variable(1.0, 0.0, 1.0);
    infeas.add_row({{0, 1.0}}, Relation::GreaterEqual, 2.0);
    CHECK(solve_lp(infeas).status == SolveStatus::Infeasible);

    LinearProgram unbounded;
    unbounded.add_variable(-1.0); // min -x, x >= 0, no cap
    CHECK(solve_lp(unbounded).status == SolveStatus::Unbounded);

    LinearProgram free_unbounded;
    free_unbounded.add_variable(1.0, -kInf, kInf);
    free_unbounded.add_row({{0, 1.0}}, Relation::LessEqual, 5.0);
    CHECK(solve_lp(free_unbounded).status == SolveStatus::Unbounded);
}

TEST_CASE("input validation is distinct from infeasibility") {
    LinearProgram lp;
    lp.add_variable(1.0);
    lp.add_row({{3, 1.0}}, Relation::LessEqual, 1.0); // index out of range
    CHECK_THROWS_AS(solve_lp(lp), InputError);

    LinearProgram nan_lp;
    nan_lp.add_variable(std::nan(""));
    CHECK_THROWS_AS(solve_lp(nan_lp), InputError);

    LinearProgram bad_bounds;
    bad_bounds.add_variable(1.0, 2.0, 1.0);
    CHECK_THROWS_AS(solve_lp(bad_bounds), InputError);
}

TEST_CASE("equality rows and free variables") {
    // min x + y with x + y = 4, x - y = 1, both free.
    LinearProgram lp;
    lp.add_variable(1.0, -kInf, kInf);
    lp.add_variable(1.0, -kInf, kInf);
    lp.add_row({{0, 1.0}, {1, 1.0}}, Relation::Equal, 4.0);
    lp.add_row({{0, 1.0}, {1, -1.0}}, Relation::Equal, 1.0);
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.primal[0] == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(sol.primal[1] == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("random LPs match the vertex-enumeration oracle") {
    std::mt19937 rng(20260101);
    int solved = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto lp = random_lp(rng, 5, 8);
        const auto sol = solve_lp(lp);
        const auto oracle = test_oracles::lp_by_vertex_enumeration(lp);
        REQUIRE(oracle.has_value());
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK(sol.objective_value == doctest::Approx(*oracle).epsilon(0).scale(1).epsilon(1e-7));
        ++solved;
    }
    CHECK(solved == 50);
}

TEST_CASE("optimal solutions satisfy every row within tolerance") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        const auto lp = random_lp(rng, 6, 10);
        const auto sol = solve_lp(lp);
        REQUIRE(sol.status == SolveStatus::Optimal);
        for (std::size_t r = 0; r < lp.rows.size(); ++r) {
            double scale = std::abs(lp.rows[r].rhs);
            for (const auto& [j, v] : lp.rows[r].coeffs) scale = std::max(scale, std::abs(v));
            if (scale == 0) scale = 1;
            const double gap = (sol.row_activities[r] - lp.rows[r].rhs) / scale;
            switch (lp.rows[r].rel) {
                case Relation::LessEqual: CHECK(gap <= 1e-7); break;
                case Relation::GreaterEqual: CHECK(gap >= -1e-7); break;
                case Relation::Equal: CHECK(std::abs(gap) <= 1e-7); break;
            }
        }
        double obj = 0.0;
        for (std::size_t j = 0; j < lp.variable_count(); ++j)
            obj += lp.objective[j] * sol.primal[j];
        CHECK(sol.objective_value == doctest::Approx(obj).epsilon(1e-9));
    }
}

TEST_CASE("row permutation leaves the objective unchanged") {
    std::mt19937 rng(777);
    for (int trial = 0; trial < 20; ++trial) {
        auto lp = random_lp(rng, 5, 7);
        const auto sol = solve_lp(lp);
        REQUIRE(sol.status == SolveStatus::Optimal);
        auto permuted = lp;
        std::reverse(permuted.rows.begin(), permuted.rows.end());
        const auto sol2 = solve_lp(permuted);
        REQUIRE(sol2.status == SolveStatus::Optimal);
        CHECK(sol.objective_value == doctest::Approx(sol2.objective_value).epsilon(1e-7));
    }
}

TEST_CASE("determinism: identical input gives identical output") {
    std::mt19937 rng(9);
    const auto lp = random_lp(rng, 6, 9);
    const auto a = solve_lp(lp);
    const auto b = solve_lp(lp);
    REQUIRE(a.status == b.status);
    CHECK(a.objective_value == b.objective_value);
    CHECK(a.primal == b.primal);
}

TEST_CASE("badly scaled rows still solve to tolerance") {
    // Tariff-like (~0.1) and capacity-like (~1e3) coefficients mixed.
    LinearProgram lp;
    lp.add_variable(0.1271);
    lp.add_variable(1000.0);
    lp.add_row({{0, 1.0}, {1, 1000.0}}, Relation::GreaterEqual, 2000.0);
    lp.add_row({{0, 0.001}, {1, -1.0}}, Relation::LessEqual, 0.0);
    const auto sol = solve_lp(lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    const auto oracle = test_oracles::lp_by_vertex_enumeration(lp);
    REQUIRE(oracle.has_value());
    CHECK(sol.objective_value == doctest::Approx(*oracle).epsilon(1e-9));
}

TEST_CASE("knapsack of size 1") {
    MixedIntegerProgram mip;
    mip.base.add_variable(-1.0, 0.0, 1.0);
    mip.base.add_variable(-1.0, 0.0, 1.0);
    mip.base.add_row({{0, 1.0}, {1, 1.0}}, Relation::LessEqual, 1.0);
    mip.binary_indices = {0, 1};
    const auto sol = solve_milp(mip);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(sol.primal[0] + sol.primal[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("empty binary mask delegates to solve_lp") {
    std::mt19937 rng(5);
    const auto lp = random_lp(rng, 5, 6);
    MixedIntegerProgram mip;
    mip.base = lp;
    const auto a = solve_milp(mip);
    const auto b = solve_lp(lp);
    CHECK(a.status == b.status);
    CHECK(a.objective_value == b.objective_value);
    CHECK(a.primal == b.primal);
}

TEST_CASE("random MILPs match exhaustive binary enumeration") {
    std::mt19937 rng(31337);
    for (int trial = 0; trial < 50; ++trial) {
        const int nbin = 4 + static_cast<int>(uniform(rng, 0.0, 9.0)); // 4..12
        auto lp = random_lp(rng, 3, 5);
        MixedIntegerProgram mip;
        mip.base = lp;
        if (mip.base.rows.empty())
            mip.base.add_row({{0, 1.0}}, Relation::LessEqual, 1.0);
        for (int k = 0; k < nbin; ++k) {
            const int j = mip.base.add_variable(uniform(rng, -2.0, 2.0), 0.0, 1.0);
            mip.binary_indices.push_back(j);
            // Tie binaries into an existing row so they are not decoupled.
            mip.base.rows[k % mip.base.rows.size()].coeffs.emplace_back(
                j, uniform(rng, -2.0, 2.0));
        }
        const auto oracle = test_oracles::milp_by_enumeration(mip);
        if (!oracle) {
            CHECK(solve_milp(mip).status == SolveStatus::Infeasible);
            continue;
        }
        const auto sol = solve_milp(mip);
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK(sol.objective_value == doctest::Approx(*oracle).epsilon(0).scale(1).epsilon(1e-6));
        for (int j : mip.binary_indices)
            CHECK(std::abs(sol.primal[j] - std::round(sol.primal[j])) <= kIntTol);
    }
}

TEST_CASE("milp node limit raises a resource error") {
    MixedIntegerProgram mip;
    // A knapsack with many symmetric fractional branches.
    std::vector<std::pair<int, double>> row;
    for (int k = 0; k < 14; ++k) {
        const int j = mip.base.add_variable(-1.0, 0.0, 1.0);
        mip.binary_indices.push_back(j);
        row.emplace_back(j, 1.0 + 0.001 * k);
    }
    mip.base.add_row(row, Relation::LessEqual, 7.0005);
    CHECK_THROWS_AS(solve_milp(mip, 4), ResourceError);
}

TEST_CASE("problem dump is stable text") {
    LinearProgram lp;
    lp.add_variable(1.0, 0.0, kInf, "a");
    lp.add_variable(2.0, 0.0, kInf, "b");
    lp.add_row({{0, 1.0}, {1, -1.0}}, Relation::LessEqual, 3.0);
    const auto text = lp.dump();
    CHECK(text.find("a b") != std::string::npos);
    CHECK(text.find("<=") != std::string::npos);
}
