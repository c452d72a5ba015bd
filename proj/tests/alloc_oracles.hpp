// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0
//
// Allocation oracles used only by tests: full-enumeration lexicographic
// nucleolus (no constraint generation, every proper coalition listed) and
// random game generators.

#ifndef CESSHARE_TESTS_ALLOC_ORACLES_HPP
#define CESSHARE_TESTS_ALLOC_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "cesshare/errors.hpp"
#include "cesshare/model/model.hpp"
#include "cesshare/solver/lp.hpp"

namespace test_oracles {

/// Lexicographic nucleolus of a cost game given as a full value table
/// (index = coalition mask, size 2^n). Sequential scheme over ALL proper
/// coalitions: minimize the worst excess, pin the constraints that are tight
/// in every optimum, recurse on the rest.
inline std::vector<double> nucleolus_by_full_lp(const std::vector<double>& values) {
    namespace slv = cesshare::solver;
    const std::size_t size = values.size();
    int n = 0;
    while ((std::size_t{1} << n) < size) ++n;
    const std::uint64_t grand = (std::uint64_t{1} << n) - 1;

    std::map<std::uint64_t, double> fixed; // mask -> pinned excess level
    std::vector<double> x(n, 0.0);

    auto coalition_row = [&](std::uint64_t mask) {
        std::vector<std::pair<int, double>> coeffs;
        for (int i = 0; i < n; ++i)
            if ((mask >> i) & 1) coeffs.push_back({i, 1.0});
        return coeffs;
    };

    for (int round = 0; round <= (1 << n); ++round) {
        // phase 1: worst excess over the still-free coalitions
        slv::LinearProgram lp;
        for (int i = 0; i < n; ++i) lp.add_variable(0.0, -slv::kInf, slv::kInf);
        const int z = lp.add_variable(1.0, -slv::kInf, slv::kInf);
        lp.add_row(coalition_row(grand), slv::Relation::Equal, values[grand]);
        bool any_free = false;
        for (std::uint64_t mask = 1; mask < grand; ++mask) {
            if (fixed.count(mask)) {
                lp.add_row(coalition_row(mask), slv::Relation::Equal,
                           values[mask] + fixed[mask]);
                continue;
            }
            auto coeffs = coalition_row(mask);
            coeffs.push_back({z, -1.0});
            lp.add_row(std::move(coeffs), slv::Relation::LessEqual, values[mask]);
            any_free = true;
        }
        if (!any_free) break;
        const auto sol = slv::solve_lp(lp);
        if (sol.status != slv::SolveStatus::Optimal)
            throw cesshare::InternalError("oracle master failed");
        const double level = sol.primal[z];
        for (int i = 0; i < n; ++i) x[i] = sol.primal[i];

        // constraint set at the fixed level, x variables only
        slv::LinearProgram probe;
        for (int i = 0; i < n; ++i) probe.add_variable(0.0, -slv::kInf, slv::kInf);
        probe.add_row(coalition_row(grand), slv::Relation::Equal, values[grand]);
        for (std::uint64_t mask = 1; mask < grand; ++mask)
            probe.add_row(coalition_row(mask),
                          fixed.count(mask) ? slv::Relation::Equal
                                            : slv::Relation::LessEqual,
                          values[mask] + (fixed.count(mask) ? fixed[mask] : level));

        // pin every coalition whose excess is `level` in all optima
        bool pinned = false;
        for (std::uint64_t mask = 1; mask < grand; ++mask) {
            if (fixed.count(mask)) continue;
            double xs = 0.0;
            for (int i = 0; i < n; ++i)
                if ((mask >> i) & 1) xs += x[i];
            if (std::abs(xs - values[mask] - level) > 1e-6) continue;
            std::fill(probe.objective.begin(), probe.objective.end(), 0.0);
            for (int i = 0; i < n; ++i)
                if ((mask >> i) & 1) probe.objective[i] = 1.0;
            const auto vsol = slv::solve_lp(probe);
            if (vsol.status != slv::SolveStatus::Optimal)
                throw cesshare::InternalError("oracle probe failed");
            if (vsol.objective_value - values[mask] >= level - 1e-6) {
                fixed[mask] = level;
                pinned = true;
            }
        }

        // done once x is pinned coordinate-wise
        bool unique = true;
        for (int i = 0; i < n && unique; ++i) {
            for (const double sign : {1.0, -1.0}) {
                std::fill(probe.objective.begin(), probe.objective.end(), 0.0);
                probe.objective[i] = sign;
                const auto vsol = slv::solve_lp(probe);
                if (vsol.status != slv::SolveStatus::Optimal)
                    throw cesshare::InternalError("oracle probe failed");
                if (std::abs(vsol.primal[i] - x[i]) > 1e-7) {
                    unique = false;
                    break;
                }
            }
        }
        if (unique) return x;
        if (!pinned) throw cesshare::InternalError("oracle made no progress");
    }
    return x;
}

inline double oracle_uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u =
        static_cast<double>(rng() >> 11) / static_cast<double>(1ull << 53);
    return lo + (hi - lo) * u;
}

/// Random integer-valued cost game, arbitrary structure.
inline std::vector<double> random_game(std::mt19937_64& rng, int n) {
    std::vector<double> values(std::size_t{1} << n, 0.0);
    for (std::size_t mask = 1; mask < values.size(); ++mask)
        values[mask] = std::floor(oracle_uniform(rng, 1.0, 40.0)) *
                       static_cast<double>(cesshare::model::CoalitionKey{mask}.size());
    return values;
}

/// Random subadditive cost game: nu(S) = sum v_i - max(0, sum w_i - K).
/// max(0, . - K) is convex and zero at zero, hence superadditive over
/// nonnegative weights, which makes nu subadditive by construction.
inline std::vector<double> random_subadditive_game(std::mt19937_64& rng, int n) {
    std::vector<double> v(n), w(n);
    for (int i = 0; i < n; ++i) {
        v[i] = std::floor(oracle_uniform(rng, 10.0, 30.0));
        w[i] = std::floor(oracle_uniform(rng, 1.0, 8.0));
    }
    const double cap = std::floor(oracle_uniform(rng, 4.0, 16.0));
    std::vector<double> values(std::size_t{1} << n, 0.0);
    for (std::size_t mask = 1; mask < values.size(); ++mask) {
        double sv = 0.0, sw = 0.0;
        for (int i = 0; i < n; ++i)
            if ((mask >> i) & 1) {
                sv += v[i];
                sw += w[i];
            }
        values[mask] = sv - std::max(0.0, sw - cap);
    }
    return values;
}

} // namespace test_oracles

#endif
