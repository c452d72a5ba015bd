// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>

#include "cesshare/allocation/allocate.hpp"
#include "cesshare/errors.hpp"

namespace cesshare::allocation {

double max_excess(const CostGame& game, const std::vector<double>& x) {
    const auto mv = game.most_violated(x, {});
    if (!mv) throw InputError("game has no proper non-empty coalition");
    return mv->excess;
}

bool in_core(const CostGame& game, const std::vector<double>& x, double tol) {
    double total = 0.0;
    for (double xi : x) total += xi;
    if (std::abs(total - game.value(CoalitionKey::grand(game.player_count()))) > tol)
        return false;
    return max_excess(game, x) <= tol;
}

AllocationResult shapley(const CostGame& game, int threads, bool force) {
    const int n = game.player_count();
    if (n < 1) throw InputError("shapley needs at least one player");
    if (n > 20 && !force)
        throw InputError("shapley on " + std::to_string(n) + " players means 2^" +
                         std::to_string(n) +
                         " coalition evaluations; pass force to proceed");
    const std::size_t queries_before = game.queries();

    const std::uint64_t grand = (std::uint64_t{1} << n) - 1;
    std::vector<CoalitionKey> keys;
    keys.reserve(grand);
    for (std::uint64_t mask = 1; mask <= grand; ++mask) keys.push_back(CoalitionKey{mask});
    game.prefetch(keys, threads);

    // w(s) = s!(n-s-1)!/n!
    std::vector<long double> weight(n, 0.0L);
    for (int s = 0; s < n; ++s) {
        long double w = 1.0L;
        for (int j = 1; j <= s; ++j) w *= j;
        for (int j = 1; j <= n - s - 1; ++j) w *= j;
        for (int j = 1; j <= n; ++j) w /= j;
        weight[s] = w;
    }

    std::vector<long double> phi(n, 0.0L);
    for (std::uint64_t mask = 0; mask < grand; ++mask) {
        const double base = mask == 0 ? 0.0 : game.value(CoalitionKey{mask});
        const long double w = weight[__builtin_popcountll(mask)];
        for (int i = 0; i < n; ++i) {
            if ((mask >> i) & 1) continue;
            phi[i] += w * (game.value(CoalitionKey{mask | (1ull << i)}) - base);
        }
    }

    AllocationResult res;
    res.method = Method::Shapley;
    res.allocation.assign(phi.begin(), phi.end());
    if (n >= 2) {
        res.max_excess = max_excess(game, res.allocation);
        res.in_core = in_core(game, res.allocation);
    } else {
        res.in_core = true;
    }
    res.coalitions_queried = game.queries() - queries_before;
    return res;
}

std::vector<double> proportional_split(const std::vector<double>& baseline_opex,
                                       const std::vector<double>& opex, double capex,
                                       bool equal_split_fallback) {
    const std::size_t n = opex.size();
    if (baseline_opex.size() != n || n == 0)
        throw InputError("proportional split needs matching non-empty cost vectors");
    double total_reduction = 0.0;
    for (std::size_t i = 0; i < n; ++i) total_reduction += baseline_opex[i] - opex[i];

    std::vector<double> x(n);
    if (total_reduction <= 0.0) {
        if (!equal_split_fallback)
            throw InputError(
                "shared storage reduces no bills on this instance; the "
                "proportional split is undefined (enable the equal-split "
                "fallback to divide the capacity cost evenly)");
        for (std::size_t i = 0; i < n; ++i) x[i] = opex[i] + capex / static_cast<double>(n);
        return x;
    }
    for (std::size_t i = 0; i < n; ++i)
        x[i] = opex[i] + capex * (baseline_opex[i] - opex[i]) / total_reduction;
    return x;
}

AllocationResult proportional(const StorageGame& game, bool equal_split_fallback) {
    const auto& m = game.community();
    const int n = m.building_count();
    if (n < 1) throw InputError("proportional needs at least one building");
    const std::size_t queries_before = game.queries();

    const auto grand = coalition::evaluate_coalition(m, CoalitionKey::grand(n),
                                                     &game.cache());
    std::vector<double> baseline(n), opex(n);
    for (int i = 0; i < n; ++i) {
        opex[i] = coalition::member_operation_cost(m, grand.schedule, i);
        baseline[i] = coalition::no_storage_cost(m, i);
    }

    AllocationResult res;
    res.method = Method::Proportional;
    res.allocation = proportional_split(baseline, opex, grand.capex, equal_split_fallback);
    if (n >= 2) {
        res.max_excess = max_excess(game, res.allocation);
        res.in_core = in_core(game, res.allocation);
    } else {
        res.in_core = true;
    }
    res.coalitions_queried = game.queries() - queries_before;
    return res;
}

} // namespace cesshare::allocation
