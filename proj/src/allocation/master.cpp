// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>

#include "cesshare/allocation/allocate.hpp"
#include "cesshare/errors.hpp"
#include "cesshare/solver/lp.hpp"

namespace cesshare::allocation {

namespace {

std::set<std::uint64_t> block_members(const std::vector<BindingBlock>& blocks) {
    std::set<std::uint64_t> out;
    for (const auto& block : blocks)
        for (CoalitionKey key : block.coalitions) out.insert(key.mask);
    return out;
}

solver::Row coalition_row(CoalitionKey key, double coeff_z, int z_index) {
    solver::Row row;
    for (int i : key.members()) row.coeffs.push_back({i, 1.0});
    if (coeff_z != 0.0) row.coeffs.push_back({z_index, coeff_z});
    return row;
}

// Shared constraint set of the master at a FIXED z level: efficiency, the
// inequality family capped at level, and the block equalities. x variables
// only; used by the uniqueness probes and binding verification.
solver::LinearProgram fixed_level_program(const CostGame& game,
                                          const std::vector<CoalitionKey>& family,
                                          const std::vector<BindingBlock>& blocks,
                                          double level) {
    const int n = game.player_count();
    solver::LinearProgram lp;
    for (int i = 0; i < n; ++i)
        lp.add_variable(0.0, -solver::kInf, solver::kInf);
    solver::Row eff = coalition_row(CoalitionKey::grand(n), 0.0, -1);
    lp.add_row(eff.coeffs, solver::Relation::Equal, game.value(CoalitionKey::grand(n)));
    const auto bound = block_members(blocks);
    for (CoalitionKey key : family) {
        if (bound.count(key.mask)) continue;
        lp.add_row(coalition_row(key, 0.0, -1).coeffs, solver::Relation::LessEqual,
                   game.value(key) + level);
    }
    for (const auto& block : blocks)
        for (CoalitionKey key : block.coalitions)
            lp.add_row(coalition_row(key, 0.0, -1).coeffs, solver::Relation::Equal,
                       game.value(key) + block.level);
    return lp;
}

} // namespace

MasterOutcome master_solve(const CostGame& game, const std::vector<CoalitionKey>& family,
                           const std::vector<BindingBlock>& blocks) {
    const int n = game.player_count();
    const int z_index = n;
    solver::LinearProgram lp;
    for (int i = 0; i < n; ++i)
        lp.add_variable(0.0, -solver::kInf, solver::kInf);
    lp.add_variable(1.0, -solver::kInf, solver::kInf); // z

    solver::Row eff = coalition_row(CoalitionKey::grand(n), 0.0, -1);
    lp.add_row(eff.coeffs, solver::Relation::Equal, game.value(CoalitionKey::grand(n)));

    const auto bound = block_members(blocks);
    bool any_inequality = false;
    for (CoalitionKey key : family) {
        if (key.empty() || key == CoalitionKey::grand(n))
            throw InputError("master family must contain proper non-empty coalitions");
        if (bound.count(key.mask)) continue;
        lp.add_row(coalition_row(key, -1.0, z_index).coeffs, solver::Relation::LessEqual,
                   game.value(key));
        any_inequality = true;
    }
    for (const auto& block : blocks)
        for (CoalitionKey key : block.coalitions)
            lp.add_row(coalition_row(key, 0.0, -1).coeffs, solver::Relation::Equal,
                       game.value(key) + block.level);

    MasterOutcome out;
    if (!any_inequality) {
        // nothing left to level: z is unbounded below by construction
        out.bounded = false;
        return out;
    }
    const auto sol = solver::solve_lp(lp);
    if (sol.status == solver::SolveStatus::Infeasible) {
        out.feasible = false;
        return out;
    }
    if (sol.status == solver::SolveStatus::Unbounded) {
        out.bounded = false;
        return out;
    }
    out.solution.x.assign(sol.primal.begin(), sol.primal.begin() + n);
    out.solution.z = sol.primal[z_index];
    return out;
}

bool solution_unique(const CostGame& game, const std::vector<CoalitionKey>& family,
                     const std::vector<BindingBlock>& blocks,
                     const MasterSolution& solution, double tol) {
    solver::LinearProgram lp =
        fixed_level_program(game, family, blocks, solution.z);
    for (int i = 0; i < game.player_count(); ++i) {
        for (const double sign : {1.0, -1.0}) {
            std::fill(lp.objective.begin(), lp.objective.end(), 0.0);
            lp.objective[i] = sign;
            const auto sol = solver::solve_lp(lp);
            if (sol.status == solver::SolveStatus::Unbounded) return false;
            if (sol.status != solver::SolveStatus::Optimal)
                throw InternalError("uniqueness probe failed to solve");
            if (std::abs(sol.primal[i] - solution.x[i]) > tol) return false;
        }
    }
    return true;
}

std::vector<CoalitionKey> identify_binding(const CostGame& game,
                                           const std::vector<CoalitionKey>& family,
                                           const std::vector<BindingBlock>& blocks,
                                           const MasterSolution& solution, double tol) {
    const auto bound = block_members(blocks);
    solver::LinearProgram lp =
        fixed_level_program(game, family, blocks, solution.z);
    std::vector<CoalitionKey> out;
    for (CoalitionKey key : family) {
        if (bound.count(key.mask)) continue;
        const double e = game.excess(solution.x, key);
        if (std::abs(e - solution.z) > tol) continue;
        // certified binding iff the excess cannot drop below z anywhere in
        // the optimal face
        std::fill(lp.objective.begin(), lp.objective.end(), 0.0);
        for (int i : key.members()) lp.objective[i] = 1.0;
        const auto sol = solver::solve_lp(lp);
        if (sol.status != solver::SolveStatus::Optimal)
            throw InternalError("binding verification probe failed to solve");
        if (sol.objective_value - game.value(key) >= solution.z - tol) out.push_back(key);
    }
    return out;
}

} // namespace cesshare::allocation
