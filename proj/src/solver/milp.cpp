// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0
//
// Exact branch-and-bound for binary MILPs: best-bound node selection,
// branching on the most fractional binary, depth-first tie-break.

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <vector>

#include "cesshare/errors.hpp"
#include "cesshare/solver/lp.hpp"
#include "cesshare/solver/simplex_internal.hpp"

namespace cesshare::solver {

namespace {

struct Node {
    double bound;        // LP relaxation objective
    int depth;
    long id;             // creation order, final tie-break
    std::vector<double> lower, upper;
    LpSolution relax;

    bool operator<(const Node& other) const {
        if (bound != other.bound) return bound < other.bound;
        if (depth != other.depth) return depth > other.depth;
        return id < other.id;
    }
};

int most_fractional(const LpSolution& sol, const std::vector<int>& binaries) {
    int pick = -1;
    double best = kIntTol;
    for (int j : binaries) {
        const double v = sol.primal[j];
        const double frac = std::abs(v - std::round(v));
        // Distance from integrality, maximized at 0.5.
        if (frac > best) {
            best = frac;
            pick = j;
        }
    }
    return pick;
}

} // namespace

LpSolution solve_milp(const MixedIntegerProgram& problem, long node_limit) {
    problem.validate();
    if (problem.binary_indices.empty()) return solve_lp(problem.base);

    const LinearProgram& lp = problem.base;

    // Root: binary bounds clipped into [0,1].
    std::vector<double> lo(lp.lower), up(lp.upper);
    for (int j : problem.binary_indices) {
        lo[j] = std::max(lo[j], 0.0);
        up[j] = std::min(up[j], 1.0);
    }

    std::multiset<Node> open;
    long next_id = 0;
    {
        Node root;
        root.relax = solve_lp_with_bounds(lp, lo, up);
        if (root.relax.status == SolveStatus::Unbounded) return root.relax;
        if (root.relax.status == SolveStatus::Infeasible) return root.relax;
        root.bound = root.relax.objective_value;
        root.depth = 0;
        root.id = next_id++;
        root.lower = std::move(lo);
        root.upper = std::move(up);
        open.insert(std::move(root));
    }

    bool have_incumbent = false;
    LpSolution incumbent;
    double incumbent_obj = kInf;
    long nodes = 1;

    while (!open.empty()) {
        Node node = *open.begin();
        open.erase(open.begin());
        if (have_incumbent && node.bound >= incumbent_obj - 1e-9) continue;

        const int branch_var = most_fractional(node.relax, problem.binary_indices);
        if (branch_var < 0) {
            // Integral within tolerance: candidate incumbent.
            if (node.relax.objective_value < incumbent_obj) {
                incumbent_obj = node.relax.objective_value;
                incumbent = node.relax;
                have_incumbent = true;
            }
            continue;
        }

        for (int fix = 0; fix <= 1; ++fix) {
            if (++nodes > node_limit)
                throw ResourceError("solve_milp: node limit exceeded");
            Node child;
            child.lower = node.lower;
            child.upper = node.upper;
            child.lower[branch_var] = fix;
            child.upper[branch_var] = fix;
            child.relax = solve_lp_with_bounds(lp, child.lower, child.upper);
            if (child.relax.status != SolveStatus::Optimal) continue;
            child.bound = child.relax.objective_value;
            if (have_incumbent && child.bound >= incumbent_obj - 1e-9) continue;
            child.depth = node.depth + 1;
            child.id = next_id++;
            open.insert(std::move(child));
        }
    }

    if (!have_incumbent) return LpSolution{SolveStatus::Infeasible, 0.0, {}, {}};
    // Snap binaries onto the integer grid for downstream consumers.
    for (int j : problem.binary_indices)
        incumbent.primal[j] = std::round(incumbent.primal[j]);
    return incumbent;
}

} // namespace cesshare::solver
