// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CESSHARE_ALLOCATION_ALLOCATE_HPP
#define CESSHARE_ALLOCATION_ALLOCATE_HPP

#include <string>
#include <vector>

#include "cesshare/allocation/game.hpp"

namespace cesshare::allocation {

/// Coalitions whose excess is pinned at an already-optimized level. Used by
/// the lexicographic scheme; the master turns them into equalities.
struct BindingBlock {
    std::vector<CoalitionKey> coalitions;
    double level = 0.0;
};

struct MasterSolution {
    std::vector<double> x;
    double z = 0.0;
};

/// Least-worst-excess master over the given constraint family: minimize z
/// subject to x(N) = nu(N), x(S) - nu(S) <= z for family members outside
/// the blocks, and x(S) - nu(S) = level for block members. Throws
/// InternalError when infeasible (a binding block was identified too
/// loosely) and reports unboundedness via the flag below.
struct MasterOutcome {
    MasterSolution solution;
    bool feasible = true;
    bool bounded = true;
};
MasterOutcome master_solve(const CostGame& game,
                           const std::vector<CoalitionKey>& family,
                           const std::vector<BindingBlock>& blocks);

/// True when every coordinate of x is pinned by the constraint set at the
/// optimal level z: max x_i - min x_i <= tol for all i.
bool solution_unique(const CostGame& game, const std::vector<CoalitionKey>& family,
                     const std::vector<BindingBlock>& blocks,
                     const MasterSolution& solution, double tol);

/// Family members (outside existing blocks) whose excess equals z in EVERY
/// optimal point, certified one small verification program each. Candidates
/// are screened at `tol` first.
std::vector<CoalitionKey> identify_binding(const CostGame& game,
                                           const std::vector<CoalitionKey>& family,
                                           const std::vector<BindingBlock>& blocks,
                                           const MasterSolution& solution, double tol);

enum class Method { Nucleolus, Shapley, Proportional };

std::string method_name(Method m);

struct TraceEntry {
    int episode = 0;
    std::string action; // master | violation | bind | stop
    std::uint64_t coalition_mask = 0;
    double excess = 0.0;
    double z = 0.0;
    double wall_ms = 0.0;
};

struct AllocationResult {
    Method method = Method::Nucleolus;
    std::vector<double> allocation;
    double max_excess = 0.0; // worst dissatisfaction over proper coalitions
    bool in_core = false;
    int episodes = 0;                  // lexicographic levels fixed (nucleolus)
    std::size_t coalitions_queried = 0; // distinct values computed for this run
    std::vector<TraceEntry> trace;
};

/// Nucleolus by constraint generation: grow the family from the singletons
/// via the violation oracle until the least core is exact, then pin binding
/// blocks level by level until the point is unique.
AllocationResult nucleolus(const CostGame& game);

/// Exact Shapley value; every coalition is evaluated. Refuses more than 20
/// players unless `force` (the table alone is 2^N values).
AllocationResult shapley(const CostGame& game, int threads = 1, bool force = false);

/// Capacity cost apportioned by bill reduction: building i pays its own
/// operation cost plus capex * (baseline_i - opex_i) / sum of reductions.
/// Throws InputError on a non-positive total reduction unless
/// `equal_split_fallback`, which divides the capex evenly instead.
std::vector<double> proportional_split(const std::vector<double>& baseline_opex,
                                       const std::vector<double>& opex, double capex,
                                       bool equal_split_fallback = false);

/// proportional_split applied to the community: baselines are the
/// no-storage costs, opex comes from the grand-coalition schedule.
AllocationResult proportional(const StorageGame& game, bool equal_split_fallback = false);

/// Worst excess over proper non-empty coalitions, via the game's oracle.
double max_excess(const CostGame& game, const std::vector<double>& x);

bool in_core(const CostGame& game, const std::vector<double>& x, double tol = 1e-6);

} // namespace cesshare::allocation

#endif
