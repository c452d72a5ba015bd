// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>

#include "cesshare/allocation/allocate.hpp"
#include "cesshare/errors.hpp"

namespace cesshare::allocation {

namespace {

constexpr double kViolationTol = 1e-6; // excess above z worth generating
constexpr double kBindingTol = 1e-6;   // screening |excess - z| for bindings
constexpr double kUniqueTol = 1e-7;    // per-coordinate range in the probes

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

} // namespace

std::string method_name(Method m) {
    switch (m) {
    case Method::Nucleolus: return "nucleolus";
    case Method::Shapley: return "shapley";
    case Method::Proportional: return "proportional";
    }
    return "unknown";
}

AllocationResult nucleolus(const CostGame& game) {
    const int n = game.player_count();
    if (n < 2) throw InputError("nucleolus needs at least two players");
    const auto t0 = Clock::now();
    const std::size_t queries_before = game.queries();

    AllocationResult res;
    res.method = Method::Nucleolus;

    std::vector<CoalitionKey> family;
    for (int i = 0; i < n; ++i) family.push_back(CoalitionKey::singleton(i));
    std::vector<BindingBlock> blocks;
    // per block: the solution and screening tolerance it was derived from,
    // kept so an infeasible master can tighten and re-derive it
    struct BlockMeta {
        MasterSolution src;
        double tol;
    };
    std::vector<BlockMeta> meta;

    MasterSolution current;
    bool have_solution = false;
    int episode = 1;
    int retries = 0;
    // every inner iteration either adds a coalition, fixes a block, or stops
    const long iteration_guard = (n >= 30 ? 1L << 30 : (1L << n) * 4) + 64;
    long iterations = 0;

    auto log = [&](const char* action, std::uint64_t mask, double excess, double z) {
        res.trace.push_back({episode, action, mask, excess, z, ms_since(t0)});
    };

    for (;;) {
        if (++iterations > iteration_guard)
            throw InternalError("lexicographic allocation failed to converge");

        const MasterOutcome mo = master_solve(game, family, blocks);
        if (!mo.feasible) {
            // a binding block was screened too loosely; tighten and retry
            if (blocks.empty() || retries >= 3)
                throw InternalError("master program infeasible with consistent bindings");
            ++retries;
            const BlockMeta m = meta.back();
            const double level = blocks.back().level;
            meta.pop_back();
            blocks.pop_back();
            auto gamma = identify_binding(game, family, blocks, m.src, m.tol / 10.0);
            if (gamma.empty())
                throw InternalError("binding re-identification found nothing at a "
                                    "tighter tolerance");
            blocks.push_back({std::move(gamma), level});
            meta.push_back({m.src, m.tol / 10.0});
            continue;
        }
        if (!mo.bounded) {
            // every family member is pinned in a block; the previous point
            // is the answer (a fully determined system)
            if (!have_solution)
                throw InternalError("master program unbounded on the initial family");
            break;
        }
        current = mo.solution;
        have_solution = true;
        log("master", 0, 0.0, current.z);

        std::vector<CoalitionKey> excluded = family;
        excluded.push_back(CoalitionKey::grand(n));
        const auto mv = game.most_violated(current.x, excluded);
        if (mv && mv->excess > current.z + kViolationTol) {
            family.push_back(mv->coalition);
            log("violate", mv->coalition.mask, mv->excess, current.z);
            continue;
        }

        // least core exact at this level; stop once the point is pinned
        if (solution_unique(game, family, blocks, current, kUniqueTol)) {
            log("stop", 0, 0.0, current.z);
            break;
        }
        auto gamma = identify_binding(game, family, blocks, current, kBindingTol);
        if (gamma.empty())
            throw InternalError("no coalition certified binding at the optimal level");
        for (CoalitionKey key : gamma) log("bind", key.mask, current.z, current.z);
        meta.push_back({current, kBindingTol});
        blocks.push_back({std::move(gamma), current.z});
        ++episode;
        if (episode > (1 << std::min(n, 24)))
            throw InternalError("episode count exceeded the coalition count");
    }

    res.allocation = current.x;
    res.episodes = episode;
    res.max_excess = max_excess(game, res.allocation);
    res.in_core = in_core(game, res.allocation);
    res.coalitions_queried = game.queries() - queries_before;
    return res;
}

} // namespace cesshare::allocation
