// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CESSHARE_SOLVER_SIMPLEX_INTERNAL_HPP
#define CESSHARE_SOLVER_SIMPLEX_INTERNAL_HPP

#include <vector>

#include "cesshare/solver/lp.hpp"

namespace cesshare::solver {

/// solve_lp with the problem's bounds replaced; used by branch-and-bound so
/// nodes share the constraint matrix instead of copying the whole program.
LpSolution solve_lp_with_bounds(const LinearProgram& problem,
                                const std::vector<double>& lower,
                                const std::vector<double>& upper);

} // namespace cesshare::solver

#endif
