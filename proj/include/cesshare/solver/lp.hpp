// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CESSHARE_SOLVER_LP_HPP
#define CESSHARE_SOLVER_LP_HPP

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace cesshare::solver {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerances shared by the LP and MILP paths. The allocation module
/// compares excesses at 1e-6, so the solver stays one order tighter.
inline constexpr double kFeasTol = 1e-7;
inline constexpr double kOptTol = 1e-7;
inline constexpr double kIntTol = 1e-6;

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Row {
    std::vector<std::pair<int, double>> coeffs; // sparse (index, value)
    Relation rel = Relation::LessEqual;
    double rhs = 0.0;
};

/// Canonical minimization problem: min c'x subject to rows and variable
/// bounds. Bounds default to [0, +inf).
struct LinearProgram {
    std::vector<double> objective;
    std::vector<Row> rows;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::string> names; // optional, empty or per-variable

    int add_variable(double cost, double lo = 0.0, double hi = kInf,
                     std::string name = {}) {
        objective.push_back(cost);
        lower.push_back(lo);
        upper.push_back(hi);
        if (!name.empty() || !names.empty()) {
            names.resize(objective.size() - 1);
            names.push_back(std::move(name));
        }
        return static_cast<int>(objective.size()) - 1;
    }

    void add_row(std::vector<std::pair<int, double>> coeffs, Relation rel,
                 double rhs) {
        rows.push_back(Row{std::move(coeffs), rel, rhs});
    }

    std::size_t variable_count() const { return objective.size(); }

    /// Throws InputError on out-of-range indices, non-finite data or
    /// inverted bounds. Infeasibility is not checked here.
    void validate() const;

    /// Plain-text dump: header with variable names, then one line per row
    /// `coeffs... <rel> rhs`. Used by test fixtures.
    std::string dump() const;
};

struct MixedIntegerProgram {
    LinearProgram base;
    std::vector<int> binary_indices; // variables restricted to {0,1}

    void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    double objective_value = 0.0;
    std::vector<double> primal;
    std::vector<double> row_activities;
};

/// Revised simplex, two-phase, with Bland's rule as anti-cycling fallback.
/// Deterministic: identical input yields identical output.
LpSolution solve_lp(const LinearProgram& problem);

/// Exact branch-and-bound over the binary variables: best-bound node
/// selection, most-fractional branching, depth-first tie-break.
/// Throws ResourceError when node_limit is exceeded.
LpSolution solve_milp(const MixedIntegerProgram& problem,
                      long node_limit = 200000);

} // namespace cesshare::solver

#endif
