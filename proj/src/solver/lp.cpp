// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#include "cesshare/solver/lp.hpp"

#include <cmath>
#include <sstream>

#include "cesshare/errors.hpp"

namespace cesshare::solver {

void LinearProgram::validate() const {
    const int n = static_cast<int>(objective.size());
    if (lower.size() != objective.size() || upper.size() != objective.size())
        throw InputError("LinearProgram: bound vectors must match variable count");
    for (int j = 0; j < n; ++j) {
        if (std::isnan(objective[j]) || std::isinf(objective[j]))
            throw InputError("LinearProgram: non-finite objective coefficient at variable " +
                             std::to_string(j));
        if (std::isnan(lower[j]) || std::isnan(upper[j]))
            throw InputError("LinearProgram: NaN bound at variable " + std::to_string(j));
        if (lower[j] > upper[j])
            throw InputError("LinearProgram: lower > upper at variable " + std::to_string(j));
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Row& row = rows[r];
        if (std::isnan(row.rhs) || std::isinf(row.rhs))
            throw InputError("LinearProgram: non-finite rhs at row " + std::to_string(r));
        for (const auto& [j, v] : row.coeffs) {
            if (j < 0 || j >= n)
                throw InputError("LinearProgram: coefficient index " + std::to_string(j) +
                                 " out of range at row " + std::to_string(r));
            if (std::isnan(v) || std::isinf(v))
                throw InputError("LinearProgram: non-finite coefficient at row " +
                                 std::to_string(r));
        }
    }
}

std::string LinearProgram::dump() const {
    std::ostringstream out;
    out << "# vars:";
    for (std::size_t j = 0; j < objective.size(); ++j) {
        if (j < names.size() && !names[j].empty())
            out << ' ' << names[j];
        else
            out << " x" << j;
    }
    out << '\n';
    for (const Row& row : rows) {
        bool first = true;
        for (const auto& [j, v] : row.coeffs) {
            if (!first) out << ' ';
            out << v << "*x" << j;
            first = false;
        }
        if (first) out << '0';
        switch (row.rel) {
            case Relation::LessEqual: out << " <= "; break;
            case Relation::Equal: out << " = "; break;
            case Relation::GreaterEqual: out << " >= "; break;
        }
        out << row.rhs << '\n';
    }
    return out.str();
}

void MixedIntegerProgram::validate() const {
    base.validate();
    const int n = static_cast<int>(base.variable_count());
    for (int j : binary_indices) {
        if (j < 0 || j >= n)
            throw InputError("MixedIntegerProgram: binary index " + std::to_string(j) +
                             " out of range");
        if (base.lower[j] < -kIntTol || base.upper[j] > 1.0 + kIntTol)
            throw InputError("MixedIntegerProgram: binary variable " + std::to_string(j) +
                             " has bounds outside [0,1]");
    }
}

} // namespace cesshare::solver
