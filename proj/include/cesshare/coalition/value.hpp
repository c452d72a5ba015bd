// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CESSHARE_COALITION_VALUE_HPP
#define CESSHARE_COALITION_VALUE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "cesshare/model/model.hpp"
#include "cesshare/solver/lp.hpp"

namespace cesshare::coalition {

using model::CoalitionKey;
using model::CommunityModel;

/// Optimal operation of the shared store for one coalition: per member index
/// (same order as `members`), one [scenario x period] matrix per quantity.
/// e_b(w, t) is the stored energy at the END of period t; the initial state
/// of charge is zero.
struct DispatchSchedule {
    std::vector<int> members; // building indices, ascending
    int scenario_count = 0;
    int period_count = 0;
    std::vector<Eigen::MatrixXd> p_ch, p_dis, e_b, p_gplus, p_gminus; // kW / kWh
    std::vector<Eigen::VectorXd> p_gmax;                              // [scenario], kW
};

struct CoalitionOutcome {
    double value = 0.0;           // nu(S) = capex + expected_opex
    double energy_capacity = 0.0; // E_S, kWh
    double power_capacity = 0.0;  // P_S, kW
    double capex = 0.0;
    double expected_opex = 0.0;
    DispatchSchedule schedule;
};

/// Memoized characteristic function. Thread-safe; evaluations are
/// deterministic so duplicate inserts for the same key are benign.
class CharacteristicCache {
public:
    explicit CharacteristicCache(const CommunityModel& m)
        : model_hash_(m.content_hash()) {}

    std::uint64_t model_hash() const { return model_hash_; }

    std::optional<CoalitionOutcome> lookup(CoalitionKey key) const {
        std::lock_guard lock(mutex_);
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    CoalitionOutcome store(CoalitionKey key, CoalitionOutcome outcome) {
        std::lock_guard lock(mutex_);
        return entries_.emplace(key, std::move(outcome)).first->second;
    }

    /// Number of distinct coalitions evaluated so far.
    std::size_t query_count() const {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

private:
    std::uint64_t model_hash_;
    mutable std::mutex mutex_;
    std::map<CoalitionKey, CoalitionOutcome> entries_;
};

/// Variable layout of the sizing-and-operation program. Per (member m,
/// scenario w): six period-indexed series plus the scenario peak, after the
/// two capacity variables.
struct SizingProblem {
    solver::LinearProgram lp;
    std::vector<int> members;
    int scenario_count = 0;
    int period_count = 0;

    int var_energy_capacity() const { return 0; }
    int var_power_capacity() const { return 1; }

    int block(int m, int w) const {
        return 2 + (m * scenario_count + w) * (6 * period_count + 1);
    }
    int var_p_ch(int m, int w, int t) const { return block(m, w) + t; }
    int var_p_dis(int m, int w, int t) const { return block(m, w) + period_count + t; }
    int var_p_b(int m, int w, int t) const { return block(m, w) + 2 * period_count + t; }
    /// Stored energy at the end of period t, t in [0, T).
    int var_e_b(int m, int w, int t) const { return block(m, w) + 3 * period_count + t; }
    int var_p_gplus(int m, int w, int t) const { return block(m, w) + 4 * period_count + t; }
    int var_p_gminus(int m, int w, int t) const { return block(m, w) + 5 * period_count + t; }
    int var_p_gmax(int m, int w) const { return block(m, w) + 6 * period_count; }
};

/// Single-stage convex sizing problem for a coalition: capital cost plus
/// probability-weighted operation cost over the admissible dispatch set,
/// with the complementarity rows relaxed. Pooled sharing replaces the
/// per-building nonnegative state of charge with a summed one.
SizingProblem build_sizing_problem(const CommunityModel& model, CoalitionKey coalition);

/// Solves the sizing problem, cleans the schedule of any degenerate
/// simultaneous charge/discharge or buy/sell, and memoizes the outcome.
/// `cache` may be null for a one-off evaluation.
CoalitionOutcome evaluate_coalition(const CommunityModel& model, CoalitionKey coalition,
                                    CharacteristicCache* cache);

/// Operation cost of building i with no storage at all: deficits bought and
/// surpluses sold instantaneously, peak charge on the larger of import and
/// export (import only when the model says so).
double no_storage_cost(const CommunityModel& model, int building);

/// Individual-storage outcome: the coalition value of the singleton {i}.
CoalitionOutcome ies_outcome(const CommunityModel& model, int building,
                             CharacteristicCache* cache);

struct ComplementarityViolation {
    int member; // index into schedule.members
    int scenario;
    int period;
    double charge_product; // p_ch * p_dis
    double trade_product;  // p_gplus * p_gminus
};

/// Flags every simultaneous charge/discharge or buy/sell above `tol`, then
/// rewrites the schedule with the equivalent churn-free operation and checks
/// the objective did not move. Returns the violations found in the original.
/// Throws InternalError if the rewrite changes the objective by more than
/// `tol` or the cleaned schedule fails re-verification.
std::vector<ComplementarityViolation> verify_complementarity(
    const CommunityModel& model, CoalitionOutcome& outcome, double tol);

/// Expected operation cost of one schedule member, per the metering split
/// used by the proportional method and the reports.
double member_operation_cost(const CommunityModel& model,
                             const DispatchSchedule& schedule, int member);

/// The violated-coalition search blended with the sizing program: binaries
/// s_i choose the coalition, dispatch variables price it. Objective is
/// MINIMIZED; the excess is  c* = -(objective) - z  for the caller's z.
struct ViolationMilp {
    solver::MixedIntegerProgram milp;
    SizingProblem layout; // layout.lp is empty; index helpers only
    int var_s(int i) const { return s_base + i; }
    int s_base = 0;
};

ViolationMilp build_violation_milp(const CommunityModel& model,
                                   const std::vector<double>& allocation,
                                   const std::vector<CoalitionKey>& excluded);

} // namespace cesshare::coalition

#endif
