// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#include "cesshare/coalition/value.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cesshare/errors.hpp"

namespace cesshare::coalition {

namespace {

std::string coalition_label(CoalitionKey key) {
    std::string out = "{";
    bool first = true;
    for (int i : key.members()) {
        if (!first) out += ",";
        out += std::to_string(i);
        first = false;
    }
    return out + "}";
}

// Adds the capacity and dispatch variables plus every row of the relaxed
// sizing program. When `s_base >= 0` the rows are the mixed-integer variant:
// the power balance holds only when the building's selector is one, and all
// grid/storage activity is forced to zero when it is zero.
void add_dispatch_structure(SizingProblem& sp, const CommunityModel& model,
                            int s_base) {
    const int T = model.period_count();
    const int W = model.scenario_count();
    const double dt = model.scenarios.period_length_hours;
    const auto& st = model.storage;
    const bool pooled = model.sharing_mode == model::SharingMode::Pooled;
    const bool milp = s_base >= 0;
    auto& lp = sp.lp;

    lp.add_variable(st.k_e, 0.0, solver::kInf, "E");
    lp.add_variable(st.k_p, 0.0, solver::kInf, "P");

    const double e_lo = pooled ? -solver::kInf : 0.0;
    for (std::size_t m = 0; m < sp.members.size(); ++m) {
        for (int w = 0; w < W; ++w) {
            const double rho = model.scenarios.probabilities[w];
            const std::string tag =
                "b" + std::to_string(sp.members[m]) + "w" + std::to_string(w);
            for (int t = 0; t < T; ++t)
                lp.add_variable(0.0, 0.0, st.p_ch_max, "pch_" + tag + "t" + std::to_string(t));
            for (int t = 0; t < T; ++t)
                lp.add_variable(0.0, 0.0, st.p_dis_max, "pdis_" + tag + "t" + std::to_string(t));
            for (int t = 0; t < T; ++t)
                lp.add_variable(0.0, -solver::kInf, solver::kInf,
                                "pb_" + tag + "t" + std::to_string(t));
            for (int t = 0; t < T; ++t)
                lp.add_variable(0.0, e_lo, solver::kInf, "eb_" + tag + "t" + std::to_string(t));
            for (int t = 0; t < T; ++t)
                lp.add_variable(rho * model.tariff.purchase[t] * dt, 0.0, st.p_g_max,
                                "pgp_" + tag + "t" + std::to_string(t));
            for (int t = 0; t < T; ++t)
                lp.add_variable(-rho * model.tariff.sell[t] * dt, 0.0, st.p_g_max,
                                "pgm_" + tag + "t" + std::to_string(t));
            lp.add_variable(rho * model.tariff.demand_charge, 0.0, solver::kInf,
                            "pgmax_" + tag);
        }
    }

    for (std::size_t m = 0; m < sp.members.size(); ++m) {
        const int b = sp.members[m];
        const auto& prof = model.buildings[b];
        for (int w = 0; w < W; ++w) {
            for (int t = 0; t < T; ++t) {
                const int mi = static_cast<int>(m);
                // net battery power definition
                lp.add_row({{sp.var_p_b(mi, w, t), 1.0},
                            {sp.var_p_ch(mi, w, t), -1.0},
                            {sp.var_p_dis(mi, w, t), 1.0}},
                           solver::Relation::Equal, 0.0);
                // state-of-charge recursion from an empty initial store
                solver::Row rec;
                rec.coeffs = {{sp.var_e_b(mi, w, t), 1.0},
                                    {sp.var_p_ch(mi, w, t), -dt * st.eta_ch},
                                    {sp.var_p_dis(mi, w, t), dt / st.eta_dis}};
                if (t > 0) rec.coeffs.push_back({sp.var_e_b(mi, w, t - 1), -1.0});
                rec.rel = solver::Relation::Equal;
                rec.rhs = 0.0;
                lp.add_row(rec.coeffs, rec.rel, rec.rhs);

                const double net = prof.demand(w, t) - prof.renewable(w, t);
                if (!milp) {
                    lp.add_row({{sp.var_p_gplus(mi, w, t), 1.0},
                                {sp.var_p_gminus(mi, w, t), -1.0},
                                {sp.var_p_b(mi, w, t), -1.0}},
                               solver::Relation::Equal, net);
                } else {
                    // balance active only when s_b = 1; the big-M pair keeps
                    // the selected coalition's value identical to the plain
                    // program (a one-sided form could dodge export peaks).
                    const double m_lo = std::max(net, 0.0);
                    const double m_hi = std::max(-net, 0.0);
                    lp.add_row({{sp.var_p_gplus(mi, w, t), 1.0},
                                {sp.var_p_gminus(mi, w, t), -1.0},
                                {sp.var_p_b(mi, w, t), -1.0},
                                {s_base + b, -m_lo}},
                               solver::Relation::GreaterEqual, net - m_lo);
                    lp.add_row({{sp.var_p_gplus(mi, w, t), 1.0},
                                {sp.var_p_gminus(mi, w, t), -1.0},
                                {sp.var_p_b(mi, w, t), -1.0},
                                {s_base + b, m_hi}},
                               solver::Relation::LessEqual, net + m_hi);
                    lp.add_row({{sp.var_p_ch(mi, w, t), 1.0}, {s_base + b, -st.p_ch_max}},
                               solver::Relation::LessEqual, 0.0);
                    lp.add_row({{sp.var_p_dis(mi, w, t), 1.0}, {s_base + b, -st.p_dis_max}},
                               solver::Relation::LessEqual, 0.0);
                    lp.add_row({{sp.var_p_gplus(mi, w, t), 1.0}, {s_base + b, -st.p_g_max}},
                               solver::Relation::LessEqual, 0.0);
                    lp.add_row({{sp.var_p_gminus(mi, w, t), 1.0}, {s_base + b, -st.p_g_max}},
                               solver::Relation::LessEqual, 0.0);
                }

                // scenario peak covers import, and export unless waived
                lp.add_row({{sp.var_p_gplus(mi, w, t), 1.0}, {sp.var_p_gmax(mi, w), -1.0}},
                           solver::Relation::LessEqual, 0.0);
                if (!model.demand_charge_import_only)
                    lp.add_row({{sp.var_p_gminus(mi, w, t), 1.0}, {sp.var_p_gmax(mi, w), -1.0}},
                               solver::Relation::LessEqual, 0.0);
            }
            if (model.periodic_soc)
                lp.add_row({{sp.var_e_b(static_cast<int>(m), w, T - 1), 1.0}},
                           solver::Relation::Equal, 0.0);
        }
    }

    // shared capacity coupling, and the pooled nonnegativity of the summed
    // state of charge
    for (int w = 0; w < W; ++w) {
        for (int t = 0; t < T; ++t) {
            solver::Row cap_e, cap_ch, cap_dis, pool;
            for (std::size_t m = 0; m < sp.members.size(); ++m) {
                const int mi = static_cast<int>(m);
                cap_e.coeffs.push_back({sp.var_e_b(mi, w, t), 1.0});
                cap_ch.coeffs.push_back({sp.var_p_ch(mi, w, t), 1.0});
                cap_dis.coeffs.push_back({sp.var_p_dis(mi, w, t), 1.0});
                pool.coeffs.push_back({sp.var_e_b(mi, w, t), 1.0});
            }
            cap_e.coeffs.push_back({sp.var_energy_capacity(), -1.0});
            cap_ch.coeffs.push_back({sp.var_power_capacity(), -1.0});
            cap_dis.coeffs.push_back({sp.var_power_capacity(), -1.0});
            lp.add_row(cap_e.coeffs, solver::Relation::LessEqual, 0.0);
            lp.add_row(cap_ch.coeffs, solver::Relation::LessEqual, 0.0);
            lp.add_row(cap_dis.coeffs, solver::Relation::LessEqual, 0.0);
            if (pooled)
                lp.add_row(pool.coeffs, solver::Relation::GreaterEqual, 0.0);
        }
    }
}

} // namespace

SizingProblem build_sizing_problem(const CommunityModel& model, CoalitionKey coalition) {
    model.validate();
    if (coalition.empty())
        throw InputError("cannot build sizing problem for the empty coalition");
    for (int i : coalition.members())
        if (i >= model.building_count())
            throw InputError("coalition member " + std::to_string(i) +
                             " out of range for " + std::to_string(model.building_count()) +
                             " buildings");
    SizingProblem sp;
    sp.members = coalition.members();
    sp.scenario_count = model.scenario_count();
    sp.period_count = model.period_count();
    add_dispatch_structure(sp, model, /*s_base=*/-1);
    return sp;
}

CoalitionOutcome evaluate_coalition(const CommunityModel& model, CoalitionKey coalition,
                                    CharacteristicCache* cache) {
    if (cache) {
        if (cache->model_hash() != model.content_hash())
            throw ValidationError("characteristic cache was built for a different model");
        if (auto hit = cache->lookup(coalition)) return *hit;
    }

    SizingProblem sp = build_sizing_problem(model, coalition);
    const solver::LpSolution sol = solver::solve_lp(sp.lp);
    if (sol.status != solver::SolveStatus::Optimal)
        throw InternalError("sizing program for coalition " + coalition_label(coalition) +
                            " did not solve to optimality");

    CoalitionOutcome out;
    out.value = sol.objective_value;
    out.energy_capacity = sol.primal[sp.var_energy_capacity()];
    out.power_capacity = sol.primal[sp.var_power_capacity()];
    out.capex = model.storage.k_e * out.energy_capacity +
                model.storage.k_p * out.power_capacity;
    out.expected_opex = out.value - out.capex;

    const int T = sp.period_count, W = sp.scenario_count;
    auto& sch = out.schedule;
    sch.members = sp.members;
    sch.scenario_count = W;
    sch.period_count = T;
    const int M = static_cast<int>(sp.members.size());
    for (auto* field : {&sch.p_ch, &sch.p_dis, &sch.e_b, &sch.p_gplus, &sch.p_gminus})
        field->assign(M, Eigen::MatrixXd::Zero(W, T));
    sch.p_gmax.assign(M, Eigen::VectorXd::Zero(W));
    for (int m = 0; m < M; ++m) {
        for (int w = 0; w < W; ++w) {
            for (int t = 0; t < T; ++t) {
                sch.p_ch[m](w, t) = sol.primal[sp.var_p_ch(m, w, t)];
                sch.p_dis[m](w, t) = sol.primal[sp.var_p_dis(m, w, t)];
                sch.e_b[m](w, t) = sol.primal[sp.var_e_b(m, w, t)];
                sch.p_gplus[m](w, t) = sol.primal[sp.var_p_gplus(m, w, t)];
                sch.p_gminus[m](w, t) = sol.primal[sp.var_p_gminus(m, w, t)];
            }
            sch.p_gmax[m](w) = sol.primal[sp.var_p_gmax(m, w)];
        }
    }

    verify_complementarity(model, out, 1e-6);
    if (cache) return cache->store(coalition, std::move(out));
    return out;
}

double no_storage_cost(const CommunityModel& model, int building) {
    if (building < 0 || building >= model.building_count())
        throw InputError("building index " + std::to_string(building) + " out of range");
    const auto& prof = model.buildings[building];
    const int T = model.period_count(), W = model.scenario_count();
    const double dt = model.scenarios.period_length_hours;
    double total = 0.0;
    for (int w = 0; w < W; ++w) {
        double cost = 0.0, peak = 0.0;
        for (int t = 0; t < T; ++t) {
            const double net = prof.demand(w, t) - prof.renewable(w, t);
            const double imp = std::max(net, 0.0);
            const double exp = std::max(-net, 0.0);
            cost += (model.tariff.purchase[t] * imp - model.tariff.sell[t] * exp) * dt;
            peak = std::max(peak, model.demand_charge_import_only ? imp : std::max(imp, exp));
        }
        total += model.scenarios.probabilities[w] * (cost + model.tariff.demand_charge * peak);
    }
    return total;
}

CoalitionOutcome ies_outcome(const CommunityModel& model, int building,
                             CharacteristicCache* cache) {
    return evaluate_coalition(model, CoalitionKey::singleton(building), cache);
}

double member_operation_cost(const CommunityModel& model,
                             const DispatchSchedule& schedule, int member) {
    if (member < 0 || member >= static_cast<int>(schedule.members.size()))
        throw InputError("schedule member index out of range");
    const double dt = model.scenarios.period_length_hours;
    double total = 0.0;
    for (int w = 0; w < schedule.scenario_count; ++w) {
        double cost = model.tariff.demand_charge * schedule.p_gmax[member](w);
        for (int t = 0; t < schedule.period_count; ++t)
            cost += (model.tariff.purchase[t] * schedule.p_gplus[member](w, t) -
                     model.tariff.sell[t] * schedule.p_gminus[member](w, t)) * dt;
        total += model.scenarios.probabilities[w] * cost;
    }
    return total;
}

std::vector<ComplementarityViolation> verify_complementarity(
    const CommunityModel& model, CoalitionOutcome& outcome, double tol) {
    auto& sch = outcome.schedule;
    const auto& st = model.storage;
    std::vector<ComplementarityViolation> violations;
    bool dirty = false;
    for (int m = 0; m < static_cast<int>(sch.members.size()); ++m) {
        const auto& prof = model.buildings[sch.members[m]];
        for (int w = 0; w < sch.scenario_count; ++w) {
            for (int t = 0; t < sch.period_count; ++t) {
                const double cp = sch.p_ch[m](w, t) * sch.p_dis[m](w, t);
                const double tp = sch.p_gplus[m](w, t) * sch.p_gminus[m](w, t);
                if (cp <= tol && tp <= tol) continue;
                violations.push_back({m, w, t, cp, tp});
                dirty = true;
                if (cp > tol) {
                    // same battery energy flow without the churn
                    const double flow = st.eta_ch * sch.p_ch[m](w, t) -
                                        sch.p_dis[m](w, t) / st.eta_dis;
                    sch.p_ch[m](w, t) = std::max(flow, 0.0) / st.eta_ch;
                    sch.p_dis[m](w, t) = std::max(-flow, 0.0) * st.eta_dis;
                }
                const double grid = sch.p_ch[m](w, t) - sch.p_dis[m](w, t) +
                                    prof.demand(w, t) - prof.renewable(w, t);
                sch.p_gplus[m](w, t) = std::max(grid, 0.0);
                sch.p_gminus[m](w, t) = std::max(-grid, 0.0);
            }
        }
    }
    if (!dirty) return violations;

    // the rewrite may only shrink grid traffic; check limits and cost
    const double feas = 1e-6;
    double opex = 0.0;
    for (int m = 0; m < static_cast<int>(sch.members.size()); ++m) {
        for (int w = 0; w < sch.scenario_count; ++w) {
            for (int t = 0; t < sch.period_count; ++t) {
                if (sch.p_gplus[m](w, t) > sch.p_gmax[m](w) + feas ||
                    (!model.demand_charge_import_only &&
                     sch.p_gminus[m](w, t) > sch.p_gmax[m](w) + feas))
                    throw InternalError("churn-free rewrite exceeded the recorded peak");
                if (sch.p_ch[m](w, t) > st.p_ch_max + feas ||
                    sch.p_dis[m](w, t) > st.p_dis_max + feas ||
                    sch.p_gplus[m](w, t) > st.p_g_max + feas ||
                    sch.p_gminus[m](w, t) > st.p_g_max + feas)
                    throw InternalError("churn-free rewrite exceeded a rate limit");
                if (sch.p_ch[m](w, t) * sch.p_dis[m](w, t) > tol ||
                    sch.p_gplus[m](w, t) * sch.p_gminus[m](w, t) > tol)
                    throw InternalError("churn-free rewrite left a residual violation");
            }
        }
        opex += member_operation_cost(model, sch, m);
    }
    if (std::abs(opex + outcome.capex - outcome.value) > std::max(tol, 1e-9 * std::abs(outcome.value)) * 10.0)
        throw InternalError("churn-free rewrite moved the objective value");
    outcome.expected_opex = opex;
    outcome.value = outcome.capex + opex;
    return violations;
}

ViolationMilp build_violation_milp(const CommunityModel& model,
                                   const std::vector<double>& allocation,
                                   const std::vector<CoalitionKey>& excluded) {
    model.validate();
    const int N = model.building_count();
    if (static_cast<int>(allocation.size()) != N)
        throw InputError("allocation length does not match the building count");

    ViolationMilp out;
    auto& sp = out.layout;
    for (int i = 0; i < N; ++i) sp.members.push_back(i);
    sp.scenario_count = model.scenario_count();
    sp.period_count = model.period_count();
    out.s_base = 2 + N * sp.scenario_count * (6 * sp.period_count + 1);

    add_dispatch_structure(sp, model, out.s_base);
    auto& lp = sp.lp;
    for (int i = 0; i < N; ++i)
        lp.add_variable(-allocation[i], 0.0, 1.0, "s" + std::to_string(i));

    // proper, non-empty coalitions only
    solver::Row card;
    for (int i = 0; i < N; ++i) card.coeffs.push_back({out.s_base + i, 1.0});
    lp.add_row(card.coeffs, solver::Relation::GreaterEqual, 1.0);
    lp.add_row(card.coeffs, solver::Relation::LessEqual, static_cast<double>(N - 1));

    // no-good cuts for coalitions already handled by the caller
    for (const CoalitionKey& key : excluded) {
        solver::Row cut;
        double rhs = 1.0;
        for (int i = 0; i < N; ++i) {
            if (key.contains(i)) {
                cut.coeffs.push_back({out.s_base + i, -1.0});
                rhs -= 1.0;
            } else {
                cut.coeffs.push_back({out.s_base + i, 1.0});
            }
        }
        lp.add_row(cut.coeffs, solver::Relation::GreaterEqual, rhs);
    }

    out.milp.base = std::move(sp.lp);
    sp.lp = solver::LinearProgram{};
    for (int i = 0; i < N; ++i) out.milp.binary_indices.push_back(out.s_base + i);
    return out;
}

} // namespace cesshare::coalition
