// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#include "cesshare/metrics/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "cesshare/errors.hpp"

namespace cesshare::metrics {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : "n/a"; }

nlohmann::json opt_json(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

} // namespace

std::optional<double> value_of_storage(double opex_no_es, double opex, double capex) {
    if (capex <= 0.0) return std::nullopt;
    return (opex_no_es - opex) / capex;
}

double cost_reduction(double baseline, double total) {
    if (baseline == 0.0) throw InputError("cost reduction needs a nonzero baseline");
    return (baseline - total) / baseline;
}

EconomicReport build_report(const model::CommunityModel& m,
                            coalition::CharacteristicCache& cache,
                            const std::vector<double>& allocation) {
    if (cache.model_hash() != m.content_hash())
        throw ValidationError("characteristic cache was built for a different model");
    const int n = m.building_count();
    if (static_cast<int>(allocation.size()) != n)
        throw InputError("allocation length does not match the building count");
    const bool pooled_mode = m.sharing_mode == model::SharingMode::Pooled;

    const auto grand =
        coalition::evaluate_coalition(m, model::CoalitionKey::grand(n), &cache);
    double total = 0.0;
    for (double xi : allocation) total += xi;
    if (std::abs(total - grand.value) > 1e-6)
        throw InputError("allocation does not add up to the shared-storage cost");

    model::CommunityModel pooled = m;
    pooled.sharing_mode = model::SharingMode::Pooled;
    coalition::CoalitionOutcome pooled_grand;
    if (pooled_mode) {
        pooled_grand = grand;
    } else {
        coalition::CharacteristicCache pooled_cache(pooled);
        pooled_grand = coalition::evaluate_coalition(
            pooled, model::CoalitionKey::grand(n), &pooled_cache);
    }

    EconomicReport rep;
    rep.ces_total = grand.value;
    rep.ces_capex = grand.capex;
    rep.ces_energy_capacity = grand.energy_capacity;
    rep.ces_power_capacity = grand.power_capacity;
    rep.pooled_total = pooled_grand.value;
    rep.pooled_capex = pooled_grand.capex;

    double ies_capex_sum = 0.0, ies_opex_sum = 0.0, ces_opex_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        BuildingRow row;
        row.id = m.buildings[i].id;
        row.baseline_no_es = coalition::no_storage_cost(m, i);
        const auto ies = coalition::ies_outcome(m, i, &cache);
        row.ies_total = ies.value;
        row.ies_opex = ies.expected_opex;
        row.ies_capex = ies.capex;
        row.ces_total = allocation[i];
        row.ces_opex = coalition::member_operation_cost(m, grand.schedule, i);
        row.ces_capex_share = row.ces_total - row.ces_opex;
        row.cost_reduction_ies = cost_reduction(row.baseline_no_es, row.ies_total);
        row.cost_reduction_ces = cost_reduction(row.baseline_no_es, row.ces_total);
        row.vos_ies = value_of_storage(row.baseline_no_es, row.ies_opex, row.ies_capex);
        // under pooled sharing the capital/bill split per building is not
        // observable, so the per-building return stays undefined
        row.vos_ces = pooled_mode ? std::nullopt
                                  : value_of_storage(row.baseline_no_es, row.ces_opex,
                                                     row.ces_capex_share);
        rep.baseline_total += row.baseline_no_es;
        rep.ies_sum += row.ies_total;
        ies_capex_sum += row.ies_capex;
        ies_opex_sum += row.ies_opex;
        ces_opex_sum += row.ces_opex;
        rep.buildings.push_back(std::move(row));
    }

    rep.cost_reduction_ies = cost_reduction(rep.baseline_total, rep.ies_sum);
    rep.cost_reduction_ces = cost_reduction(rep.baseline_total, rep.ces_total);
    rep.cost_reduction_pooled = cost_reduction(rep.baseline_total, rep.pooled_total);
    rep.vos_ies = value_of_storage(rep.baseline_total, ies_opex_sum, ies_capex_sum);
    rep.vos_ces = value_of_storage(rep.baseline_total, ces_opex_sum, rep.ces_capex);
    rep.vos_pooled = value_of_storage(rep.baseline_total,
                                      rep.pooled_total - rep.pooled_capex,
                                      rep.pooled_capex);
    return rep;
}

std::string report_to_csv(const EconomicReport& report) {
    std::ostringstream out;
    out << "id,baseline_no_es,ies_total,ces_total,cost_reduction_ies,"
           "cost_reduction_ces,vos_ies,vos_ces\n";
    for (const BuildingRow& row : report.buildings)
        out << row.id << ',' << num(row.baseline_no_es) << ',' << num(row.ies_total)
            << ',' << num(row.ces_total) << ',' << num(row.cost_reduction_ies) << ','
            << num(row.cost_reduction_ces) << ',' << opt(row.vos_ies) << ','
            << opt(row.vos_ces) << '\n';
    out << "community," << num(report.baseline_total) << ',' << num(report.ies_sum)
        << ',' << num(report.ces_total) << ',' << num(report.cost_reduction_ies) << ','
        << num(report.cost_reduction_ces) << ',' << opt(report.vos_ies) << ','
        << opt(report.vos_ces) << '\n';
    return out.str();
}

std::string report_to_json(const EconomicReport& report) {
    nlohmann::json doc;
    for (const BuildingRow& row : report.buildings) {
        doc["buildings"].push_back({{"id", row.id},
                                    {"baseline_no_es", row.baseline_no_es},
                                    {"ies_total", row.ies_total},
                                    {"ies_opex", row.ies_opex},
                                    {"ies_capex", row.ies_capex},
                                    {"ces_total", row.ces_total},
                                    {"ces_opex", row.ces_opex},
                                    {"ces_capex_share", row.ces_capex_share},
                                    {"cost_reduction_ies", row.cost_reduction_ies},
                                    {"cost_reduction_ces", row.cost_reduction_ces},
                                    {"vos_ies", opt_json(row.vos_ies)},
                                    {"vos_ces", opt_json(row.vos_ces)}});
    }
    doc["community"] = {{"baseline_total", report.baseline_total},
                        {"ies_sum", report.ies_sum},
                        {"ces_total", report.ces_total},
                        {"pooled_total", report.pooled_total},
                        {"ces_capex", report.ces_capex},
                        {"ces_energy_capacity", report.ces_energy_capacity},
                        {"ces_power_capacity", report.ces_power_capacity},
                        {"pooled_capex", report.pooled_capex},
                        {"cost_reduction_ies", report.cost_reduction_ies},
                        {"cost_reduction_ces", report.cost_reduction_ces},
                        {"cost_reduction_pooled", report.cost_reduction_pooled},
                        {"vos_ies", opt_json(report.vos_ies)},
                        {"vos_ces", opt_json(report.vos_ces)},
                        {"vos_pooled", opt_json(report.vos_pooled)}};
    return doc.dump(2) + "\n";
}

} // namespace cesshare::metrics
