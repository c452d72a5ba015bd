// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CESSHARE_METRICS_REPORT_HPP
#define CESSHARE_METRICS_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "cesshare/coalition/value.hpp"
#include "cesshare/model/model.hpp"

namespace cesshare::metrics {

/// Bill reduction earned per unit of storage capital:
/// (opex_no_es - opex) / capex. nullopt when capex <= 0 (no storage was
/// bought, so a return on it is undefined -- deliberately distinct from 0).
std::optional<double> value_of_storage(double opex_no_es, double opex, double capex);

/// (baseline - total) / baseline. Negative values are meaningful: a
/// participant paying more than its baseline. `baseline` must be nonzero.
double cost_reduction(double baseline, double total);

struct BuildingRow {
    std::string id;
    double baseline_no_es = 0.0; // operation cost with no storage at all
    double ies_total = 0.0;      // standalone storage: capex + opex
    double ies_opex = 0.0;
    double ies_capex = 0.0;
    double ces_total = 0.0; // allocated share of the shared-storage cost
    double ces_opex = 0.0;  // own bill inside the grand-coalition schedule
    double ces_capex_share = 0.0; // allocated total minus own bill
    double cost_reduction_ies = 0.0;
    double cost_reduction_ces = 0.0;
    std::optional<double> vos_ies; // n/a when no standalone capacity bought
    std::optional<double> vos_ces; // n/a in pooled mode or at zero share
};

struct EconomicReport {
    std::vector<BuildingRow> buildings;

    double baseline_total = 0.0;
    double ies_sum = 0.0;
    double ces_total = 0.0;    // grand-coalition value
    double pooled_total = 0.0; // same community under pooled sharing

    double ces_capex = 0.0;
    double ces_energy_capacity = 0.0;
    double ces_power_capacity = 0.0;
    double pooled_capex = 0.0;

    double cost_reduction_ies = 0.0;
    double cost_reduction_ces = 0.0;
    double cost_reduction_pooled = 0.0;
    std::optional<double> vos_ies;    // community level, per total IES capex
    std::optional<double> vos_ces;    // community level, per shared capex
    std::optional<double> vos_pooled; // community level, pooled variant
};

/// Assembles the no-storage / standalone / shared / pooled comparison for
/// one community and one shared-cost allocation (any method; efficiency is
/// checked). The cache must belong to `m`; the pooled variant is evaluated
/// on a separate internal cache.
EconomicReport build_report(const model::CommunityModel& m,
                            coalition::CharacteristicCache& cache,
                            const std::vector<double>& allocation);

/// One row per building plus a final "community" row; full precision,
/// undefined ratios as "n/a".
std::string report_to_csv(const EconomicReport& report);
std::string report_to_json(const EconomicReport& report);

} // namespace cesshare::metrics

#endif
