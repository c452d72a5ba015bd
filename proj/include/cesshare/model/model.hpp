// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CESSHARE_MODEL_MODEL_HPP
#define CESSHARE_MODEL_MODEL_HPP

#include <Eigen/Dense>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace cesshare::model {

/// Bitmask over building indices identifying a sub-coalition. Building i is a
/// member iff bit i is set. Supports communities up to 64 buildings; the
/// shipped guards cap N well below that.
struct CoalitionKey {
    std::uint64_t mask = 0;

    static CoalitionKey grand(int n) {
        return CoalitionKey{n >= 64 ? ~0ull : (1ull << n) - 1};
    }
    static CoalitionKey singleton(int i) { return CoalitionKey{1ull << i}; }

    bool contains(int i) const { return (mask >> i) & 1; }
    bool empty() const { return mask == 0; }
    int size() const { return __builtin_popcountll(mask); }

    CoalitionKey with(int i) const { return CoalitionKey{mask | (1ull << i)}; }
    CoalitionKey unite(CoalitionKey other) const { return CoalitionKey{mask | other.mask}; }
    bool intersects(CoalitionKey other) const { return (mask & other.mask) != 0; }

    std::vector<int> members() const {
        std::vector<int> out;
        for (int i = 0; i < 64; ++i)
            if (contains(i)) out.push_back(i);
        return out;
    }

    auto operator<=>(const CoalitionKey&) const = default;
};

struct BuildingProfile {
    std::string id;
    Eigen::MatrixXd demand;    // [scenario x period], kW, non-elastic load
    Eigen::MatrixXd renewable; // [scenario x period], kW
};

struct ScenarioSet {
    std::vector<double> probabilities;
    int period_count = 0;
    double period_length_hours = 1.0;

    int scenario_count() const { return static_cast<int>(probabilities.size()); }
};

struct Tariff {
    std::vector<double> purchase; // currency/kWh, length T
    std::vector<double> sell;     // currency/kWh, length T
    double demand_charge = 0.0;   // currency/kW, applied per scenario-day
};

struct StorageParams {
    double k_e = 0.0;      // currency/kWh per planning cycle
    double k_p = 0.0;      // currency/kW per planning cycle
    double eta_ch = 1.0;
    double eta_dis = 1.0;
    double p_ch_max = 1e3;  // kW, per building
    double p_dis_max = 1e3; // kW, per building
    double p_g_max = 1e3;   // kW, per-building grid-exchange cap
};

enum class SharingMode { PerBuilding, Pooled };

struct CommunityModel {
    std::vector<BuildingProfile> buildings;
    ScenarioSet scenarios;
    Tariff tariff;
    StorageParams storage;
    SharingMode sharing_mode = SharingMode::PerBuilding;
    bool periodic_soc = false;
    bool demand_charge_import_only = false;

    int building_count() const { return static_cast<int>(buildings.size()); }
    int scenario_count() const { return scenarios.scenario_count(); }
    int period_count() const { return scenarios.period_count; }

    /// Index of a building by id label; throws ValidationError when unknown.
    int index_of(const std::string& id) const;

    /// Throws ValidationError naming the offending field.
    void validate() const;

    /// Content fingerprint covering all numeric data and option flags; used
    /// to key characteristic-function caches across runs.
    std::uint64_t content_hash() const;
};

/// Capital-recovery-factor amortization of a projected capacity price into a
/// per-planning-cycle price. r = 0 degenerates to straight-line 1/L.
double amortize_capacity_price(double price, double rate, int lifetime_years,
                               int cycles_per_year);

std::pair<double, double> amortized_capacity_prices(double price_e, double price_p,
                                                    double rate, int lifetime_years,
                                                    int cycles_per_year);

/// Purchase price at period t; throws InputError on a bad index.
double tariff_price_at(const Tariff& tariff, int t);

/// Singapore time-of-use defaults: off-peak [23:00, 08:00) at 0.1271,
/// peak [08:00, 23:00) at 0.2085, zero sell price, demand charge 0.1335.
/// Periods map onto hours as floor(t * 24 / T).
Tariff singapore_default_tariff(int period_count);

} // namespace cesshare::model

#endif
