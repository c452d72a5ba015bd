// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#include "cesshare/model/synth.hpp"

#include <cmath>
#include <random>
#include <string>

#include "cesshare/errors.hpp"

namespace cesshare::model {

namespace {

// Explicit 53-bit uniform so output does not depend on libstdc++
// distribution internals.
double uniform(std::mt19937_64& rng, double a, double b) {
    const double u = (rng() >> 11) * 0x1.0p-53;
    return a + u * (b - a);
}

// Piecewise-constant daily archetypes on the 24 hour grid, in kW.
double archetype_demand(int kind, int hour) {
    switch (kind % 3) {
        case 0: // office: day peak
            if (hour >= 8 && hour < 18) return 120.0;
            if (hour >= 6 && hour < 8) return 60.0;
            return 30.0;
        case 1: // hotel: evening peak
            if (hour >= 17 && hour < 23) return 110.0;
            if (hour >= 6 && hour < 10) return 80.0;
            return 50.0;
        default: // school: day peak, sharp drop after classes
            if (hour >= 7 && hour < 16) return 100.0;
            return 20.0;
    }
}

} // namespace

CommunityModel generate_synthetic(int n_buildings, int n_scenarios, int periods,
                                  std::uint64_t seed) {
    if (n_buildings < 1 || n_scenarios < 1 || periods < 1)
        throw InputError("generate_synthetic: dimensions must be >= 1");

    std::mt19937_64 rng(seed);
    CommunityModel model;
    model.scenarios.period_count = periods;
    model.scenarios.period_length_hours = 24.0 / periods;

    // Scenario probabilities: seeded weights, normalized.
    std::vector<double> weights(n_scenarios);
    double total = 0.0;
    for (double& w : weights) {
        w = uniform(rng, 0.5, 1.5);
        total += w;
    }
    model.scenarios.probabilities.resize(n_scenarios);
    double acc = 0.0;
    for (int w = 0; w + 1 < n_scenarios; ++w) {
        model.scenarios.probabilities[w] =
            std::round(weights[w] / total * 1e9) / 1e9;
        acc += model.scenarios.probabilities[w];
    }
    model.scenarios.probabilities[n_scenarios - 1] = 1.0 - acc; // exact sum 1

    model.tariff = singapore_default_tariff(periods);
    auto [k_e, k_p] = amortized_capacity_prices(100.0, 300.0, 0.06, 10, 365);
    model.storage.k_e = k_e;
    model.storage.k_p = k_p;
    model.storage.eta_ch = 0.9;
    model.storage.eta_dis = 0.9;
    model.storage.p_g_max = 1e3;
    model.storage.p_ch_max = 1e3;
    model.storage.p_dis_max = 1e3;

    model.buildings.resize(n_buildings);
    for (int i = 0; i < n_buildings; ++i) {
        BuildingProfile& b = model.buildings[i];
        b.id = "B" + std::to_string(i + 1);
        b.demand.resize(n_scenarios, periods);
        b.renewable.resize(n_scenarios, periods);

        const double size_factor = uniform(rng, 0.7, 1.4);
        const double solar_capacity = uniform(rng, 40.0, 140.0);

        for (int w = 0; w < n_scenarios; ++w) {
            const double weather = uniform(rng, 0.2, 1.0); // cloudy .. clear
            const double activity = uniform(rng, 0.7, 1.1);
            for (int t = 0; t < periods; ++t) {
                const double hour = (t + 0.5) * 24.0 / periods;
                const double base =
                    archetype_demand(i, static_cast<int>(hour)) * size_factor * activity;
                const double jitter = uniform(rng, 0.9, 1.1);
                b.demand(w, t) = std::round(base * jitter * 1e4) / 1e4;

                // Solar bell between 06:00 and 18:00.
                const double sun =
                    hour > 6 && hour < 18 ? std::sin(M_PI * (hour - 6.0) / 12.0) : 0.0;
                b.renewable(w, t) =
                    std::round(solar_capacity * weather * sun * 1e4) / 1e4;
            }
        }
    }

    model.validate();
    return model;
}

} // namespace cesshare::model
