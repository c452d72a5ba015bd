// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#include "cesshare/model/model.hpp"

#include <cmath>
#include <cstring>
#include <set>
#include <sstream>

#include "cesshare/errors.hpp"

namespace cesshare::model {

namespace {

void require(bool cond, const std::string& message) {
    if (!cond) throw ValidationError(message);
}

void hash_bytes(std::uint64_t& h, const void* data, std::size_t len) {
    // FNV-1a, enough for cache keying.
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
}

void hash_double(std::uint64_t& h, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    hash_bytes(h, &bits, sizeof bits);
}

void hash_matrix(std::uint64_t& h, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) hash_double(h, m(r, c));
}

} // namespace

int CommunityModel::index_of(const std::string& id) const {
    for (int i = 0; i < building_count(); ++i)
        if (buildings[i].id == id) return i;
    throw ValidationError("unknown building id '" + id + "'");
}

void CommunityModel::validate() const {
    const int n = building_count();
    const int backing_scenarios = scenario_count();
    const int periods = period_count();

    require(n >= 1, "buildings: at least one building required");
    require(periods >= 1, "scenarios.period_count: must be >= 1");
    require(scenarios.period_length_hours > 0,
            "scenarios.period_length_hours: must be > 0");
    require(backing_scenarios >= 1, "scenarios.probabilities: must be nonempty");

    double psum = 0.0;
    for (std::size_t w = 0; w < scenarios.probabilities.size(); ++w) {
        const double p = scenarios.probabilities[w];
        require(std::isfinite(p) && p >= 0,
                "scenarios.probabilities: negative or non-finite probability at scenario " +
                    std::to_string(w));
        psum += p;
    }
    if (std::abs(psum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "scenarios.probabilities: probabilities sum to " << psum;
        throw ValidationError(msg.str());
    }

    std::set<std::string> seen;
    for (const BuildingProfile& b : buildings) {
        require(!b.id.empty(), "buildings: empty building id");
        require(seen.insert(b.id).second, "buildings: duplicate id '" + b.id + "'");
        require(b.demand.rows() == backing_scenarios && b.demand.cols() == periods,
                "buildings[" + b.id + "].demand: shape mismatch with scenarios");
        require(b.renewable.rows() == backing_scenarios && b.renewable.cols() == periods,
                "buildings[" + b.id + "].renewable: shape mismatch with scenarios");
        require((b.demand.array() >= 0).all() && b.demand.allFinite(),
                "buildings[" + b.id + "].demand: entries must be finite and >= 0");
        require((b.renewable.array() >= 0).all() && b.renewable.allFinite(),
                "buildings[" + b.id + "].renewable: entries must be finite and >= 0");
    }

    require(static_cast<int>(tariff.purchase.size()) == periods,
            "tariff.purchase: length must equal period_count");
    require(static_cast<int>(tariff.sell.size()) == periods,
            "tariff.sell: length must equal period_count");
    require(std::isfinite(tariff.demand_charge) && tariff.demand_charge >= 0,
            "tariff.demand_charge: must be finite and >= 0");
    for (int t = 0; t < periods; ++t) {
        require(std::isfinite(tariff.purchase[t]) && std::isfinite(tariff.sell[t]),
                "tariff: non-finite price at period " + std::to_string(t));
        require(tariff.sell[t] >= 0,
                "tariff.sell: negative price at period " + std::to_string(t));
        if (tariff.purchase[t] <= tariff.sell[t]) {
            std::ostringstream msg;
            msg << "tariff: sell price " << tariff.sell[t]
                << " >= purchase price " << tariff.purchase[t] << " at period " << t
                << " (violates assumption A1: purchase must exceed sell)";
            throw ValidationError(msg.str());
        }
    }

    require(storage.k_e >= 0 && storage.k_p >= 0,
            "storage: amortized capacity prices must be >= 0");
    require(storage.eta_ch > 0 && storage.eta_ch <= 1,
            "storage.eta_ch: must be in (0, 1]");
    require(storage.eta_dis > 0 && storage.eta_dis <= 1,
            "storage.eta_dis: must be in (0, 1]");
    require(storage.p_ch_max > 0, "storage.p_ch_max: must be > 0");
    require(storage.p_dis_max > 0, "storage.p_dis_max: must be > 0");
    require(storage.p_g_max > 0, "storage.p_g_max: must be > 0");

    // Validity of the complementarity relaxation: round-trip losses or a
    // strict purchase/sell spread must remove any incentive to churn.
    bool spread_everywhere = true;
    for (int t = 0; t < periods; ++t)
        if (tariff.purchase[t] <= tariff.sell[t]) spread_everywhere = false;
    require(storage.eta_ch * storage.eta_dis < 1.0 || spread_everywhere,
            "storage: eta_ch*eta_dis = 1 with purchase <= sell voids the "
            "complementarity relaxation");
}

std::uint64_t CommunityModel::content_hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (const BuildingProfile& b : buildings) {
        hash_bytes(h, b.id.data(), b.id.size());
        hash_matrix(h, b.demand);
        hash_matrix(h, b.renewable);
    }
    for (double p : scenarios.probabilities) hash_double(h, p);
    hash_double(h, scenarios.period_count);
    hash_double(h, scenarios.period_length_hours);
    for (double v : tariff.purchase) hash_double(h, v);
    for (double v : tariff.sell) hash_double(h, v);
    hash_double(h, tariff.demand_charge);
    hash_double(h, storage.k_e);
    hash_double(h, storage.k_p);
    hash_double(h, storage.eta_ch);
    hash_double(h, storage.eta_dis);
    hash_double(h, storage.p_ch_max);
    hash_double(h, storage.p_dis_max);
    hash_double(h, storage.p_g_max);
    hash_double(h, sharing_mode == SharingMode::Pooled ? 1.0 : 0.0);
    hash_double(h, periodic_soc ? 1.0 : 0.0);
    hash_double(h, demand_charge_import_only ? 1.0 : 0.0);
    return h;
}

double amortize_capacity_price(double price, double rate, int lifetime_years,
                               int cycles_per_year) {
    if (!std::isfinite(price) || !std::isfinite(rate))
        throw InputError("amortize_capacity_price: non-finite input");
    if (rate < 0 || lifetime_years < 1 || cycles_per_year < 1)
        throw InputError("amortize_capacity_price: rate >= 0, lifetime >= 1, "
                         "cycles_per_year >= 1 required");
    double crf;
    if (rate == 0.0) {
        crf = 1.0 / lifetime_years;
    } else {
        const double growth = std::pow(1.0 + rate, lifetime_years);
        crf = rate * growth / (growth - 1.0);
    }
    return price * crf / cycles_per_year;
}

std::pair<double, double> amortized_capacity_prices(double price_e, double price_p,
                                                    double rate, int lifetime_years,
                                                    int cycles_per_year) {
    return {amortize_capacity_price(price_e, rate, lifetime_years, cycles_per_year),
            amortize_capacity_price(price_p, rate, lifetime_years, cycles_per_year)};
}

double tariff_price_at(const Tariff& tariff, int t) {
    if (t < 0 || t >= static_cast<int>(tariff.purchase.size()))
        throw InputError("tariff_price_at: period index " + std::to_string(t) +
                         " out of range");
    return tariff.purchase[t];
}

Tariff singapore_default_tariff(int period_count) {
    Tariff tariff;
    tariff.purchase.resize(period_count);
    tariff.sell.assign(period_count, 0.0);
    tariff.demand_charge = 0.1335;
    for (int t = 0; t < period_count; ++t) {
        const int hour = t * 24 / period_count;
        const bool peak = hour >= 8 && hour < 23;
        tariff.purchase[t] = peak ? 0.2085 : 0.1271;
    }
    return tariff;
}

} // namespace cesshare::model
