// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#include "cesshare/model/load.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "cesshare/errors.hpp"

namespace cesshare::model {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream stream(s);
    while (std::getline(stream, item, sep)) out.push_back(trim(item));
    return out;
}

double parse_double(const std::string& s, const std::string& field) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(field + ": cannot parse number '" + s + "'");
    }
}

long parse_long(const std::string& s, const std::string& field) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(field + ": cannot parse integer '" + s + "'");
    }
}

// Minimal INI: [section] headers, key = value lines, '#' or ';' comments.
using IniData = std::map<std::string, std::map<std::string, std::string>>;

IniData parse_ini(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path.string() + "'");
    IniData data;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config line " + std::to_string(lineno) +
                                      ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
        data[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return data;
}

std::optional<std::string> ini_get(const IniData& ini, const std::string& section,
                                   const std::string& key) {
    const auto sit = ini.find(section);
    if (sit == ini.end()) return std::nullopt;
    const auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return std::nullopt;
    return kit->second;
}

double ini_number(const IniData& ini, const std::string& section,
                  const std::string& key, std::optional<double> fallback = {}) {
    const auto raw = ini_get(ini, section, key);
    if (!raw) {
        if (fallback) return *fallback;
        throw ValidationError("config: missing key [" + section + "] " + key);
    }
    return parse_double(*raw, "[" + section + "] " + key);
}

bool ini_bool(const IniData& ini, const std::string& section, const std::string& key,
              bool fallback) {
    const auto raw = ini_get(ini, section, key);
    if (!raw) return fallback;
    if (*raw == "true" || *raw == "1" || *raw == "yes") return true;
    if (*raw == "false" || *raw == "0" || *raw == "no") return false;
    throw ValidationError("config: [" + section + "] " + key +
                          " must be a boolean, got '" + *raw + "'");
}

// Price vector from config: scalar, comma list of length T, or TOU bands.
std::vector<double> price_vector(const IniData& ini, const std::string& key, int periods,
                                 std::optional<double> fallback_scalar = {}) {
    const auto raw = ini_get(ini, "tariff", key);
    if (raw) {
        const auto parts = split(*raw, ',');
        if (parts.size() == 1)
            return std::vector<double>(periods,
                                       parse_double(parts[0], "[tariff] " + key));
        if (static_cast<int>(parts.size()) != periods)
            throw ValidationError("[tariff] " + key + ": expected 1 or " +
                                  std::to_string(periods) + " values, got " +
                                  std::to_string(parts.size()));
        std::vector<double> out(periods);
        for (int t = 0; t < periods; ++t)
            out[t] = parse_double(parts[t], "[tariff] " + key);
        return out;
    }
    // TOU bands keyed <key>_peak / <key>_offpeak with hour boundaries.
    const auto peak = ini_get(ini, "tariff", key + "_peak");
    const auto offpeak = ini_get(ini, "tariff", key + "_offpeak");
    if (peak && offpeak) {
        const double vp = parse_double(*peak, "[tariff] " + key + "_peak");
        const double vo = parse_double(*offpeak, "[tariff] " + key + "_offpeak");
        const long start = parse_long(
            ini_get(ini, "tariff", "peak_start").value_or("8"), "[tariff] peak_start");
        const long end = parse_long(ini_get(ini, "tariff", "peak_end").value_or("23"),
                                    "[tariff] peak_end");
        std::vector<double> out(periods);
        for (int t = 0; t < periods; ++t) {
            const int hour = t * 24 / periods;
            out[t] = (hour >= start && hour < end) ? vp : vo;
        }
        return out;
    }
    if (fallback_scalar) return std::vector<double>(periods, *fallback_scalar);
    throw ValidationError("config: missing key [tariff] " + key);
}

struct ProfileRecord {
    std::string building, scenario;
    long period;
    double demand, renewable;
};

std::vector<ProfileRecord> read_profiles_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("profiles: cannot open '" + path.string() + "'");
    std::string header;
    if (!std::getline(in, header))
        throw ValidationError("profiles: empty file '" + path.string() + "'");
    const auto columns = split(header, ',');
    const std::vector<std::string> expected = {"building_id", "scenario_id", "period",
                                               "demand_kw", "renewable_kw"};
    if (columns != expected)
        throw ValidationError(
            "profiles: header must be 'building_id,scenario_id,period,demand_kw,"
            "renewable_kw'");
    std::vector<ProfileRecord> records;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 5)
            throw ValidationError("profiles line " + std::to_string(lineno) +
                                  ": expected 5 columns");
        const std::string where = "profiles line " + std::to_string(lineno);
        records.push_back({f[0], f[1], parse_long(f[2], where + " period"),
                           parse_double(f[3], where + " demand_kw"),
                           parse_double(f[4], where + " renewable_kw")});
    }
    if (records.empty()) throw ValidationError("profiles: no data rows");
    return records;
}

std::map<std::string, double> read_probabilities_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("probabilities: cannot open '" + path.string() + "'");
    std::string header;
    std::getline(in, header);
    if (split(header, ',') != std::vector<std::string>{"scenario_id", "probability"})
        throw ValidationError("probabilities: header must be 'scenario_id,probability'");
    std::map<std::string, double> out;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 2)
            throw ValidationError("probabilities line " + std::to_string(lineno) +
                                  ": expected 2 columns");
        if (!out.emplace(f[0], parse_double(f[1], "probabilities line " +
                                                    std::to_string(lineno))).second)
            throw ValidationError("probabilities: duplicate scenario_id '" + f[0] + "'");
    }
    return out;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_file_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.parent_path() / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
        out << content;
    }
    fs::rename(tmp, path);
}

CommunityModel load_community(const fs::path& profiles_path,
                              const fs::path& config_path) {
    const auto records = read_profiles_csv(profiles_path);
    const IniData ini = parse_ini(config_path);

    // Building order: first appearance. Scenario order: sorted labels, to
    // match the probabilities file regardless of row order.
    std::vector<std::string> building_ids;
    std::vector<std::string> scenario_ids;
    long max_period = -1;
    for (const auto& rec : records) {
        if (std::find(building_ids.begin(), building_ids.end(), rec.building) ==
            building_ids.end())
            building_ids.push_back(rec.building);
        if (std::find(scenario_ids.begin(), scenario_ids.end(), rec.scenario) ==
            scenario_ids.end())
            scenario_ids.push_back(rec.scenario);
        if (rec.period < 0)
            throw ValidationError("profiles: negative period for building '" +
                                  rec.building + "'");
        max_period = std::max(max_period, rec.period);
    }
    std::sort(scenario_ids.begin(), scenario_ids.end());
    const int periods = static_cast<int>(max_period) + 1;
    const int n_scenarios = static_cast<int>(scenario_ids.size());

    auto scenario_index = [&](const std::string& id) {
        return static_cast<int>(std::lower_bound(scenario_ids.begin(), scenario_ids.end(),
                                                 id) -
                                scenario_ids.begin());
    };

    CommunityModel model;
    model.buildings.resize(building_ids.size());
    std::map<std::string, int> building_index;
    for (std::size_t i = 0; i < building_ids.size(); ++i) {
        building_index[building_ids[i]] = static_cast<int>(i);
        model.buildings[i].id = building_ids[i];
        model.buildings[i].demand =
            Eigen::MatrixXd::Constant(n_scenarios, periods, -1.0);
        model.buildings[i].renewable =
            Eigen::MatrixXd::Constant(n_scenarios, periods, -1.0);
    }

    for (const auto& rec : records) {
        BuildingProfile& b = model.buildings[building_index[rec.building]];
        const int w = scenario_index(rec.scenario);
        if (b.demand(w, rec.period) >= 0)
            throw ValidationError("profiles: duplicate row for (" + rec.building + ", " +
                                  rec.scenario + ", period " +
                                  std::to_string(rec.period) + ")");
        b.demand(w, rec.period) = rec.demand;
        b.renewable(w, rec.period) = rec.renewable;
    }
    for (const BuildingProfile& b : model.buildings)
        if ((b.demand.array() < 0).any())
            throw ValidationError("profiles: building '" + b.id +
                                  "' is missing (scenario, period) rows");

    // Scenario probabilities.
    const fs::path prob_path =
        config_path.parent_path() /
        ini_get(ini, "scenarios", "probabilities_file").value_or("probabilities.csv");
    const auto probs = read_probabilities_csv(prob_path);
    model.scenarios.period_count = periods;
    model.scenarios.period_length_hours =
        ini_number(ini, "scenarios", "delta_hours", 1.0);
    model.scenarios.probabilities.resize(n_scenarios);
    for (int w = 0; w < n_scenarios; ++w) {
        const auto it = probs.find(scenario_ids[w]);
        if (it == probs.end())
            throw ValidationError("probabilities: missing scenario_id '" +
                                  scenario_ids[w] + "'");
        model.scenarios.probabilities[w] = it->second;
    }
    if (probs.size() != static_cast<std::size_t>(n_scenarios))
        throw ValidationError("probabilities: file lists scenarios absent from profiles");

    // Tariff.
    const Tariff defaults = singapore_default_tariff(periods);
    const bool has_purchase = ini_get(ini, "tariff", "purchase") ||
                              ini_get(ini, "tariff", "purchase_peak");
    model.tariff.purchase =
        has_purchase ? price_vector(ini, "purchase", periods) : defaults.purchase;
    model.tariff.sell = price_vector(ini, "sell", periods, 0.0);
    model.tariff.demand_charge =
        ini_number(ini, "tariff", "demand_charge", defaults.demand_charge);

    // Storage economics: amortize projected prices unless k_e/k_p given directly.
    StorageParams& st = model.storage;
    if (ini_get(ini, "storage", "k_e") || ini_get(ini, "storage", "k_p")) {
        st.k_e = ini_number(ini, "storage", "k_e");
        st.k_p = ini_number(ini, "storage", "k_p");
    } else {
        const double price_e = ini_number(ini, "storage", "price_e", 100.0);
        const double price_p = ini_number(ini, "storage", "price_p", 300.0);
        const double rate = ini_number(ini, "storage", "rate", 0.06);
        const int lifetime =
            static_cast<int>(ini_number(ini, "storage", "lifetime", 10));
        const int cycles =
            static_cast<int>(ini_number(ini, "storage", "cycles_per_year", 365));
        std::tie(st.k_e, st.k_p) =
            amortized_capacity_prices(price_e, price_p, rate, lifetime, cycles);
    }
    st.eta_ch = ini_number(ini, "storage", "eta_ch", 0.9);
    st.eta_dis = ini_number(ini, "storage", "eta_dis", 0.9);
    st.p_g_max = ini_number(ini, "storage", "p_g_max", 1e3);
    st.p_ch_max = ini_number(ini, "storage", "p_ch_max", st.p_g_max);
    st.p_dis_max = ini_number(ini, "storage", "p_dis_max", st.p_g_max);

    // Options.
    const std::string mode =
        ini_get(ini, "options", "sharing_mode").value_or("per_building");
    if (mode == "per_building")
        model.sharing_mode = SharingMode::PerBuilding;
    else if (mode == "pooled")
        model.sharing_mode = SharingMode::Pooled;
    else
        throw ValidationError("[options] sharing_mode: must be per_building or pooled");
    model.periodic_soc = ini_bool(ini, "options", "periodic_soc", false);
    model.demand_charge_import_only =
        ini_bool(ini, "options", "demand_charge_import_only", false);

    model.validate();
    return model;
}

void save_community(const CommunityModel& model, const fs::path& directory) {
    fs::create_directories(directory);

    std::ostringstream profiles;
    profiles << "building_id,scenario_id,period,demand_kw,renewable_kw\n";
    for (const BuildingProfile& b : model.buildings)
        for (int w = 0; w < model.scenario_count(); ++w)
            for (int t = 0; t < model.period_count(); ++t)
                profiles << b.id << ",S" << w << ',' << t << ','
                         << format_number(b.demand(w, t)) << ','
                         << format_number(b.renewable(w, t)) << '\n';
    write_file_atomic(directory / "profiles.csv", profiles.str());

    std::ostringstream probabilities;
    probabilities << "scenario_id,probability\n";
    for (int w = 0; w < model.scenario_count(); ++w)
        probabilities << 'S' << w << ','
                      << format_number(model.scenarios.probabilities[w]) << '\n';
    write_file_atomic(directory / "probabilities.csv", probabilities.str());

    std::ostringstream config;
    config << "[tariff]\npurchase = ";
    for (int t = 0; t < model.period_count(); ++t)
        config << (t ? "," : "") << format_number(model.tariff.purchase[t]);
    config << "\nsell = ";
    for (int t = 0; t < model.period_count(); ++t)
        config << (t ? "," : "") << format_number(model.tariff.sell[t]);
    config << "\ndemand_charge = " << format_number(model.tariff.demand_charge)
           << "\n\n[storage]\nk_e = " << format_number(model.storage.k_e)
           << "\nk_p = " << format_number(model.storage.k_p)
           << "\neta_ch = " << format_number(model.storage.eta_ch)
           << "\neta_dis = " << format_number(model.storage.eta_dis)
           << "\np_ch_max = " << format_number(model.storage.p_ch_max)
           << "\np_dis_max = " << format_number(model.storage.p_dis_max)
           << "\np_g_max = " << format_number(model.storage.p_g_max)
           << "\n\n[scenarios]\nprobabilities_file = probabilities.csv"
           << "\ndelta_hours = " << format_number(model.scenarios.period_length_hours)
           << "\n\n[options]\nsharing_mode = "
           << (model.sharing_mode == SharingMode::Pooled ? "pooled" : "per_building")
           << "\nperiodic_soc = " << (model.periodic_soc ? "true" : "false")
           << "\ndemand_charge_import_only = "
           << (model.demand_charge_import_only ? "true" : "false") << '\n';
    write_file_atomic(directory / "community.ini", config.str());
}

} // namespace cesshare::model
