// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0
//
// cesshare: size a community-shared energy store, split its cost fairly,
// and compare the sharing schemes. Subcommands: value, allocate, compare,
// synth. Exit codes: 0 success, 1 solver/resource failure, 2 bad input.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cesshare/allocation/allocate.hpp"
#include "cesshare/errors.hpp"
#include "cesshare/metrics/report.hpp"
#include "cesshare/model/load.hpp"
#include "cesshare/model/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cesshare;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

model::CommunityModel load_model(const std::string& profiles, std::string config,
                                 const std::string& sharing) {
    if (config.empty()) {
        if (const char* env = std::getenv("CESSHARE_CONFIG"))
            config = env;
        else
            config = (fs::path(profiles).parent_path() / "community.ini").string();
    }
    auto m = model::load_community(profiles, config);
    if (sharing == "pooled")
        m.sharing_mode = model::SharingMode::Pooled;
    else if (sharing == "per_building")
        m.sharing_mode = model::SharingMode::PerBuilding;
    else if (!sharing.empty())
        throw InputError("--sharing must be per_building or pooled");
    return m;
}

model::CoalitionKey parse_coalition(const model::CommunityModel& m,
                                    const std::string& spec) {
    if (spec == "grand") return model::CoalitionKey::grand(m.building_count());
    model::CoalitionKey key{0};
    std::string id;
    std::istringstream stream(spec);
    while (std::getline(stream, id, ','))
        key = key.with(m.index_of(id)); // throws on unknown id
    if (key.empty()) throw InputError("empty coalition spec");
    return key;
}

json outcome_to_json(const model::CommunityModel& m,
                     const coalition::CoalitionOutcome& out) {
    json doc{{"value", out.value},
             {"energy_capacity_kwh", out.energy_capacity},
             {"power_capacity_kw", out.power_capacity},
             {"capex", out.capex},
             {"expected_opex", out.expected_opex}};
    for (int member : out.schedule.members)
        doc["members"].push_back(m.buildings[member].id);
    return doc;
}

std::string schedule_to_csv(const model::CommunityModel& m,
                            const coalition::DispatchSchedule& sch) {
    std::ostringstream out;
    out << "building_id,scenario,period,charge_kw,discharge_kw,stored_kwh,"
           "import_kw,export_kw,scenario_peak_kw\n";
    for (std::size_t k = 0; k < sch.members.size(); ++k) {
        const int mi = static_cast<int>(k);
        for (int w = 0; w < sch.scenario_count; ++w)
            for (int t = 0; t < sch.period_count; ++t)
                out << m.buildings[sch.members[k]].id << ',' << w << ',' << t << ','
                    << fmt(sch.p_ch[mi](w, t)) << ',' << fmt(sch.p_dis[mi](w, t)) << ','
                    << fmt(sch.e_b[mi](w, t)) << ',' << fmt(sch.p_gplus[mi](w, t)) << ','
                    << fmt(sch.p_gminus[mi](w, t)) << ',' << fmt(sch.p_gmax[mi](w))
                    << '\n';
    }
    return out.str();
}

json allocation_to_json(const model::CommunityModel& m,
                        const allocation::AllocationResult& res) {
    json doc{{"method", allocation::method_name(res.method)},
             {"max_excess", res.max_excess},
             {"satisfied", res.max_excess <= 1e-6},
             {"in_core", res.in_core},
             {"episodes", res.episodes},
             {"coalitions_queried", res.coalitions_queried}};
    double total = 0.0;
    for (int i = 0; i < m.building_count(); ++i) {
        doc["allocation"][m.buildings[i].id] = res.allocation[i];
        total += res.allocation[i];
    }
    doc["total"] = total;
    return doc;
}

std::string trace_to_jsonl(const allocation::AllocationResult& res) {
    std::ostringstream out;
    for (const auto& entry : res.trace) {
        json line{{"episode", entry.episode},
                  {"action", entry.action},
                  {"coalition", entry.coalition_mask},
                  {"excess", entry.excess},
                  {"z", entry.z},
                  {"wall_ms", entry.wall_ms}};
        out << line.dump() << '\n';
    }
    return out.str();
}

void write_out(const fs::path& dir, const std::string& name, const std::string& body) {
    fs::create_directories(dir);
    model::write_file_atomic(dir / name, body);
}

struct Options {
    std::string profiles, config, out = ".", sharing;
    std::string coalition = "grand", method = "nucleolus";
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    bool force = false, schedule = false;
    int buildings = 3, scenarios = 2, periods = 24;
    std::uint64_t seed = 1;
};

int cmd_value(const Options& opt) {
    const auto m = load_model(opt.profiles, opt.config, opt.sharing);
    const auto key = parse_coalition(m, opt.coalition);
    const auto out = coalition::evaluate_coalition(m, key, nullptr);
    const json doc = outcome_to_json(m, out);
    std::cout << doc.dump(2) << '\n';
    write_out(opt.out, "coalition.json", doc.dump(2) + "\n");
    if (opt.schedule) write_out(opt.out, "schedule.csv", schedule_to_csv(m, out.schedule));
    return 0;
}

int cmd_allocate(const Options& opt) {
    const auto m = load_model(opt.profiles, opt.config, opt.sharing);
    coalition::CharacteristicCache cache(m);
    allocation::StorageGame game(m, cache, opt.threads);

    std::vector<std::string> methods;
    if (opt.method == "all")
        methods = {"nucleolus", "shapley", "proportional"};
    else if (opt.method == "nucleolus" || opt.method == "shapley" ||
             opt.method == "proportional")
        methods = {opt.method};
    else
        throw InputError("--method must be nucleolus, shapley, proportional or all");

    for (const std::string& name : methods) {
        allocation::AllocationResult res;
        if (name == "nucleolus")
            res = allocation::nucleolus(game);
        else if (name == "shapley")
            res = allocation::shapley(game, opt.threads, opt.force);
        else
            res = allocation::proportional(game, opt.force);
        const json doc = allocation_to_json(m, res);
        write_out(opt.out, "allocation_" + name + ".json", doc.dump(2) + "\n");
        write_out(opt.out, "trace_" + name + ".jsonl", trace_to_jsonl(res));
        std::cout << name << ": total " << fmt(doc["total"].get<double>())
                  << ", worst excess " << fmt(res.max_excess)
                  << (res.max_excess <= 1e-6 ? " (satisfied)" : " (violated)")
                  << ", queried " << res.coalitions_queried << " coalitions\n";
    }
    return 0;
}

int cmd_compare(const Options& opt) {
    const auto m = load_model(opt.profiles, opt.config, opt.sharing);
    coalition::CharacteristicCache cache(m);
    allocation::StorageGame game(m, cache, opt.threads);
    const auto nuc = allocation::nucleolus(game);
    const auto rep = metrics::build_report(m, cache, nuc.allocation);
    write_out(opt.out, "report.csv", metrics::report_to_csv(rep));
    write_out(opt.out, "report.json", metrics::report_to_json(rep));
    std::cout << metrics::report_to_csv(rep);
    return 0;
}

int cmd_synth(const Options& opt) {
    const auto m = model::generate_synthetic(opt.buildings, opt.scenarios, opt.periods,
                                             opt.seed);
    model::save_community(m, opt.out);
    std::cout << "wrote " << opt.buildings << " buildings, " << opt.scenarios
              << " scenarios, " << opt.periods << " periods to " << opt.out << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"community-shared energy storage: sizing, dispatch and fair "
                 "cost allocation"};
    app.require_subcommand(1);
    Options opt;

    auto add_io = [&](CLI::App* sub, bool need_profiles) {
        if (need_profiles)
            sub->add_option("--profiles", opt.profiles, "profiles CSV path")->required();
        sub->add_option("--config", opt.config,
                        "community INI path (default: community.ini next to the "
                        "profiles; CESSHARE_CONFIG overrides)");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--sharing", opt.sharing,
                        "override sharing mode: per_building or pooled");
        sub->add_option("--threads", opt.threads, "worker threads");
    };

    CLI::App* value = app.add_subcommand("value", "evaluate one coalition");
    add_io(value, true);
    value->add_option("--coalition", opt.coalition,
                      "comma-separated building ids, or 'grand'");
    value->add_flag("--schedule", opt.schedule, "also write the dispatch CSV");

    CLI::App* allocate = app.add_subcommand("allocate", "split the shared cost");
    add_io(allocate, true);
    allocate->add_option("--method", opt.method,
                         "nucleolus | shapley | proportional | all");
    allocate->add_flag("--force", opt.force,
                       "override the player-count guard / degenerate-split guard");

    CLI::App* compare = app.add_subcommand("compare", "economic comparison report");
    add_io(compare, true);

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic community");
    synth->add_option("--buildings", opt.buildings, "building count")
        ->check(CLI::Range(1, 63));
    synth->add_option("--scenarios", opt.scenarios, "scenario count")
        ->check(CLI::Range(1, 512));
    synth->add_option("--periods", opt.periods, "periods per cycle")
        ->check(CLI::Range(1, 1024));
    synth->add_option("--seed", opt.seed, "generator seed");
    synth->add_option("--out", opt.out, "output directory")->required();

    try {
        app.parse(argc, argv);
        if (value->parsed()) return cmd_value(opt);
        if (allocate->parsed()) return cmd_allocate(opt);
        if (compare->parsed()) return cmd_compare(opt);
        if (synth->parsed()) return cmd_synth(opt);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 1;
    }
}
