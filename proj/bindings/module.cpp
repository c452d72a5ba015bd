// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0
//
// Python bindings: a thin Community wrapper over the C++ core exposing
// coalition evaluation, the three allocation methods and the economic
// report. Heavy lifting stays in cesshare_core.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cesshare/allocation/allocate.hpp"
#include "cesshare/allocation/game.hpp"
#include "cesshare/coalition/value.hpp"
#include "cesshare/errors.hpp"
#include "cesshare/metrics/report.hpp"
#include "cesshare/model/load.hpp"
#include "cesshare/model/synth.hpp"

namespace py = pybind11;
using namespace cesshare;

namespace {

class Community {
public:
    explicit Community(model::CommunityModel m)
        : model_(std::move(m)), cache_(std::make_unique<coalition::CharacteristicCache>(model_)) {}

    std::vector<std::string> building_ids() const {
        std::vector<std::string> ids;
        for (const auto& b : model_.buildings) ids.push_back(b.id);
        return ids;
    }

    int index_of(const std::string& id) const {
        for (std::size_t i = 0; i < model_.buildings.size(); ++i)
            if (model_.buildings[i].id == id) return static_cast<int>(i);
        throw InputError("unknown building id: " + id);
    }

    model::CoalitionKey key_for(const std::optional<std::vector<std::string>>& members) const {
        if (!members) return model::CoalitionKey::grand(static_cast<int>(model_.buildings.size()));
        model::CoalitionKey key{0};
        for (const auto& id : *members) key = key.with(index_of(id));
        return key;
    }

    py::dict evaluate(const std::optional<std::vector<std::string>>& members) const {
        const auto out = coalition::evaluate_coalition(model_, key_for(members), cache_.get());
        py::dict d;
        d["value"] = out.value;
        d["energy_capacity"] = out.energy_capacity;
        d["power_capacity"] = out.power_capacity;
        d["capex"] = out.capex;
        d["expected_opex"] = out.expected_opex;
        return d;
    }

    double no_storage_cost(const std::string& id) const {
        return coalition::no_storage_cost(model_, index_of(id));
    }

    py::dict allocate(const std::string& method, int threads, bool force) const {
        allocation::StorageGame game(model_, *cache_, threads);
        allocation::AllocationResult res;
        if (method == "nucleolus")
            res = allocation::nucleolus(game);
        else if (method == "shapley")
            res = allocation::shapley(game, threads, force);
        else if (method == "proportional")
            res = allocation::proportional(game, force);
        else
            throw InputError("method must be nucleolus, shapley or proportional");
        py::dict alloc;
        for (std::size_t i = 0; i < res.allocation.size(); ++i)
            alloc[py::str(model_.buildings[i].id)] = res.allocation[i];
        py::dict d;
        d["method"] = allocation::method_name(res.method);
        d["allocation"] = alloc;
        d["max_excess"] = res.max_excess;
        d["in_core"] = res.in_core;
        d["episodes"] = res.episodes;
        d["coalitions_queried"] = res.coalitions_queried;
        return d;
    }

    py::dict report(const std::optional<std::vector<double>>& allocation, int threads) const {
        std::vector<double> x;
        if (allocation) {
            x = *allocation;
        } else {
            allocation::StorageGame game(model_, *cache_, threads);
            x = allocation::nucleolus(game).allocation;
        }
        const auto rep = metrics::build_report(model_, *cache_, x);
        auto opt = [](const std::optional<double>& v) -> py::object {
            return v ? py::cast(*v) : py::none();
        };
        py::list rows;
        for (const auto& b : rep.buildings) {
            py::dict r;
            r["id"] = b.id;
            r["baseline_no_es"] = b.baseline_no_es;
            r["ies_total"] = b.ies_total;
            r["ces_total"] = b.ces_total;
            r["ces_opex"] = b.ces_opex;
            r["ces_capex_share"] = b.ces_capex_share;
            r["cost_reduction_ies"] = b.cost_reduction_ies;
            r["cost_reduction_ces"] = b.cost_reduction_ces;
            r["vos_ies"] = opt(b.vos_ies);
            r["vos_ces"] = opt(b.vos_ces);
            rows.append(r);
        }
        py::dict d;
        d["buildings"] = rows;
        d["baseline_total"] = rep.baseline_total;
        d["ies_sum"] = rep.ies_sum;
        d["ces_total"] = rep.ces_total;
        d["pooled_total"] = rep.pooled_total;
        d["ces_energy_capacity"] = rep.ces_energy_capacity;
        d["ces_power_capacity"] = rep.ces_power_capacity;
        d["cost_reduction_ces"] = rep.cost_reduction_ces;
        d["vos_ies"] = opt(rep.vos_ies);
        d["vos_ces"] = opt(rep.vos_ces);
        return d;
    }

    std::size_t coalitions_evaluated() const { return cache_->query_count(); }

private:
    model::CommunityModel model_;
    std::unique_ptr<coalition::CharacteristicCache> cache_;
};

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "shared energy storage sizing and fair cost allocation";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    py::class_<Community>(m, "Community")
        .def("building_ids", &Community::building_ids)
        .def("evaluate", &Community::evaluate, py::arg("members") = py::none(),
             "Coalition value: optimal capacity, capital and expected operation "
             "cost for the given member ids (default: the whole community).")
        .def("no_storage_cost", &Community::no_storage_cost, py::arg("building_id"))
        .def("allocate", &Community::allocate, py::arg("method") = "nucleolus",
             py::arg("threads") = 1, py::arg("force") = false)
        .def("report", &Community::report, py::arg("allocation") = py::none(),
             py::arg("threads") = 1)
        .def("coalitions_evaluated", &Community::coalitions_evaluated);

    m.def(
        "load",
        [](const std::string& profiles, const std::string& config) {
            return Community(model::load_community(profiles, config));
        },
        py::arg("profiles"), py::arg("config"));
    m.def(
        "synthetic",
        [](int buildings, int scenarios, int periods, std::uint64_t seed) {
            return Community(model::generate_synthetic(buildings, scenarios, periods, seed));
        },
        py::arg("buildings") = 3, py::arg("scenarios") = 2, py::arg("periods") = 24,
        py::arg("seed") = 1);
}
