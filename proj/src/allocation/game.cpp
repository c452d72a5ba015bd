// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#include "cesshare/allocation/game.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <atomic>
#include <bit>
#include <thread>

#include <json.hpp>

#include "cesshare/errors.hpp"

namespace cesshare::allocation {

void CostGame::prefetch(const std::vector<CoalitionKey>&, int) const {}

double CostGame::excess(const std::vector<double>& x, CoalitionKey key) const {
    double xs = 0.0;
    for (int i : key.members()) xs += x.at(i);
    return xs - value(key);
}

TableGame::TableGame(std::vector<double> values) : values_(std::move(values)) {
    const std::size_t size = values_.size();
    if (size < 2 || (size & (size - 1)) != 0)
        throw InputError("value table length must be a power of two >= 2");
    n_ = static_cast<int>(std::countr_zero(size));
    if (values_[0] != 0.0)
        throw InputError("value of the empty coalition must be zero");
    for (double v : values_)
        if (!std::isfinite(v)) throw InputError("value table contains a non-finite entry");
}

TableGame TableGame::load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open game file '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("game file '" + path.string() + "': " + e.what());
    }
    if (!doc.contains("players") || !doc.contains("values"))
        throw ValidationError("game file needs 'players' and 'values' keys");
    const int n = doc["players"].get<int>();
    if (n < 1 || n > 20) throw ValidationError("game file: players must be in [1, 20]");
    std::vector<double> values(std::size_t{1} << n, 0.0);
    // values keyed by coalition mask as a decimal string, empty mask optional
    for (const auto& [key, val] : doc["values"].items()) {
        const std::uint64_t mask = std::stoull(key);
        if (mask >= values.size())
            throw ValidationError("game file: mask " + key + " out of range");
        values[mask] = val.get<double>();
    }
    return TableGame(std::move(values));
}

double TableGame::value(CoalitionKey key) const {
    if (key.mask >= values_.size()) throw InputError("coalition mask out of range");
    {
        std::lock_guard lock(mutex_);
        if (key.mask != 0) touched_.insert(key.mask);
    }
    return values_[key.mask];
}

std::size_t TableGame::queries() const {
    std::lock_guard lock(mutex_);
    return touched_.size();
}

std::optional<ViolationResult> TableGame::most_violated(
    const std::vector<double>& x, const std::vector<CoalitionKey>& excluded) const {
    if (static_cast<int>(x.size()) != n_)
        throw InputError("allocation length does not match the player count");
    const std::uint64_t grand = (std::uint64_t{1} << n_) - 1;
    std::optional<ViolationResult> best;
    for (std::uint64_t mask = 1; mask < grand; ++mask) {
        const CoalitionKey key{mask};
        if (std::find(excluded.begin(), excluded.end(), key) != excluded.end()) continue;
        const double e = excess(x, key);
        if (!best || e > best->excess) best = ViolationResult{key, e};
    }
    return best;
}

StorageGame::StorageGame(const model::CommunityModel& model,
                         coalition::CharacteristicCache& cache, int threads)
    : model_(model), cache_(cache), threads_(std::max(threads, 1)) {
    if (cache.model_hash() != model.content_hash())
        throw ValidationError("characteristic cache was built for a different model");
}

int StorageGame::player_count() const { return model_.building_count(); }

double StorageGame::value(CoalitionKey key) const {
    if (key.empty()) return 0.0;
    return coalition::evaluate_coalition(model_, key, &cache_).value;
}

std::size_t StorageGame::queries() const { return cache_.query_count(); }

std::optional<ViolationResult> StorageGame::most_violated(
    const std::vector<double>& x, const std::vector<CoalitionKey>& excluded) const {
    if (static_cast<int>(x.size()) != player_count())
        throw InputError("allocation length does not match the building count");
    const auto vm = coalition::build_violation_milp(model_, x, excluded);
    const auto sol = solver::solve_milp(vm.milp);
    if (sol.status == solver::SolveStatus::Infeasible) return std::nullopt;
    if (sol.status != solver::SolveStatus::Optimal)
        throw InternalError("violation search did not solve to optimality");

    CoalitionKey key{0};
    for (int i = 0; i < player_count(); ++i)
        if (sol.primal[vm.var_s(i)] > 0.5) key = key.with(i);
    const double embedded = -sol.objective_value;
    const double exact = excess(x, key);
    if (std::abs(embedded - exact) > 1e-5)
        throw InternalError("violation search value drifted from the plain evaluation by " +
                            std::to_string(std::abs(embedded - exact)));
    return ViolationResult{key, exact};
}

void StorageGame::prefetch(const std::vector<CoalitionKey>& keys, int threads) const {
    const int workers = std::max(1, std::min<int>(threads > 0 ? threads : threads_,
                                                  static_cast<int>(keys.size())));
    if (workers == 1) {
        for (CoalitionKey key : keys)
            if (!key.empty()) (void)value(key);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= keys.size()) return;
                if (keys[k].empty()) continue;
                try {
                    (void)value(keys[k]);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace cesshare::allocation
