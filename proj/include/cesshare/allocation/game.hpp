// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CESSHARE_ALLOCATION_GAME_HPP
#define CESSHARE_ALLOCATION_GAME_HPP

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

#include "cesshare/coalition/value.hpp"
#include "cesshare/model/model.hpp"

namespace cesshare::allocation {

using model::CoalitionKey;

struct ViolationResult {
    CoalitionKey coalition;
    double excess = 0.0; // x(S) - nu(S), the caller compares it to its z
};

/// Cost game nu over coalitions of players 0..N-1. Implementations memoize;
/// queries() counts distinct coalitions whose value was actually computed.
class CostGame {
public:
    virtual ~CostGame() = default;
    virtual int player_count() const = 0;
    virtual double value(CoalitionKey key) const = 0;
    virtual std::size_t queries() const = 0;

    /// Proper non-empty coalition maximizing x(S) - nu(S), skipping
    /// `excluded`; nullopt when the exclusions cover everything.
    virtual std::optional<ViolationResult> most_violated(
        const std::vector<double>& x,
        const std::vector<CoalitionKey>& excluded) const = 0;

    /// Warm the memo for `keys`; the default is a no-op.
    virtual void prefetch(const std::vector<CoalitionKey>& keys, int threads) const;

    double excess(const std::vector<double>& x, CoalitionKey key) const;
};

/// Game given by an explicit value table (index = coalition mask). The
/// separation oracle is plain enumeration.
class TableGame : public CostGame {
public:
    explicit TableGame(std::vector<double> values);
    static TableGame load_json(const std::filesystem::path& path);

    int player_count() const override { return n_; }
    double value(CoalitionKey key) const override;
    std::size_t queries() const override;
    std::optional<ViolationResult> most_violated(
        const std::vector<double>& x,
        const std::vector<CoalitionKey>& excluded) const override;

private:
    int n_ = 0;
    std::vector<double> values_;
    mutable std::mutex mutex_;
    mutable std::set<std::uint64_t> touched_;
};

/// Game whose values come from the community sizing program, with the
/// mixed-integer blended search as separation oracle. The oracle's embedded
/// value is cross-checked against the plain evaluation at 1e-5.
class StorageGame : public CostGame {
public:
    StorageGame(const model::CommunityModel& model,
                coalition::CharacteristicCache& cache, int threads = 1);

    int player_count() const override;
    double value(CoalitionKey key) const override;
    std::size_t queries() const override;
    std::optional<ViolationResult> most_violated(
        const std::vector<double>& x,
        const std::vector<CoalitionKey>& excluded) const override;
    void prefetch(const std::vector<CoalitionKey>& keys, int threads) const override;

    const model::CommunityModel& community() const { return model_; }
    coalition::CharacteristicCache& cache() const { return cache_; }

private:
    const model::CommunityModel& model_;
    coalition::CharacteristicCache& cache_;
    int threads_;
};

} // namespace cesshare::allocation

#endif
