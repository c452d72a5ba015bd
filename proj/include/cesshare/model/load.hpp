// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CESSHARE_MODEL_LOAD_HPP
#define CESSHARE_MODEL_LOAD_HPP

#include <filesystem>
#include <string>

#include "cesshare/model/model.hpp"

namespace cesshare::model {

/// Loads and validates a community instance.
///
/// profiles CSV columns: building_id, scenario_id, period, demand_kw,
/// renewable_kw; one row per (building, scenario, period), periods 0..T-1.
/// Scenario probabilities come from a second CSV (scenario_id, probability)
/// referenced by the config's [scenarios] probabilities_file key, resolved
/// relative to the config file (default "probabilities.csv" next to it).
CommunityModel load_community(const std::filesystem::path& profiles_path,
                              const std::filesystem::path& config_path);

/// Writes profiles.csv, probabilities.csv and community.ini into `directory`.
/// Output is byte-stable: identical models produce identical files.
void save_community(const CommunityModel& model,
                    const std::filesystem::path& directory);

/// Atomic file write: content goes to a temporary sibling, then a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace cesshare::model

#endif
