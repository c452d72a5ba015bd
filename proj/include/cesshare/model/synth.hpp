// Copyright 2026 the cesshare authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CESSHARE_MODEL_SYNTH_HPP
#define CESSHARE_MODEL_SYNTH_HPP

#include <cstdint>

#include "cesshare/model/model.hpp"

namespace cesshare::model {

/// Deterministic synthetic community with complementary load shapes.
/// Buildings cycle through office / hotel / school daily archetypes, scaled
/// by seeded noise; renewable is a midday solar bell with per-scenario
/// weather factors. Same arguments always produce the same model.
CommunityModel generate_synthetic(int n_buildings, int n_scenarios, int periods,
                                  std::uint64_t seed);

} // namespace cesshare::model

#endif
