#pragma once

#include <cstdint>

#include "pevnet/scenario_io.hpp"

namespace pevnet {

struct GenOptions {
    std::size_t agents = 8;
    std::size_t levels = 3;        // quality levels 1..levels
    double density = 0.2;          // probability of each extra undirected edge
    std::uint64_t seed = 0;
    bool degenerate_quality = false;  // every agent a point mass at one common level
};

/// Random scenario connected from s: agent k hangs off a uniformly chosen
/// earlier node, then extra edges are added with probability `density`.
/// Costs and masses lie on the 1/10 grid. Deterministic in the options.
ScenarioFile generate_scenario(const GenOptions& options);

}  // namespace pevnet
