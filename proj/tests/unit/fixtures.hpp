#pragma once

#include <random>
#include <vector>

#include "pevnet/generate.hpp"
#include "pevnet/mechanism.hpp"

namespace fixtures {

using namespace pevnet;

inline AgentId id(std::uint32_t v) { return AgentId{v}; }
inline Rational r(const char* text) { return Rational::parse(text); }

/// A profile where each agent independently tells the truth, declines, or
/// bids a random cost with a random subset of her true neighbours.
inline ReportProfile random_profile(const Scenario& sc, std::mt19937_64& rng, bool keep_pmf = false) {
    ReportProfile p = truthful_profile(sc);
    for (std::size_t i = 0; i < sc.size(); ++i) {
        const auto& t = sc.at(i).type;
        switch (rng() % 4) {
            case 0: break;
            case 1: p[i] = Report::nil(); break;
            default: {
                std::vector<AgentId> invited;
                for (AgentId nb : t.neighbors) {
                    if (rng() % 3) invited.push_back(nb);
                }
                Pmf pmf = t.pmf;
                if (!keep_pmf && rng() % 2) {
                    const auto levels = sc.quality_levels();
                    pmf = Pmf::point_mass(levels[rng() % levels.size()]);
                }
                p[i] = Report::bid(pmf, Rational(static_cast<std::int64_t>(rng() % 40), 10), invited);
            }
        }
    }
    return p;
}

inline Scenario random_scenario(std::uint64_t seed, std::size_t max_agents = 8, bool degenerate = false) {
    GenOptions o;
    o.agents = 1 + seed % max_agents;
    o.levels = 1 + seed % 4;
    o.density = 0.1 * static_cast<double>(1 + seed % 5);
    o.seed = seed;
    o.degenerate_quality = degenerate;
    return generate_scenario(o).scenario;
}

}  // namespace fixtures
